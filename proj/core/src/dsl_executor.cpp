#include <sstream>

#include "pkb/dsl.hpp"

namespace pkb::dsl {

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::ModallyInconsistent:
    case Errc::InconsistentContext:
    case Errc::InconsistentStore:
      return 2;
    case Errc::UnknownWorld:
    case Errc::UnknownIndividual:
    case Errc::UnknownPossibility:
    case Errc::UnknownContext:
    case Errc::UnknownTestimony:
    case Errc::UnknownNestedContext:
      return 3;
    default:
      return 1;
  }
}

std::string format_possibly(const QueryAnswer& a) {
  std::ostringstream out;
  out << (a.yes ? "yes" : "no") << " | status=" << to_string(a.status)
      << " | owner=" << a.owner << " | epoch=" << a.epoch.value;
  return out.str();
}

std::string format_classify(ModalStatus s, const std::string& owner,
                            Epoch epoch) {
  std::ostringstream out;
  out << to_string(s) << " | status=" << to_string(s) << " | owner=" << owner
      << " | epoch=" << epoch.value;
  return out.str();
}

std::string format_ratio(const Rational& r, const std::string& owner,
                         Epoch epoch) {
  std::ostringstream out;
  out << r.to_string() << " | owner=" << owner << " | epoch=" << epoch.value;
  return out.str();
}

namespace {

std::string world_set_text(const Store& store, const WorldSet& ws) {
  std::ostringstream out;
  out << "{";
  for (WorldId w : ws) out << " " << store.model().world(w).name;
  out << " }";
  return out.str();
}

}  // namespace

std::vector<std::string> explain_lines(const Store& store, ContextId ctx,
                                       std::span<const PossibilityId> ps) {
  std::vector<std::string> lines;
  const ContextNode& node = store.context(ctx);
  lines.push_back("# candidates(" + node.name + ") = " +
                  world_set_text(store, node.candidates));
  auto solved = store.solve_worlds(ctx, store.epoch());
  if (const auto* state = std::get_if<DoxasticState>(&solved))
    lines.push_back("# allowed(" + node.name + ") = " +
                    world_set_text(store, state->allowed));
  else
    lines.push_back("# allowed(" + node.name + ") = inconsistent");
  for (PossibilityId p : ps)
    lines.push_back("# worlds(" + store.space().possibility(p).name + ") = " +
                    world_set_text(store, store.space().worlds_of(p)));
  return lines;
}

namespace {

class Runner {
 public:
  Runner(Store& store, const ExecOptions& opts) : store_(store), opts_(opts) {}

  ExecResult run(const Script& script) {
    for (const Statement& stmt : script.statements) {
      if (!step(stmt)) return std::move(result_);
    }
    if (record_mode_) {
      if (auto bad = store_.verify_consistent()) {
        result_.exit_code = 2;
        result_.conflict = std::move(bad->second);
        result_.output.push_back("store is modally inconsistent in context '" +
                                 bad->first + "'");
      }
    }
    return std::move(result_);
  }

 private:
  bool fail(const SrcLoc& loc, int code, const std::string& message,
            std::string token = "") {
    result_.exit_code = code;
    result_.diagnostics.push_back(
        Diagnostic{loc.line, loc.col, message, std::move(token)});
    return false;
  }

  bool conflict_stop(ConflictReport report) {
    result_.exit_code = 2;
    result_.conflict = std::move(report);
    return false;
  }

  PossibilityId poss(const std::string& name) {
    auto id = store_.space().find_possibility(name);
    if (!id)
      throw Error(Errc::UnknownPossibility,
                  "unknown possibility '" + name + "'");
    return *id;
  }

  ContextId ctx(const std::string& name) {
    auto id = store_.find_context(name);
    if (!id) throw Error(Errc::UnknownContext, "unknown context '" + name + "'");
    return *id;
  }

  bool step(const Statement& stmt) {
    try {
      return std::visit([&](const auto& node) { return apply(stmt.loc, node); },
                        stmt.node);
    } catch (const InconsistencyError& e) {
      result_.conflict = e.report();
      return fail(stmt.loc, 2, e.what());
    } catch (const LoadError& e) {
      result_.exit_code = e.result().exit_code;
      for (const Diagnostic& d : e.result().diagnostics)
        result_.diagnostics.push_back(d);
      if (e.result().conflict) result_.conflict = e.result().conflict;
      return false;
    } catch (const Error& e) {
      return fail(stmt.loc, exit_code_for(e), e.what());
    }
  }

  bool apply(const SrcLoc&, const VersionStmt&) { return true; }

  bool apply(const SrcLoc&, const BranchStmt& s) {
    store_.set_branch(s.branch, s.forks);
    return true;
  }

  bool apply(const SrcLoc&, const StageStmt& s) {
    store_.begin_stage(s.id, s.branch, s.from);
    record_mode_ = true;
    return true;
  }

  bool apply(const SrcLoc&, const WorldStmt& s) {
    store_.add_world(s.atoms, s.name);
    return true;
  }

  bool apply(const SrcLoc&, const IndStmt& s) {
    WorldId w = *store_.model().find_world(s.world);
    store_.add_individual(w, s.atoms, s.name);
    return true;
  }

  bool apply(const SrcLoc&, const PossStmt& s) {
    std::vector<IndividualId> members;
    for (const PossMember& m : s.members) {
      WorldId w = *store_.model().find_world(m.world);
      auto ind = store_.model().find_individual(w, m.individual);
      if (!ind)
        throw Error(Errc::UnknownIndividual,
                    "unknown individual '" + m.individual + "' in world '" +
                        m.world + "'");
      members.push_back(*ind);
    }
    store_.define_possibility(s.name, std::move(members), s.functional);
    return true;
  }

  bool apply(const SrcLoc&, const ConstructStmt& s) {
    std::vector<PossibilityId> inputs;
    for (const std::string& name : s.inputs) inputs.push_back(poss(name));
    store_.comoverlap_construct(inputs, s.name);
    return true;
  }

  bool apply(const SrcLoc&, const ContextStmt& s) {
    std::optional<ContextId> parent;
    if (s.parent) parent = ctx(*s.parent);
    store_.open_context(s.name, poss(s.agent), poss(s.now), parent);
    return true;
  }

  bool apply(const SrcLoc& loc, const AgentStmt& s) {
    if (record_mode_) {
      store_.record_register(s.context, s.possibility, s.status);
      return true;
    }
    (void)loc;
    store_.register_agent(ctx(s.context), poss(s.possibility), s.status);
    return true;
  }

  bool apply(const SrcLoc&, const AssertStmt& s) {
    if (record_mode_) {
      store_.record_assert(s.context, s.possibility, s.status);
      return true;
    }
    AssertOutcome outcome =
        store_.assert_status(ctx(s.context), poss(s.possibility), s.status);
    if (!outcome.accepted()) return conflict_stop(std::move(*outcome.conflict));
    return true;
  }

  bool apply(const SrcLoc&, const TestifyStmt& s) {
    if (record_mode_) {
      store_.record_testify(s.context, s.speaker, s.now, s.possibility,
                            s.status);
      return true;
    }
    store_.record_testimony(ctx(s.context), poss(s.speaker), poss(s.now),
                            poss(s.possibility), s.status);
    return true;
  }

  bool apply(const SrcLoc&, const EndorseStmt& s) {
    if (s.reject) {
      store_.reject_testimony(ctx(s.context), s.testimony);
      return true;
    }
    AssertOutcome outcome = store_.endorse(ctx(s.context), s.testimony);
    if (!outcome.accepted()) return conflict_stop(std::move(*outcome.conflict));
    return true;
  }

  bool apply(const SrcLoc&, const EpochStmt&) {
    store_.advance_epoch();
    return true;
  }

  bool apply(const SrcLoc&, const QueryStmt& s) {
    ContextId c = ctx(s.context);
    PossibilityId p = poss(s.possibility);
    std::vector<PossibilityId> shown{p};
    std::string line;
    switch (s.kind) {
      case QueryStmt::Kind::Possibly:
        line = format_possibly(store_.query_possibly(c, p));
        break;
      case QueryStmt::Kind::Classify:
        line = format_classify(
            store_.classify(c, p, store_.epoch()),
            store_.space().possibility(store_.context(c).agent).name,
            store_.epoch());
        break;
      case QueryStmt::Kind::Ratio: {
        PossibilityId q = poss(s.possibility2);
        shown.push_back(q);
        line = format_ratio(
            store_.credence_ratio(p, q, c, store_.epoch()),
            store_.space().possibility(store_.context(c).agent).name,
            store_.epoch());
        break;
      }
    }
    if (opts_.explain)
      for (auto& extra : explain_lines(store_, c, shown))
        result_.output.push_back(std::move(extra));
    result_.output.push_back(std::move(line));
    return true;
  }

  bool apply(const SrcLoc&, const ForkStmt& s) {
    auto [a, b] = store_.fork();
    save_store_file(a, opts_.base_dir / s.out_a);
    save_store_file(b, opts_.base_dir / s.out_b);
    result_.output.push_back("forked into " + s.out_a + " and " + s.out_b);
    return true;
  }

  bool apply(const SrcLoc&, const MergeStmt& s) {
    Store other = load_store_file(opts_.base_dir / s.other);
    auto merged = Store::merge(store_, other);
    if (std::holds_alternative<ConflictReport>(merged))
      return conflict_stop(std::get<ConflictReport>(std::move(merged)));
    store_ = std::get<Store>(std::move(merged));
    result_.output.push_back("merged with " + s.other);
    return true;
  }

  Store& store_;
  const ExecOptions& opts_;
  ExecResult result_;
  bool record_mode_ = false;
};

}  // namespace

ExecResult execute(Store& store, const Script& script,
                   const ExecOptions& opts) {
  return Runner(store, opts).run(script);
}

}  // namespace pkb::dsl
