#include "pkb/store.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <set>

namespace pkb {

namespace {

// [begin, end) of a stage's events; open stages run to the end of the log.
std::pair<std::size_t, std::size_t> stage_events(const Stage& s,
                                                 std::size_t log_size) {
  return {s.log_begin, s.open ? log_size : s.log_end};
}

}  // namespace

Store::Store() {
  stages_.push_back(Stage{"b0-s0", "b0", Epoch{0}, Epoch{}, 0, 0, true});
}

// --- kernel / possibility passthrough --------------------------------------

WorldId Store::add_world(const std::vector<std::string>& atom_labels,
                         std::string name) {
  return space_.model().add_world(atom_labels, std::move(name));
}

IndividualId Store::add_individual(WorldId world,
                                   const std::vector<std::string>& atom_labels,
                                   std::string label) {
  return space_.model().add_individual(world, atom_labels, std::move(label));
}

IndividualId Store::add_individual(WorldId world, Extent extent,
                                   std::string label) {
  return space_.model().add_individual(world, std::move(extent),
                                       std::move(label));
}

IndividualId Store::intersect_individuals(std::span<const IndividualId> xs) {
  return space_.model().intersect_individuals(xs);
}

PossibilityId Store::define_possibility(std::string name,
                                        std::vector<IndividualId> members,
                                        bool functional) {
  return space_.define_possibility(std::move(name), std::move(members),
                                   functional);
}

PossibilityId Store::comoverlap_construct(std::span<const PossibilityId> s,
                                          std::string name) {
  return space_.comoverlap_construct(s, std::move(name));
}

// --- contexts ---------------------------------------------------------------

ContextId Store::ensure_context(std::string name, PossibilityId agent,
                                PossibilityId now,
                                std::optional<ContextId> parent, Epoch at,
                                bool derived) {
  PossibilityId actuality = space_.comoverlap_construct(
      std::array<PossibilityId, 2>{agent, now}, name + ".actuality",
      PossibilityOrigin::Actuality);
  ContextNode node;
  node.id = ContextId{static_cast<std::uint32_t>(contexts_.size())};
  node.name = std::move(name);
  node.agent = agent;
  node.now = now;
  node.parent = parent;
  node.actuality = actuality;
  node.candidates = space_.worlds_of(actuality);
  node.at = at;
  node.derived = derived;
  context_names_.emplace(node.name, node.id);
  contexts_.push_back(std::move(node));
  return contexts_.back().id;
}

ContextId Store::open_context(std::string name, PossibilityId agent,
                              PossibilityId now,
                              std::optional<ContextId> parent) {
  if (context_names_.count(name))
    throw Error(Errc::DuplicateName, "context '" + name + "' already exists");
  space_.possibility(agent);
  space_.possibility(now);
  if (parent) context(*parent);
  return ensure_context(std::move(name), agent, now, parent, clock_, false);
}

const ContextNode& Store::context(ContextId id) const {
  if (id.value >= contexts_.size())
    throw Error(Errc::UnknownContext, "unknown context handle");
  return contexts_[id.value];
}

std::optional<ContextId> Store::find_context(const std::string& name) const {
  auto it = context_names_.find(name);
  if (it == context_names_.end()) return std::nullopt;
  return it->second;
}

PossibilityId Store::resolve_poss(const std::string& name) const {
  auto p = space_.find_possibility(name);
  if (!p) throw Error(Errc::UnknownPossibility,
                      "unknown possibility '" + name + "'");
  return *p;
}

ContextId Store::resolve_ctx(const std::string& name) const {
  auto c = find_context(name);
  if (!c) throw Error(Errc::UnknownContext, "unknown context '" + name + "'");
  return *c;
}

std::string Store::nested_context_name(ContextId parent, PossibilityId speaker,
                                       Epoch at) const {
  return context(parent).name + "." + space_.possibility(speaker).name + "@e" +
         std::to_string(at.value);
}

// --- log bookkeeping --------------------------------------------------------

void Store::append_event(LogEvent ev) {
  log_.push_back(std::move(ev));
  reindex();
}

void Store::pop_event() {
  log_.pop_back();
  reindex();
}

std::vector<std::size_t> Store::sorted_event_order() const {
  std::vector<std::size_t> order(log_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (log_[a].epoch != log_[b].epoch)
                       return log_[a].epoch < log_[b].epoch;
                     return log_[a].branch < log_[b].branch;
                   });
  return order;
}

void Store::reindex() {
  // Pass 1 (log order): testimony records and their nested contexts.
  // Display numbering follows the log so it is stable under appends.
  testimonies_.clear();
  std::map<TestimonyKey, std::size_t> by_key;
  for (const LogEvent& ev : log_) {
    const auto* t = std::get_if<TestifyEvent>(&ev.payload);
    if (!t) continue;
    ContextId recv = resolve_ctx(t->context);
    PossibilityId speaker = resolve_poss(t->speaker);
    PossibilityId now = resolve_poss(t->now);
    PossibilityId poss = resolve_poss(t->possibility);
    std::string nested = nested_context_name(recv, speaker, ev.epoch);
    ContextId nested_id;
    if (auto existing = find_context(nested))
      nested_id = *existing;
    else
      nested_id = ensure_context(nested, speaker, now, recv, ev.epoch, true);
    TestimonyKey key{recv, speaker, ev.epoch, poss, t->status};
    if (by_key.count(key)) continue;  // identical re-testimony, one record
    TestimonyRecord rec;
    rec.number = static_cast<std::uint32_t>(testimonies_.size() + 1);
    rec.id = "t" + std::to_string(rec.number);
    rec.receiving_context = recv;
    rec.speaker = speaker;
    rec.at = ev.epoch;
    rec.possibility = poss;
    rec.status = t->status;
    rec.speaker_context = nested_id;
    by_key.emplace(key, testimonies_.size());
    testimonies_.push_back(std::move(rec));
  }

  // Pass 2 (replay order: epoch, then branch, then append order): constraint
  // chains with supersession, endorsement transitions, agent registry.
  constraints_.clear();
  agents_.clear();
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> live;
  auto push_constraint = [&](ContextId ctx, PossibilityId poss,
                             ModalStatus status, Epoch at,
                             PossibilityId owner) {
    auto key = std::make_pair(ctx.value, poss.value);
    auto it = live.find(key);
    if (it != live.end()) constraints_[it->second].superseded_at = at;
    live[key] = constraints_.size();
    constraints_.push_back(
        ConstraintRec{ctx, poss, status, at, std::nullopt, owner});
  };

  for (std::size_t idx : sorted_event_order()) {
    const LogEvent& ev = log_[idx];
    if (const auto* a = std::get_if<AssertEvent>(&ev.payload)) {
      ContextId ctx = resolve_ctx(a->context);
      push_constraint(ctx, resolve_poss(a->possibility), a->status, ev.epoch,
                      context(ctx).agent);
    } else if (const auto* r = std::get_if<RegisterEvent>(&ev.payload)) {
      ContextId ctx = resolve_ctx(r->context);
      PossibilityId agent = resolve_poss(r->agent);
      push_constraint(ctx, agent, r->status, ev.epoch, context(ctx).agent);
      agents_[{ctx.value, agent.value}] =
          AgentRecord{ctx, agent, r->status, ev.epoch};
    } else if (const auto* t = std::get_if<TestifyEvent>(&ev.payload)) {
      ContextId recv = resolve_ctx(t->context);
      PossibilityId speaker = resolve_poss(t->speaker);
      ContextId nested =
          resolve_ctx(nested_context_name(recv, speaker, ev.epoch));
      push_constraint(nested, resolve_poss(t->possibility), t->status,
                      ev.epoch, speaker);
    } else if (const auto* e = std::get_if<EndorseEvent>(&ev.payload)) {
      ContextId ctx = resolve_ctx(e->context);
      PossibilityId speaker = resolve_poss(e->speaker);
      PossibilityId poss = resolve_poss(e->possibility);
      TestimonyKey key{ctx, speaker, e->testified_at, poss, e->status};
      auto it = by_key.find(key);
      if (it == by_key.end())
        throw Error(Errc::UnknownTestimony,
                    "endorsement references unknown testimony in context '" +
                        e->context + "'");
      TestimonyRecord& rec = testimonies_[it->second];
      if (rec.endorsement == Endorsement::Recorded)
        rec.endorsement =
            e->reject ? Endorsement::Rejected : Endorsement::Endorsed;
      if (!e->reject)
        push_constraint(ctx, poss, e->status, ev.epoch, context(ctx).agent);
    }
  }
}

// --- doxastic operations ----------------------------------------------------

std::vector<ConstraintRec> Store::live_constraints(ContextId ctx,
                                                   Epoch at) const {
  context(ctx);
  std::vector<ConstraintRec> out;
  for (const ConstraintRec& c : constraints_) {
    if (c.context != ctx) continue;
    if (c.asserted_at > at) continue;
    if (c.superseded_at && *c.superseded_at <= at) continue;
    out.push_back(c);
  }
  return out;
}

std::vector<SolveInput> Store::solve_inputs(
    const std::vector<ConstraintRec>& live) const {
  std::vector<SolveInput> in;
  in.reserve(live.size());
  for (std::size_t i = 0; i < live.size(); ++i)
    in.push_back(SolveInput{space_.worlds_of(live[i].possibility),
                            live[i].status, i});
  return in;
}

ConflictReport Store::build_report(
    ContextId ctx, const std::vector<ConstraintRec>& live) const {
  auto inputs = solve_inputs(live);
  auto core = minimal_conflict_core(context(ctx).candidates, inputs);
  ConflictReport report;
  for (std::size_t tag : core) {
    const ConstraintRec& c = live[tag];
    report.conflicting.push_back(
        ConflictEntry{context(c.context).name,
                      space_.possibility(c.possibility).name, c.status,
                      c.asserted_at});
  }
  return report;
}

std::variant<DoxasticState, ConflictReport> Store::solve_worlds(
    ContextId ctx, Epoch at) const {
  const ContextNode& node = context(ctx);
  if (at > clock_)
    throw Error(Errc::EpochOutOfRange,
                "epoch " + std::to_string(at.value) + " is in the future");
  auto live = live_constraints(ctx, at);
  auto allowed = solve_allowed(node.candidates, solve_inputs(live));
  if (!allowed) return build_report(ctx, live);
  return DoxasticState{ctx, at, node.candidates, *allowed};
}

AssertOutcome Store::guarded_append(LogEvent ev, ContextId affected) {
  append_event(std::move(ev));
  auto solved = solve_worlds(affected, clock_);
  if (std::holds_alternative<ConflictReport>(solved)) {
    auto report = std::get<ConflictReport>(std::move(solved));
    pop_event();
    return AssertOutcome{std::move(report)};
  }
  return AssertOutcome{};
}

AssertOutcome Store::assert_status(ContextId ctx, PossibilityId p,
                                   ModalStatus status) {
  const std::string& ctx_name = context(ctx).name;
  const std::string& poss_name = space_.possibility(p).name;
  return guarded_append(
      LogEvent{clock_, branch_id_, AssertEvent{ctx_name, poss_name, status}},
      ctx);
}

ModalStatus Store::classify(ContextId ctx, PossibilityId p, Epoch at) const {
  auto solved = solve_worlds(ctx, at);
  if (std::holds_alternative<ConflictReport>(solved))
    throw InconsistencyError(
        Errc::InconsistentContext,
        "context '" + context(ctx).name + "' is inconsistent at epoch " +
            std::to_string(at.value),
        std::get<ConflictReport>(std::move(solved)));
  const WorldSet& allowed = std::get<DoxasticState>(solved).allowed;
  const WorldSet& worlds = space_.worlds_of(p);
  if (!allowed.overlaps(worlds)) return ModalStatus::Impossible;
  if (allowed.is_subset_of(worlds)) return ModalStatus::Necessary;
  return ModalStatus::Contingent;
}

QueryAnswer Store::query_possibly(ContextId ctx, PossibilityId p) const {
  ModalStatus status = classify(ctx, p, clock_);
  return QueryAnswer{status != ModalStatus::Impossible, status,
                     space_.possibility(context(ctx).agent).name, clock_};
}

std::vector<HistoryEntry> Store::history(ContextId ctx,
                                         PossibilityId p) const {
  context(ctx);
  space_.possibility(p);
  std::vector<HistoryEntry> out;
  for (const ConstraintRec& c : constraints_)
    if (c.context == ctx && c.possibility == p)
      out.push_back(HistoryEntry{c.status, c.asserted_at, c.superseded_at});
  return out;
}

bool Store::entails(PossibilityId q, PossibilityId p) const {
  return space_.entails(q, p);
}

Rational Store::credence_ratio(PossibilityId q, PossibilityId p, ContextId ctx,
                               Epoch at) const {
  auto solved = solve_worlds(ctx, at);
  if (std::holds_alternative<ConflictReport>(solved))
    throw InconsistencyError(
        Errc::InconsistentContext,
        "context '" + context(ctx).name + "' is inconsistent",
        std::get<ConflictReport>(std::move(solved)));
  const WorldSet& allowed = std::get<DoxasticState>(solved).allowed;
  auto num = WorldSet::intersect(allowed, space_.worlds_of(q)).size();
  auto den = WorldSet::intersect(allowed, space_.worlds_of(p)).size();
  if (den == 0)
    throw Error(Errc::ZeroDenominator,
                "'" + space_.possibility(p).name +
                    "' holds in no doxastically actual world");
  return Rational::of(static_cast<std::int64_t>(num),
                      static_cast<std::int64_t>(den));
}

OracleResult Store::oracle_solve_at(ContextId ctx, Epoch at,
                                    std::size_t max_candidates) const {
  const ContextNode& node = context(ctx);
  auto live = live_constraints(ctx, at);
  return oracle_solve(node.candidates, solve_inputs(live), max_candidates);
}

// --- testimony --------------------------------------------------------------

AgentRecord Store::register_agent(ContextId ctx, PossibilityId agent,
                                  ModalStatus existence) {
  const std::string& ctx_name = context(ctx).name;
  const std::string& agent_name = space_.possibility(agent).name;
  AssertOutcome outcome = guarded_append(
      LogEvent{clock_, branch_id_,
               RegisterEvent{ctx_name, agent_name, existence}},
      ctx);
  if (!outcome.accepted())
    throw InconsistencyError(Errc::ModallyInconsistent,
                             "agent '" + agent_name +
                                 "' cannot exist in any allowed world of '" +
                                 ctx_name + "'",
                             std::move(*outcome.conflict));
  return agents_.at({ctx.value, agent.value});
}

std::vector<AgentRecord> Store::agents(ContextId ctx) const {
  context(ctx);
  std::vector<AgentRecord> out;
  for (const auto& [key, rec] : agents_)
    if (key.first == ctx.value) out.push_back(rec);
  std::sort(out.begin(), out.end(),
            [&](const AgentRecord& a, const AgentRecord& b) {
              return space_.possibility(a.agent).name <
                     space_.possibility(b.agent).name;
            });
  return out;
}

TestimonyRecord Store::record_testimony(ContextId ctx, PossibilityId speaker,
                                        PossibilityId now, PossibilityId p,
                                        ModalStatus status) {
  const ContextNode& node = context(ctx);
  const std::string& speaker_name = space_.possibility(speaker).name;
  if (!agents_.count({ctx.value, speaker.value}))
    throw Error(Errc::UnregisteredSpeaker,
                "speaker '" + speaker_name + "' is not registered in '" +
                    node.name + "'");
  if (!space_.comoverlapable(std::array<PossibilityId, 2>{speaker, now}))
    throw Error(Errc::NotComoverlapable,
                "speaker '" + speaker_name + "' never coexists with '" +
                    space_.possibility(now).name + "'");

  LogEvent ev{clock_, branch_id_,
              TestifyEvent{node.name, speaker_name,
                           space_.possibility(now).name,
                           space_.possibility(p).name, status}};
  append_event(std::move(ev));
  ContextId nested = resolve_ctx(nested_context_name(ctx, speaker, clock_));
  auto solved = solve_worlds(nested, clock_);
  if (std::holds_alternative<ConflictReport>(solved)) {
    auto report = std::get<ConflictReport>(std::move(solved));
    pop_event();
    throw InconsistencyError(Errc::ModallyInconsistent,
                             "testimony is inconsistent within '" +
                                 space_.possibility(speaker).name +
                                 "''s own context",
                             std::move(report));
  }
  for (const TestimonyRecord& rec : testimonies_)
    if (rec.receiving_context == ctx && rec.speaker == speaker &&
        rec.at == clock_ && rec.possibility == p && rec.status == status)
      return rec;
  throw Error(Errc::UnknownTestimony, "testimony record not materialized");
}

std::optional<TestimonyRecord> Store::find_testimony(
    const std::string& id) const {
  for (const TestimonyRecord& rec : testimonies_)
    if (rec.id == id) return rec;
  return std::nullopt;
}

AssertOutcome Store::endorse(ContextId ctx, const std::string& testimony_id) {
  auto rec = find_testimony(testimony_id);
  if (!rec)
    throw Error(Errc::UnknownTestimony,
                "unknown testimony '" + testimony_id + "'");
  if (rec->receiving_context != ctx)
    throw Error(Errc::InvalidEndorsement,
                "testimony '" + testimony_id + "' was received in '" +
                    context(rec->receiving_context).name + "'");
  if (rec->endorsement != Endorsement::Recorded)
    throw Error(Errc::InvalidEndorsement,
                "testimony '" + testimony_id + "' is already " +
                    (rec->endorsement == Endorsement::Endorsed ? "endorsed"
                                                               : "rejected"));
  EndorseEvent ev{context(ctx).name, space_.possibility(rec->speaker).name,
                  rec->at, space_.possibility(rec->possibility).name,
                  rec->status, /*reject=*/false};
  return guarded_append(LogEvent{clock_, branch_id_, std::move(ev)}, ctx);
}

void Store::reject_testimony(ContextId ctx, const std::string& testimony_id) {
  auto rec = find_testimony(testimony_id);
  if (!rec)
    throw Error(Errc::UnknownTestimony,
                "unknown testimony '" + testimony_id + "'");
  if (rec->receiving_context != ctx)
    throw Error(Errc::InvalidEndorsement,
                "testimony '" + testimony_id + "' was received in '" +
                    context(rec->receiving_context).name + "'");
  if (rec->endorsement != Endorsement::Recorded)
    throw Error(Errc::InvalidEndorsement,
                "testimony '" + testimony_id + "' is already " +
                    (rec->endorsement == Endorsement::Endorsed ? "endorsed"
                                                               : "rejected"));
  EndorseEvent ev{context(ctx).name, space_.possibility(rec->speaker).name,
                  rec->at, space_.possibility(rec->possibility).name,
                  rec->status, /*reject=*/true};
  append_event(LogEvent{clock_, branch_id_, std::move(ev)});
}

ModalStatus Store::agent_belief(ContextId ctx, PossibilityId speaker, Epoch at,
                                PossibilityId p) const {
  context(ctx);
  auto nested = find_context(nested_context_name(ctx, speaker, at));
  if (!nested)
    throw Error(Errc::UnknownNestedContext,
                "no testimony context for '" +
                    space_.possibility(speaker).name + "' at epoch " +
                    std::to_string(at.value));
  return classify(*nested, p, at);
}

// --- identity: fork / merge -------------------------------------------------

std::optional<std::pair<std::string, ConflictReport>> Store::verify_consistent()
    const {
  for (const auto& [name, id] : context_names_) {
    auto solved = solve_worlds(id, clock_);
    if (std::holds_alternative<ConflictReport>(solved))
      return std::make_pair(name, std::get<ConflictReport>(std::move(solved)));
  }
  return std::nullopt;
}

std::pair<Store, Store> Store::fork() {
  if (auto bad = verify_consistent())
    throw Error(Errc::InconsistentStore,
                "cannot fork: context '" + bad->first + "' is inconsistent");
  auto child = [&](std::uint32_t index) {
    Store c = *this;
    Stage& last = c.stages_.back();
    last.open = false;
    last.log_end = c.log_.size();
    last.epoch_end = c.clock_.next();
    c.branch_id_ = branch_id_ + "." + std::to_string(index);
    c.fork_count_ = 0;
    c.clock_ = clock_.next();
    c.stages_.push_back(Stage{c.branch_id_ + "-s0", c.branch_id_, c.clock_,
                              Epoch{}, c.log_.size(), c.log_.size(), true});
    return c;
  };
  Store a = child(fork_count_);
  Store b = child(fork_count_ + 1);
  fork_count_ += 2;
  return {std::move(a), std::move(b)};
}

std::size_t Store::prefix_length(const Store& other) const {
  std::size_t n = std::min(stages_.size(), other.stages_.size());
  std::size_t k = 0;
  while (k < n) {
    const Stage& sa = stages_[k];
    const Stage& sb = other.stages_[k];
    if (sa.id != sb.id || sa.branch != sb.branch ||
        sa.epoch_begin != sb.epoch_begin)
      break;
    auto [ab, ae] = stage_events(sa, log_.size());
    auto [bb, be] = stage_events(sb, other.log_.size());
    if (ae - ab != be - bb) break;
    if (!std::equal(log_.begin() + static_cast<std::ptrdiff_t>(ab),
                    log_.begin() + static_cast<std::ptrdiff_t>(ae),
                    other.log_.begin() + static_cast<std::ptrdiff_t>(bb)))
      break;
    ++k;
  }
  return k;
}

void Store::check_definition_compat(const Store& a, const Store& b) {
  const Model& ma = a.model();
  const Model& mb = b.model();
  for (std::size_t wi = 0; wi < mb.world_count(); ++wi) {
    const World& wb = mb.world(WorldId{static_cast<std::uint32_t>(wi)});
    auto wa = ma.find_world(wb.name);
    if (!wa) continue;
    if (ma.world(*wa).atom_labels != wb.atom_labels)
      throw Error(Errc::IncompatibleStores,
                  "world '" + wb.name + "' differs between stores");
    for (IndividualId ib : wb.individuals) {
      const Individual& ind_b = mb.individual(ib);
      auto ia = ma.find_individual(*wa, ind_b.label);
      if (ia && ma.individual(*ia).extent != ind_b.extent)
        throw Error(Errc::IncompatibleStores,
                    "individual '" + ind_b.label + "' of world '" + wb.name +
                        "' differs between stores");
      // Same extent registered under another label is a collision too:
      // extents are identity, labels must agree.
      for (IndividualId ja : ma.world(*wa).individuals) {
        const Individual& ind_a = ma.individual(ja);
        if (ind_a.extent == ind_b.extent && ind_a.label != ind_b.label)
          throw Error(Errc::IncompatibleStores,
                      "one extent carries labels '" + ind_a.label + "' and '" +
                          ind_b.label + "' in world '" + wb.name + "'");
      }
    }
  }
  for (std::size_t pi = 0; pi < b.space().possibility_count(); ++pi) {
    const Possibility& pb =
        b.space().possibility(PossibilityId{static_cast<std::uint32_t>(pi)});
    auto pa_id = a.space().find_possibility(pb.name);
    if (!pa_id) continue;
    const Possibility& pa = a.space().possibility(*pa_id);
    auto member_keys = [](const ModalSpace& s,
                          const Possibility& p) {
      std::set<std::pair<std::string, std::string>> keys;
      for (IndividualId m : p.members) {
        const Individual& i = s.model().individual(m);
        keys.emplace(s.model().world(i.world).name, i.label);
      }
      return keys;
    };
    auto input_names = [](const ModalSpace& s, const Possibility& p) {
      std::vector<std::string> names;
      for (PossibilityId q : p.built_from)
        names.push_back(s.possibility(q).name);
      std::sort(names.begin(), names.end());
      return names;
    };
    if (pa.functional != pb.functional || pa.origin != pb.origin ||
        member_keys(a.space(), pa) != member_keys(b.space(), pb) ||
        input_names(a.space(), pa) != input_names(b.space(), pb))
      throw Error(Errc::IncompatibleStores,
                  "possibility '" + pb.name + "' differs between stores");
  }
  for (const ContextNode& cb : b.contexts_) {
    if (cb.derived) continue;
    auto ca_id = a.find_context(cb.name);
    if (!ca_id) continue;
    const ContextNode& ca = a.context(*ca_id);
    auto parent_name = [](const Store& s,
                          const std::optional<ContextId>& p) -> std::string {
      return p ? s.context(*p).name : "";
    };
    if (a.space().possibility(ca.agent).name !=
            b.space().possibility(cb.agent).name ||
        a.space().possibility(ca.now).name !=
            b.space().possibility(cb.now).name ||
        parent_name(a, ca.parent) != parent_name(b, cb.parent))
      throw Error(Errc::IncompatibleStores,
                  "context '" + cb.name + "' differs between stores");
  }
}

void Store::adopt_definitions_from(const Store& b) {
  const Model& mb = b.model();
  for (std::size_t wi = 0; wi < mb.world_count(); ++wi) {
    const World& wb = mb.world(WorldId{static_cast<std::uint32_t>(wi)});
    if (!model().find_world(wb.name)) add_world(wb.atom_labels, wb.name);
    WorldId here = *model().find_world(wb.name);
    for (IndividualId ib : wb.individuals) {
      const Individual& ind = mb.individual(ib);
      if (ib == wb.worm) continue;
      std::vector<std::string> labels;
      for (AtomIndex atom : ind.extent)
        labels.push_back(wb.atom_labels[atom]);
      if (!model().find_individual(here, ind.label))
        add_individual(here, labels, ind.label);
    }
  }
  for (std::size_t pi = 0; pi < b.space().possibility_count(); ++pi) {
    const Possibility& pb =
        b.space().possibility(PossibilityId{static_cast<std::uint32_t>(pi)});
    if (pb.origin == PossibilityOrigin::Actuality) continue;  // re-derived
    if (space_.find_possibility(pb.name)) continue;
    if (pb.origin == PossibilityOrigin::Constructed) {
      std::vector<PossibilityId> inputs;
      for (PossibilityId q : pb.built_from)
        inputs.push_back(resolve_poss(b.space().possibility(q).name));
      comoverlap_construct(inputs, pb.name);
    } else {
      std::vector<IndividualId> members;
      for (IndividualId m : pb.members) {
        const Individual& i = mb.individual(m);
        members.push_back(
            *model().find_individual(*model().find_world(mb.world(i.world).name),
                                     i.label));
      }
      define_possibility(pb.name, std::move(members), pb.functional);
    }
  }
  for (const ContextNode& cb : b.contexts_) {
    if (cb.derived || find_context(cb.name)) continue;
    std::optional<ContextId> parent;
    if (cb.parent) parent = resolve_ctx(b.context(*cb.parent).name);
    open_context(cb.name, resolve_poss(b.space().possibility(cb.agent).name),
                 resolve_poss(b.space().possibility(cb.now).name), parent);
  }
}

std::variant<Store, ConflictReport> Store::merge(const Store& a,
                                                 const Store& b) {
  const Store& lo = a.branch_id_ <= b.branch_id_ ? a : b;
  const Store& hi = a.branch_id_ <= b.branch_id_ ? b : a;

  std::size_t plen = lo.prefix_length(hi);
  if (plen == 0)
    throw Error(Errc::DisjointLineages, "stores share no lineage prefix");
  for (std::size_t i = plen; i < lo.stages_.size(); ++i)
    for (std::size_t j = plen; j < hi.stages_.size(); ++j)
      if (lo.stages_[i].id == hi.stages_[j].id)
        throw Error(Errc::DisjointLineages,
                    "stores diverge inside shared stage '" +
                        lo.stages_[i].id + "'; merge needs fork-sealed "
                        "lineages");
  check_definition_compat(lo, hi);
  check_definition_compat(hi, lo);

  // Jointly satisfiable per context: the union of both branches' live
  // constraints must admit a nonempty doxastically-actual set.
  std::set<std::string> names;
  for (const auto& [name, id] : lo.context_names_) names.insert(name);
  for (const auto& [name, id] : hi.context_names_) names.insert(name);
  for (const std::string& name : names) {
    struct Item {
      std::string poss;
      ModalStatus status;
      Epoch at;
      WorldSet worlds;
    };
    std::vector<Item> items;
    auto collect = [&](const Store& s) {
      auto id = s.find_context(name);
      if (!id) return;
      for (const ConstraintRec& c : s.live_constraints(*id, s.clock_)) {
        Item item{s.space().possibility(c.possibility).name, c.status,
                  c.asserted_at, s.space().worlds_of(c.possibility)};
        bool dup = false;
        for (const Item& seen : items)
          dup = dup || (seen.poss == item.poss && seen.status == item.status &&
                        seen.at == item.at);
        if (!dup) items.push_back(std::move(item));
      }
    };
    collect(lo);
    collect(hi);
    if (items.empty()) continue;
    const Store& holder = lo.find_context(name) ? lo : hi;
    const WorldSet& candidates =
        holder.context(*holder.find_context(name)).candidates;
    std::vector<SolveInput> inputs;
    for (std::size_t i = 0; i < items.size(); ++i)
      inputs.push_back(SolveInput{items[i].worlds, items[i].status, i});
    if (!solve_allowed(candidates, inputs)) {
      ConflictReport report;
      for (std::size_t tag : minimal_conflict_core(candidates, inputs))
        report.conflicting.push_back(ConflictEntry{
            name, items[tag].poss, items[tag].status, items[tag].at});
      return report;
    }
  }

  std::size_t prefix_events = 0;
  for (std::size_t i = 0; i < plen; ++i) {
    auto [begin, end] = stage_events(hi.stages_[i], hi.log_.size());
    prefix_events += end - begin;
  }

  Store merged = lo;
  merged.adopt_definitions_from(hi);
  Stage& last = merged.stages_.back();
  if (last.open) {
    last.open = false;
    last.log_end = merged.log_.size();
    last.epoch_end = merged.clock_.next();
  }
  std::size_t shift = merged.log_.size() - prefix_events;
  for (std::size_t i = plen; i < hi.stages_.size(); ++i) {
    Stage s = hi.stages_[i];
    auto [begin, end] = stage_events(s, hi.log_.size());
    merged.log_.insert(merged.log_.end(),
                       hi.log_.begin() + static_cast<std::ptrdiff_t>(begin),
                       hi.log_.begin() + static_cast<std::ptrdiff_t>(end));
    s.log_begin = begin + shift;
    s.log_end = end + shift;
    if (s.open) s.epoch_end = hi.clock_.next();
    s.open = false;
    merged.stages_.push_back(std::move(s));
  }

  merged.branch_id_ = "m-" + lo.branch_id_ + "-" + hi.branch_id_;
  merged.fork_count_ = 0;
  merged.clock_ = std::max(lo.clock_, hi.clock_).next();
  merged.stages_.push_back(Stage{merged.branch_id_ + "-s0", merged.branch_id_,
                                 merged.clock_, Epoch{}, merged.log_.size(),
                                 merged.log_.size(), true});
  merged.reindex();
  return merged;
}

// --- replay hooks -----------------------------------------------------------

void Store::set_branch(const std::string& id, std::uint32_t fork_count) {
  if (!log_.empty() || stages_.size() != 1)
    throw Error(Errc::IncompatibleStores,
                "branch header after log events");
  branch_id_ = id;
  fork_count_ = fork_count;
  stages_[0].id = id + "-s0";
  stages_[0].branch = id;
}

void Store::begin_stage(const std::string& id, const std::string& branch,
                        Epoch from) {
  bool pristine = stages_.size() == 1 && log_.empty() &&
                  clock_ == stages_[0].epoch_begin;
  if (pristine) {
    stages_[0] = Stage{id, branch, from, Epoch{}, 0, 0, true};
  } else {
    Stage& last = stages_.back();
    last.open = false;
    last.log_end = log_.size();
    last.epoch_end = clock_.next();
    stages_.push_back(
        Stage{id, branch, from, Epoch{}, log_.size(), log_.size(), true});
  }
  clock_ = from;
}

void Store::record_assert(const std::string& ctx, const std::string& poss,
                          ModalStatus status) {
  resolve_ctx(ctx);
  resolve_poss(poss);
  append_event(LogEvent{clock_, stages_.back().branch,
                        AssertEvent{ctx, poss, status}});
}

void Store::record_register(const std::string& ctx, const std::string& agent,
                            ModalStatus status) {
  resolve_ctx(ctx);
  resolve_poss(agent);
  append_event(LogEvent{clock_, stages_.back().branch,
                        RegisterEvent{ctx, agent, status}});
}

void Store::record_testify(const std::string& ctx, const std::string& speaker,
                           const std::string& now, const std::string& poss,
                           ModalStatus status) {
  resolve_ctx(ctx);
  resolve_poss(speaker);
  resolve_poss(now);
  resolve_poss(poss);
  append_event(LogEvent{clock_, stages_.back().branch,
                        TestifyEvent{ctx, speaker, now, poss, status}});
}

void Store::record_endorse(const EndorseEvent& ev) {
  resolve_ctx(ev.context);
  resolve_poss(ev.speaker);
  resolve_poss(ev.possibility);
  append_event(LogEvent{clock_, stages_.back().branch, ev});
}

}  // namespace pkb
