#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pkb/dsl.hpp"

namespace pkb::dsl {

namespace {

// Stable dependency order with a lexicographic tiebreak, so construct and
// context statements always parse declare-before-use.
std::vector<std::string> topo_sorted(
    const std::map<std::string, std::vector<std::string>>& deps) {
  std::map<std::string, std::size_t> pending;
  for (const auto& [name, ds] : deps) {
    std::size_t n = 0;
    for (const auto& d : ds)
      if (deps.count(d)) ++n;
    pending[name] = n;
  }
  std::vector<std::string> out;
  while (out.size() < deps.size()) {
    std::string next;
    for (const auto& [name, n] : pending)
      if (n == 0) {
        next = name;
        break;
      }
    out.push_back(next);
    pending.erase(next);
    for (auto& [name, n] : pending) {
      for (const auto& d : deps.at(name))
        if (d == next) --n;
    }
  }
  return out;
}

std::string member_ref(const Model& m, IndividualId id) {
  const Individual& ind = m.individual(id);
  return ind.label + "@" + m.world(ind.world).name;
}

void emit_epochs(std::ostringstream& out, Epoch& clock, Epoch target) {
  while (clock < target) {
    out << "epoch\n";
    clock = clock.next();
  }
}

std::string testimony_display_id(const Store& store, const EndorseEvent& ev) {
  ContextId ctx = *store.find_context(ev.context);
  PossibilityId speaker = *store.space().find_possibility(ev.speaker);
  PossibilityId poss = *store.space().find_possibility(ev.possibility);
  for (const TestimonyRecord& rec : store.testimonies()) {
    if (rec.receiving_context == ctx && rec.speaker == speaker &&
        rec.at == ev.testified_at && rec.possibility == poss &&
        rec.status == ev.status)
      return rec.id;
  }
  throw Error(Errc::UnknownTestimony, "dangling endorsement in log");
}

}  // namespace

std::string serialize(const Store& store) {
  const Model& m = store.model();
  const ModalSpace& space = store.space();
  std::ostringstream out;

  out << "pkb 1\n";
  out << "branch " << store.branch_id() << " forks " << store.fork_count()
      << "\n";

  std::map<std::string, WorldId> worlds;
  for (std::size_t i = 0; i < m.world_count(); ++i) {
    WorldId id{static_cast<std::uint32_t>(i)};
    worlds.emplace(m.world(id).name, id);
  }
  for (const auto& [name, id] : worlds) {
    out << "world " << name << " {";
    for (const auto& atom : m.world(id).atom_labels) out << " " << atom;
    out << " }\n";
  }

  std::map<std::pair<std::string, std::string>, IndividualId> inds;
  for (const auto& [wname, wid] : worlds) {
    const World& w = m.world(wid);
    for (IndividualId id : w.individuals)
      if (id != w.worm) inds.emplace(std::make_pair(wname, m.individual(id).label), id);
  }
  for (const auto& [key, id] : inds) {
    const Individual& ind = m.individual(id);
    const World& w = m.world(ind.world);
    out << "ind " << key.first << " " << key.second << " {";
    for (AtomIndex a : ind.extent) out << " " << w.atom_labels[a];
    out << " }\n";
  }

  std::map<std::string, PossibilityId> user_poss;
  std::map<std::string, PossibilityId> constructed;
  for (std::size_t i = 0; i < space.possibility_count(); ++i) {
    PossibilityId id{static_cast<std::uint32_t>(i)};
    const Possibility& p = space.possibility(id);
    if (p.origin == PossibilityOrigin::User)
      user_poss.emplace(p.name, id);
    else if (p.origin == PossibilityOrigin::Constructed)
      constructed.emplace(p.name, id);
    // Actuality possibilities re-derive when their context reopens.
  }
  for (const auto& [name, id] : user_poss) {
    const Possibility& p = space.possibility(id);
    out << "poss " << name << (p.functional ? " functional" : "") << " {";
    std::vector<std::string> refs;
    for (IndividualId mid : p.members) refs.push_back(member_ref(m, mid));
    std::sort(refs.begin(), refs.end(),
              [&](const std::string& a, const std::string& b) {
                auto key = [](const std::string& s) {
                  auto at = s.find('@');
                  return std::make_pair(s.substr(at + 1), s.substr(0, at));
                };
                return key(a) < key(b);
              });
    for (const auto& ref : refs) out << " " << ref;
    out << " }\n";
  }

  std::map<std::string, std::vector<std::string>> construct_deps;
  for (const auto& [name, id] : constructed) {
    std::vector<std::string> inputs;
    for (PossibilityId q : space.possibility(id).built_from)
      inputs.push_back(space.possibility(q).name);
    std::sort(inputs.begin(), inputs.end());
    construct_deps.emplace(name, std::move(inputs));
  }
  for (const auto& name : topo_sorted(construct_deps)) {
    out << "construct " << name << " = comoverlap(";
    const auto& inputs = construct_deps.at(name);
    for (std::size_t i = 0; i < inputs.size(); ++i)
      out << (i ? ", " : "") << inputs[i];
    out << ")\n";
  }

  std::map<std::string, std::vector<std::string>> context_deps;
  for (const ContextNode& c : store.contexts()) {
    if (c.derived) continue;
    std::vector<std::string> parent;
    if (c.parent) parent.push_back(store.context(*c.parent).name);
    context_deps.emplace(c.name, std::move(parent));
  }
  for (const auto& name : topo_sorted(context_deps)) {
    const ContextNode& c = store.context(*store.find_context(name));
    out << "context " << name << " = ctx("
        << space.possibility(c.agent).name << ", "
        << space.possibility(c.now).name;
    if (c.parent) out << ", parent=" << store.context(*c.parent).name;
    out << ")\n";
  }

  const auto& stages = store.lineage();
  const auto& log = store.log();
  bool need_stages = !log.empty() || stages.size() > 1 ||
                     store.epoch() > Epoch{0};
  if (!need_stages) return out.str();

  for (std::size_t si = 0; si < stages.size(); ++si) {
    const Stage& s = stages[si];
    out << "stage " << s.id << " " << s.branch << " " << s.epoch_begin.value
        << "\n";
    Epoch clock = s.epoch_begin;
    std::size_t end = s.open ? log.size() : s.log_end;
    for (std::size_t i = s.log_begin; i < end; ++i) {
      const LogEvent& ev = log[i];
      emit_epochs(out, clock, ev.epoch);
      if (const auto* a = std::get_if<AssertEvent>(&ev.payload)) {
        out << "assert " << a->context << " " << to_string(a->status) << " "
            << a->possibility << "\n";
      } else if (const auto* r = std::get_if<RegisterEvent>(&ev.payload)) {
        out << "agent " << r->context << " " << to_string(r->status) << " "
            << r->agent << "\n";
      } else if (const auto* t = std::get_if<TestifyEvent>(&ev.payload)) {
        out << "testify " << t->context << " " << t->speaker << " @"
            << t->now << " " << to_string(t->status) << " " << t->possibility
            << "\n";
      } else if (const auto* e = std::get_if<EndorseEvent>(&ev.payload)) {
        out << (e->reject ? "reject " : "endorse ") << e->context << " "
            << testimony_display_id(store, *e) << "\n";
      }
    }
    Epoch target = s.open ? store.epoch()
                          : Epoch{s.epoch_end.value == 0 ? clock.value
                                                         : s.epoch_end.value - 1};
    emit_epochs(out, clock, target);
  }
  return out.str();
}

Store load_store_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ExecResult result;
    result.exit_code = 1;
    result.diagnostics.push_back(
        Diagnostic{0, 0, "cannot open '" + path.string() + "'", ""});
    throw LoadError(std::move(result));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  auto parsed = parse_script(buffer.str());
  if (!parsed.ok()) {
    ExecResult result;
    result.exit_code = 1;
    result.diagnostics = std::move(parsed.diagnostics);
    throw LoadError(std::move(result));
  }
  Store store;
  ExecOptions opts;
  opts.base_dir = path.parent_path();
  ExecResult result = execute(store, *parsed.script, opts);
  if (!result.ok()) throw LoadError(std::move(result));
  return store;
}

void save_store_file(const Store& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    ExecResult result;
    result.exit_code = 1;
    result.diagnostics.push_back(
        Diagnostic{0, 0, "cannot write '" + path.string() + "'", ""});
    throw LoadError(std::move(result));
  }
  out << serialize(store);
}

}  // namespace pkb::dsl
