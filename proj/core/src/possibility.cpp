#include "pkb/possibility.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "pkb/error.hpp"

namespace pkb {

PossibilityId ModalSpace::define_possibility(std::string name,
                                             std::vector<IndividualId> members,
                                             bool functional,
                                             PossibilityOrigin origin) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.empty())
    throw Error(Errc::EmptyPossibility, "a possibility needs members");

  std::vector<WorldId> worlds;
  std::set<WorldId> seen;
  for (IndividualId m : members) {
    const Individual& ind = model_.individual(m);  // validates the handle
    worlds.push_back(ind.world);
    if (!seen.insert(ind.world).second && functional)
      throw Error(Errc::FunctionalViolation,
                  "functional possibility with two members in world '" +
                      model_.world(ind.world).name + "'");
  }
  if (name.empty()) {
    std::size_t n = possibilities_.size() + 1;
    while (names_.count("p" + std::to_string(n))) ++n;
    name = "p" + std::to_string(n);
  }
  if (names_.count(name))
    throw Error(Errc::DuplicateName,
                "possibility '" + name + "' already exists");

  PossibilityId id{static_cast<std::uint32_t>(possibilities_.size())};
  Possibility p;
  p.id = id;
  p.name = std::move(name);
  p.members = std::move(members);
  p.functional = functional;
  p.worlds = WorldSet(std::move(worlds));
  p.origin = origin;
  names_.emplace(p.name, id);
  possibilities_.push_back(std::move(p));
  return id;
}

const WorldSet& ModalSpace::worlds_of(PossibilityId p) const {
  return possibility(p).worlds;
}

const Possibility& ModalSpace::possibility(PossibilityId p) const {
  if (p.value >= possibilities_.size())
    throw Error(Errc::UnknownPossibility, "unknown possibility handle");
  return possibilities_[p.value];
}

std::optional<PossibilityId> ModalSpace::find_possibility(
    const std::string& name) const {
  auto it = names_.find(name);
  if (it == names_.end()) return std::nullopt;
  return it->second;
}

std::vector<PossibilityId> ModalSpace::check_set(
    std::span<const PossibilityId> s) const {
  if (s.empty())
    throw Error(Errc::EmptySet, "empty set of possibilities");
  std::vector<PossibilityId> ids(s.begin(), s.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (PossibilityId p : ids) possibility(p);
  return ids;
}

SetModalStatus ModalSpace::modal_status_of_set(
    std::span<const PossibilityId> s) const {
  auto ids = check_set(s);
  WorldSet joint = worlds_of(ids.front());
  for (PossibilityId p : ids) joint = WorldSet::intersect(joint, worlds_of(p));
  if (joint.empty()) return SetModalStatus::Impossible;
  if (joint.size() == model_.world_count()) return SetModalStatus::Comnecessary;
  return SetModalStatus::Comcontingent;
}

std::vector<std::vector<IndividualId>> ModalSpace::members_in_world(
    std::span<const PossibilityId> s, WorldId w) const {
  std::vector<std::vector<IndividualId>> out;
  out.reserve(s.size());
  for (PossibilityId p : s) {
    std::vector<IndividualId> ms;
    for (IndividualId m : possibility(p).members)
      if (model_.individual(m).world == w) ms.push_back(m);
    out.push_back(std::move(ms));
  }
  return out;
}

namespace {

// Walks every selection of one member per slot, calling fn with the picked
// row. Stops early when fn returns false.
bool for_each_selection(
    const std::vector<std::vector<IndividualId>>& slots,
    const std::function<bool(const std::vector<IndividualId>&)>& fn) {
  std::vector<std::size_t> pick(slots.size(), 0);
  std::vector<IndividualId> row(slots.size());
  while (true) {
    for (std::size_t i = 0; i < slots.size(); ++i) row[i] = slots[i][pick[i]];
    if (!fn(row)) return false;
    std::size_t i = slots.size();
    while (i > 0) {
      --i;
      if (++pick[i] < slots[i].size()) break;
      pick[i] = 0;
      if (i == 0) return true;
    }
  }
}

}  // namespace

bool ModalSpace::comoverlapable(std::span<const PossibilityId> s) const {
  auto ids = check_set(s);
  WorldSet joint = worlds_of(ids.front());
  for (PossibilityId p : ids) joint = WorldSet::intersect(joint, worlds_of(p));
  for (WorldId w : joint) {
    auto slots = members_in_world(ids, w);
    bool found = !for_each_selection(
        slots, [&](const std::vector<IndividualId>& row) {
          Extent common = model_.individual(row.front()).extent;
          for (IndividualId m : row)
            common = Extent::intersect(common, model_.individual(m).extent);
          return common.empty();  // keep going while empty
        });
    if (found) return true;
  }
  return false;
}

PossibilityId ModalSpace::comoverlap_construct(std::span<const PossibilityId> s,
                                               std::string name,
                                               PossibilityOrigin origin) {
  auto ids = check_set(s);
  if (!comoverlapable(ids))
    throw Error(Errc::NotComoverlapable,
                "possibilities never jointly overlap; nothing to construct");

  WorldSet joint = worlds_of(ids.front());
  for (PossibilityId p : ids) joint = WorldSet::intersect(joint, worlds_of(p));

  std::vector<IndividualId> members;
  for (WorldId w : joint) {
    auto slots = members_in_world(ids, w);
    for_each_selection(slots, [&](const std::vector<IndividualId>& row) {
      Extent common = model_.individual(row.front()).extent;
      for (IndividualId m : row)
        common = Extent::intersect(common, model_.individual(m).extent);
      if (!common.empty())
        members.push_back(model_.add_individual(w, std::move(common)));
      return true;
    });
  }

  // Idempotent for a repeated (name, inputs) construction, which is what
  // replaying a `construct` statement does.
  if (auto existing = find_possibility(name)) {
    const Possibility& p = possibility(*existing);
    std::vector<IndividualId> sorted = members;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (p.built_from == ids && p.members == sorted) return *existing;
    throw Error(Errc::DuplicateName,
                "possibility '" + name + "' already exists");
  }

  PossibilityId id = define_possibility(std::move(name), std::move(members),
                                        /*functional=*/false, origin);
  possibilities_[id.value].built_from = ids;
  // The flag records what actually holds for the constructed members.
  const Possibility& p = possibilities_[id.value];
  std::set<WorldId> seen;
  bool functional = true;
  for (IndividualId m : p.members)
    if (!seen.insert(model_.individual(m).world).second) functional = false;
  possibilities_[id.value].functional = functional;
  return id;
}

DeDictoStatus ModalSpace::de_dicto_relate(PossibilityId p,
                                          PossibilityId q) const {
  const Possibility& a = possibility(p);
  const Possibility& b = possibility(q);
  IndexSet<IndividualId> ma(a.members);
  IndexSet<IndividualId> mb(b.members);
  if (!ma.overlaps(mb)) return DeDictoStatus::Impossible;
  if (ma.is_subset_of(mb)) return DeDictoStatus::Necessarily;
  return DeDictoStatus::ContingentlyPossible;
}

bool ModalSpace::entails(PossibilityId q, PossibilityId p) const {
  const Possibility& a = possibility(q);
  const Possibility& b = possibility(p);
  if (!a.worlds.is_subset_of(b.worlds)) return false;
  for (IndividualId m : a.members) {
    const Individual& mi = model_.individual(m);
    bool overlapped = false;
    for (IndividualId n : b.members) {
      const Individual& ni = model_.individual(n);
      if (ni.world == mi.world && mi.extent.overlaps(ni.extent)) {
        overlapped = true;
        break;
      }
    }
    if (!overlapped) return false;
  }
  return true;
}

}  // namespace pkb
