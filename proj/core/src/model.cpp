#include "pkb/model.hpp"

#include <set>

namespace pkb {

namespace {

std::string world_tag(const std::string& name) { return name + ".all"; }

}  // namespace

WorldId Model::add_world(const std::vector<std::string>& atom_labels,
                         std::string name) {
  if (atom_labels.empty())
    throw Error(Errc::EmptyWorld, "a world needs at least one atom");
  std::set<std::string> seen;
  for (const auto& label : atom_labels) {
    if (!seen.insert(label).second)
      throw Error(Errc::DuplicateLabel, "duplicate atom label '" + label + "'");
  }
  if (name.empty()) name = fresh_world_name();
  if (world_names_.count(name))
    throw Error(Errc::DuplicateName, "world '" + name + "' already exists");

  WorldId id{static_cast<std::uint32_t>(worlds_.size())};
  World w;
  w.id = id;
  w.name = name;
  w.atom_labels.assign(seen.begin(), seen.end());  // sorted for determinism
  worlds_.push_back(std::move(w));
  world_names_.emplace(name, id);
  by_extent_.emplace_back();
  by_label_.emplace_back();
  auto& atoms = atom_index_.emplace_back();
  for (AtomIndex i = 0; i < worlds_.back().atom_labels.size(); ++i)
    atoms.emplace(worlds_.back().atom_labels[i], i);

  std::vector<AtomIndex> all(worlds_.back().atom_labels.size());
  for (AtomIndex i = 0; i < all.size(); ++i) all[i] = i;
  worlds_.back().worm = add_individual(id, Extent(all), world_tag(name));
  return id;
}

IndividualId Model::add_individual(WorldId world, Extent extent,
                                   std::string label) {
  if (world.value >= worlds_.size())
    throw Error(Errc::UnknownWorld, "unknown world handle");
  if (extent.empty())
    throw Error(Errc::EmptyExtent, "an individual needs a nonempty extent");
  World& w = worlds_[world.value];
  for (AtomIndex a : extent) {
    if (a >= w.atom_labels.size())
      throw Error(Errc::AtomOutsideWorld,
                  "extent atom outside world '" + w.name + "'");
  }
  auto hit = by_extent_[world.value].find(extent);
  if (hit != by_extent_[world.value].end()) return hit->second;

  if (label.empty()) label = fresh_individual_label(w);
  if (by_label_[world.value].count(label))
    throw Error(Errc::DuplicateLabel, "individual '" + label +
                                          "' already exists in world '" +
                                          w.name + "'");

  IndividualId id{static_cast<std::uint32_t>(individuals_.size())};
  individuals_.push_back(Individual{id, world, std::move(extent), label});
  w.individuals.push_back(id);
  by_extent_[world.value].emplace(individuals_.back().extent, id);
  by_label_[world.value].emplace(label, id);
  return id;
}

IndividualId Model::add_individual(WorldId world,
                                   const std::vector<std::string>& atom_labels,
                                   std::string label) {
  return add_individual(world, extent_of(world, atom_labels),
                        std::move(label));
}

bool Model::part_of(IndividualId x, IndividualId y) const {
  const Individual& a = individual(x);
  const Individual& b = individual(y);
  if (a.world != b.world)
    throw Error(Errc::CrossWorldMereology,
                "part_of crosses worlds; mereology is intra-world");
  return a.extent.is_subset_of(b.extent);
}

bool Model::overlap(IndividualId x, IndividualId y) const {
  const Individual& a = individual(x);
  const Individual& b = individual(y);
  if (a.world != b.world)
    throw Error(Errc::CrossWorldMereology,
                "overlap crosses worlds; mereology is intra-world");
  return a.extent.overlaps(b.extent);
}

IndividualId Model::intersect_individuals(std::span<const IndividualId> xs) {
  if (xs.empty())
    throw Error(Errc::EmptyExtent, "intersection of no individuals");
  const Individual& first = individual(xs.front());
  Extent common = first.extent;
  for (const IndividualId x : xs) {
    const Individual& i = individual(x);
    if (i.world != first.world)
      throw Error(Errc::CrossWorldMereology,
                  "intersection crosses worlds; mereology is intra-world");
    common = Extent::intersect(common, i.extent);
  }
  if (common.empty())
    throw Error(Errc::NoCommonPart, "individuals share no common part");
  return add_individual(first.world, std::move(common));
}

const World& Model::world(WorldId id) const {
  if (id.value >= worlds_.size())
    throw Error(Errc::UnknownWorld, "unknown world handle");
  return worlds_[id.value];
}

const Individual& Model::individual(IndividualId id) const {
  if (id.value >= individuals_.size())
    throw Error(Errc::UnknownIndividual, "unknown individual handle");
  return individuals_[id.value];
}

WorldSet Model::all_worlds() const {
  std::vector<WorldId> ids(worlds_.size());
  for (std::uint32_t i = 0; i < ids.size(); ++i) ids[i] = WorldId{i};
  return WorldSet(std::move(ids));
}

std::optional<WorldId> Model::find_world(const std::string& name) const {
  auto it = world_names_.find(name);
  if (it == world_names_.end()) return std::nullopt;
  return it->second;
}

std::optional<IndividualId> Model::find_individual(
    WorldId world, const std::string& label) const {
  if (world.value >= worlds_.size()) return std::nullopt;
  auto it = by_label_[world.value].find(label);
  if (it == by_label_[world.value].end()) return std::nullopt;
  return it->second;
}

std::optional<AtomIndex> Model::find_atom(WorldId world,
                                          const std::string& label) const {
  if (world.value >= worlds_.size()) return std::nullopt;
  auto it = atom_index_[world.value].find(label);
  if (it == atom_index_[world.value].end()) return std::nullopt;
  return it->second;
}

Extent Model::extent_of(WorldId world,
                        const std::vector<std::string>& atom_labels) const {
  if (world.value >= worlds_.size())
    throw Error(Errc::UnknownWorld, "unknown world handle");
  std::vector<AtomIndex> atoms;
  atoms.reserve(atom_labels.size());
  for (const auto& label : atom_labels) {
    auto a = find_atom(world, label);
    if (!a)
      throw Error(Errc::AtomOutsideWorld,
                  "atom '" + label + "' is not in world '" +
                      worlds_[world.value].name + "'");
    atoms.push_back(*a);
  }
  return Extent(std::move(atoms));
}

std::string Model::fresh_world_name() const {
  std::size_t n = worlds_.size() + 1;
  while (world_names_.count("w" + std::to_string(n))) ++n;
  return "w" + std::to_string(n);
}

std::string Model::fresh_individual_label(const World& w) const {
  std::size_t n = w.individuals.size();
  std::string label;
  do {
    label = w.name + ".i" + std::to_string(n++);
  } while (by_label_[w.id.value].count(label));
  return label;
}

bool operator==(const Model& a, const Model& b) {
  if (a.worlds_.size() != b.worlds_.size() ||
      a.individuals_.size() != b.individuals_.size())
    return false;
  for (std::size_t i = 0; i < a.worlds_.size(); ++i) {
    if (a.worlds_[i].name != b.worlds_[i].name ||
        a.worlds_[i].atom_labels != b.worlds_[i].atom_labels)
      return false;
  }
  for (std::size_t i = 0; i < a.individuals_.size(); ++i) {
    const Individual& x = a.individuals_[i];
    const Individual& y = b.individuals_[i];
    if (x.world != y.world || x.extent != y.extent || x.label != y.label)
      return false;
  }
  return true;
}

}  // namespace pkb
