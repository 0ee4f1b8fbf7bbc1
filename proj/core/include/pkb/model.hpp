#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pkb/error.hpp"
#include "pkb/ids.hpp"
#include "pkb/index_set.hpp"

namespace pkb {

/// An individual's spatiotemporal extent: the set of atoms (minimal cells)
/// of its world that it occupies. Identity is extensional — one individual
/// per distinct extent per world.
using Extent = IndexSet<AtomIndex>;
using WorldSet = IndexSet<WorldId>;

struct Individual {
  IndividualId id;
  WorldId world;
  Extent extent;
  std::string label;  // unique within the world; auto-assigned if omitted
};

struct World {
  WorldId id;
  std::string name;
  std::vector<std::string> atom_labels;  // AtomIndex -> label
  std::vector<IndividualId> individuals;
  IndividualId worm;  // the maximal individual covering all atoms
};

/// A finite pluriverse: self-contained worlds of atoms plus their
/// individuals. Worlds never share atoms; all mereology is intra-world.
/// Trans-world structure lives one layer up, in possibilities.
class Model {
 public:
  /// Creates a world from distinct atom labels and auto-creates its
  /// world-worm individual (extent = all atoms).
  WorldId add_world(const std::vector<std::string>& atom_labels,
                    std::string name = "");

  /// Registers an individual by extent. Returns the existing id when an
  /// individual with an identical extent already exists (extensional
  /// dedupe); a label passed for a deduped extent is ignored.
  IndividualId add_individual(WorldId world, Extent extent,
                              std::string label = "");
  IndividualId add_individual(WorldId world,
                              const std::vector<std::string>& atom_labels,
                              std::string label = "");

  /// Subset of extents. Both individuals must inhabit the same world.
  bool part_of(IndividualId x, IndividualId y) const;

  /// Nonempty intersection of extents. Same-world only.
  bool overlap(IndividualId x, IndividualId y) const;

  /// Returns (materializing if absent) the individual whose extent is the
  /// common intersection of the given same-world individuals.
  IndividualId intersect_individuals(std::span<const IndividualId> xs);

  const World& world(WorldId id) const;
  const Individual& individual(IndividualId id) const;
  std::size_t world_count() const { return worlds_.size(); }
  std::size_t individual_count() const { return individuals_.size(); }
  WorldSet all_worlds() const;

  std::optional<WorldId> find_world(const std::string& name) const;
  std::optional<IndividualId> find_individual(WorldId world,
                                              const std::string& label) const;
  std::optional<AtomIndex> find_atom(WorldId world,
                                     const std::string& label) const;

  /// Extent from atom labels of `world`; throws AtomOutsideWorld on a label
  /// the world does not contain.
  Extent extent_of(WorldId world,
                   const std::vector<std::string>& atom_labels) const;

  friend bool operator==(const Model&, const Model&);

 private:
  std::string fresh_world_name() const;
  std::string fresh_individual_label(const World& w) const;

  std::vector<World> worlds_;
  std::vector<Individual> individuals_;
  std::map<std::string, WorldId> world_names_;
  std::vector<std::map<Extent, IndividualId>> by_extent_;       // per world
  std::vector<std::map<std::string, IndividualId>> by_label_;   // per world
  std::vector<std::map<std::string, AtomIndex>> atom_index_;    // per world
};

}  // namespace pkb
