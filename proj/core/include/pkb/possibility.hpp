#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "pkb/model.hpp"
#include "pkb/status.hpp"

namespace pkb {

/// How a possibility entered the space. User possibilities serialize as
/// `poss` statements, constructed ones as `construct` statements, and
/// actuality possibilities are re-derived when their context is reopened.
enum class PossibilityOrigin { User, Constructed, Actuality };

/// A counterpart set: individuals from one or more worlds standing in for
/// one thing across worlds. Doubles as a property extension. Membership is
/// immutable once defined.
struct Possibility {
  PossibilityId id;
  std::string name;
  std::vector<IndividualId> members;  // sorted, unique
  bool functional = false;            // at most one member per world
  WorldSet worlds;                    // worlds hosting at least one member
  PossibilityOrigin origin = PossibilityOrigin::User;
  std::vector<PossibilityId> built_from;  // comoverlap inputs, sorted
};

/// The model plus its registry of possibilities and the com- family of
/// trans-world predicates over them.
class ModalSpace {
 public:
  Model& model() { return model_; }
  const Model& model() const { return model_; }

  PossibilityId define_possibility(std::string name,
                                   std::vector<IndividualId> members,
                                   bool functional,
                                   PossibilityOrigin origin =
                                       PossibilityOrigin::User);

  /// Worlds containing at least one member of P.
  const WorldSet& worlds_of(PossibilityId p) const;

  /// Impossible when no world hosts members of all of S; Comnecessary when
  /// every world of the model does; Comcontingent otherwise.
  SetModalStatus modal_status_of_set(std::span<const PossibilityId> s) const;

  /// True when some world hosts one member of each P in S whose extents
  /// share a common part.
  bool comoverlapable(std::span<const PossibilityId> s) const;

  /// Materializes, per world and per member selection with a nonempty
  /// common intersection, the intersection individual, and defines the
  /// possibility collecting them. Idempotent for an identical (name,
  /// inputs) pair.
  PossibilityId comoverlap_construct(std::span<const PossibilityId> s,
                                     std::string name,
                                     PossibilityOrigin origin =
                                         PossibilityOrigin::Constructed);

  /// De dicto relation of P to Q read as property extensions: subset means
  /// Necessarily, disjoint means Impossible, overlap without subset means
  /// ContingentlyPossible.
  DeDictoStatus de_dicto_relate(PossibilityId p, PossibilityId q) const;

  /// Strict-conditional dependency: every world of Q is a world of P and
  /// every member of Q overlaps some member of P in its world.
  bool entails(PossibilityId q, PossibilityId p) const;

  const Possibility& possibility(PossibilityId p) const;
  std::size_t possibility_count() const { return possibilities_.size(); }
  std::optional<PossibilityId> find_possibility(const std::string& name) const;

 private:
  std::vector<PossibilityId> check_set(std::span<const PossibilityId> s) const;
  // Per-world member lists for each possibility in `s`, for selection
  // enumeration.
  std::vector<std::vector<IndividualId>> members_in_world(
      std::span<const PossibilityId> s, WorldId w) const;

  Model model_;
  std::vector<Possibility> possibilities_;
  std::map<std::string, PossibilityId> names_;
};

}  // namespace pkb
