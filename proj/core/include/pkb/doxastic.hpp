#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pkb/ids.hpp"
#include "pkb/model.hpp"
#include "pkb/status.hpp"

namespace pkb {

/// One status constraint as the solver sees it: the world set of the
/// constrained possibility plus the asserted status. `tag` carries the
/// caller's index so conflict cores can name the original constraints.
struct SolveInput {
  WorldSet worlds;
  ModalStatus status = ModalStatus::Possible;
  std::size_t tag = 0;
};

struct ConflictEntry {
  std::string context;
  std::string possibility;
  ModalStatus status = ModalStatus::Possible;
  Epoch asserted_at;
};

struct ConflictReport {
  std::vector<ConflictEntry> conflicting;
  std::string to_string() const;
};

/// The doxastically actual worlds of a context at an epoch: candidates are
/// the worlds hosting the context's actuality, allowed the maximal subset
/// satisfying every live constraint.
struct DoxasticState {
  ContextId context;
  Epoch at;
  WorldSet candidates;
  WorldSet allowed;
};

/// Maximal satisfying world set, or nullopt when the constraints admit no
/// nonempty set. allowed = candidates ∩ all Necessary world sets minus all
/// Impossible ones; Possible and Contingent constraints are then checked
/// against it (maximality makes the check exact).
std::optional<WorldSet> solve_allowed(const WorldSet& candidates,
                                      std::span<const SolveInput> constraints);

/// Greedy irreducible conflict core of an unsatisfiable constraint set;
/// returns the tags of a minimal subset that is still unsatisfiable.
std::vector<std::size_t> minimal_conflict_core(
    const WorldSet& candidates, std::span<const SolveInput> constraints);

struct OracleResult {
  bool consistent = false;
  std::vector<WorldSet> satisfying;  // every nonempty satisfying subset
  WorldSet maximal;                  // union of the satisfying subsets
};

/// Brute-force reference solver: enumerates every nonempty subset of the
/// candidates and checks each constraint literally. Independent of
/// solve_allowed by construction; throws TooManyCandidates above the bound.
OracleResult oracle_solve(const WorldSet& candidates,
                          std::span<const SolveInput> constraints,
                          std::size_t max_candidates = 16);

/// Exact nonnegative ratio, kept reduced. Credences are counting ratios
/// over doxastically actual worlds, so they are exact by construction.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational of(std::int64_t num, std::int64_t den) {
    auto g = std::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    return Rational{num, den};
  }
  friend bool operator==(const Rational&, const Rational&) = default;
  std::string to_string() const;
};

}  // namespace pkb
