#include "pkb/doxastic.hpp"

#include <sstream>

#include "pkb/error.hpp"

namespace pkb {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::EmptyWorld: return "EmptyWorld";
    case Errc::DuplicateLabel: return "DuplicateLabel";
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::UnknownWorld: return "UnknownWorld";
    case Errc::AtomOutsideWorld: return "AtomOutsideWorld";
    case Errc::EmptyExtent: return "EmptyExtent";
    case Errc::CrossWorldMereology: return "CrossWorldMereology";
    case Errc::NoCommonPart: return "NoCommonPart";
    case Errc::EmptyPossibility: return "EmptyPossibility";
    case Errc::UnknownIndividual: return "UnknownIndividual";
    case Errc::FunctionalViolation: return "FunctionalViolation";
    case Errc::UnknownPossibility: return "UnknownPossibility";
    case Errc::EmptySet: return "EmptySet";
    case Errc::NotComoverlapable: return "NotComoverlapable";
    case Errc::UnknownContext: return "UnknownContext";
    case Errc::InconsistentContext: return "InconsistentContext";
    case Errc::ModallyInconsistent: return "ModallyInconsistent";
    case Errc::ZeroDenominator: return "ZeroDenominator";
    case Errc::TooManyCandidates: return "TooManyCandidates";
    case Errc::EpochOutOfRange: return "EpochOutOfRange";
    case Errc::UnregisteredSpeaker: return "UnregisteredSpeaker";
    case Errc::UnknownTestimony: return "UnknownTestimony";
    case Errc::UnknownNestedContext: return "UnknownNestedContext";
    case Errc::InvalidEndorsement: return "InvalidEndorsement";
    case Errc::InconsistentStore: return "InconsistentStore";
    case Errc::DisjointLineages: return "DisjointLineages";
    case Errc::IncompatibleStores: return "IncompatibleStores";
  }
  return "UnknownError";
}

const char* to_string(ModalStatus s) {
  switch (s) {
    case ModalStatus::Possible: return "possible";
    case ModalStatus::Necessary: return "necessary";
    case ModalStatus::Contingent: return "contingent";
    case ModalStatus::Impossible: return "impossible";
  }
  return "?";
}

const char* to_string(SetModalStatus s) {
  switch (s) {
    case SetModalStatus::Impossible: return "impossible";
    case SetModalStatus::Comnecessary: return "comnecessary";
    case SetModalStatus::Comcontingent: return "comcontingent";
  }
  return "?";
}

const char* to_string(DeDictoStatus s) {
  switch (s) {
    case DeDictoStatus::Necessarily: return "necessarily";
    case DeDictoStatus::ContingentlyPossible: return "contingently-possible";
    case DeDictoStatus::Impossible: return "impossible";
  }
  return "?";
}

std::optional<ModalStatus> parse_modal_status(const std::string& word) {
  if (word == "possible") return ModalStatus::Possible;
  if (word == "necessary") return ModalStatus::Necessary;
  if (word == "contingent") return ModalStatus::Contingent;
  if (word == "impossible") return ModalStatus::Impossible;
  return std::nullopt;
}

std::string ConflictReport::to_string() const {
  std::ostringstream out;
  out << "modally inconsistent; conflicting constraints:";
  for (const ConflictEntry& c : conflicting) {
    out << "\n  " << c.context << " " << pkb::to_string(c.status) << " "
        << c.possibility << " @e" << c.asserted_at.value;
  }
  return out.str();
}

std::string Rational::to_string() const {
  return std::to_string(num) + "/" + std::to_string(den);
}

std::optional<WorldSet> solve_allowed(const WorldSet& candidates,
                                      std::span<const SolveInput> constraints) {
  WorldSet allowed = candidates;
  for (const SolveInput& c : constraints)
    if (c.status == ModalStatus::Necessary)
      allowed = WorldSet::intersect(allowed, c.worlds);
  for (const SolveInput& c : constraints)
    if (c.status == ModalStatus::Impossible)
      allowed = WorldSet::minus(allowed, c.worlds);
  if (allowed.empty()) return std::nullopt;
  for (const SolveInput& c : constraints) {
    switch (c.status) {
      case ModalStatus::Possible:
        if (!allowed.overlaps(c.worlds)) return std::nullopt;
        break;
      case ModalStatus::Contingent:
        if (!allowed.overlaps(c.worlds) || allowed.is_subset_of(c.worlds))
          return std::nullopt;
        break;
      case ModalStatus::Necessary:
      case ModalStatus::Impossible:
        break;
    }
  }
  return allowed;
}

std::vector<std::size_t> minimal_conflict_core(
    const WorldSet& candidates, std::span<const SolveInput> constraints) {
  std::vector<SolveInput> core(constraints.begin(), constraints.end());
  std::size_t i = 0;
  while (i < core.size()) {
    std::vector<SolveInput> without = core;
    without.erase(without.begin() + static_cast<std::ptrdiff_t>(i));
    if (!solve_allowed(candidates, without))
      core = std::move(without);  // still conflicting; drop for good
    else
      ++i;
  }
  std::vector<std::size_t> tags;
  tags.reserve(core.size());
  for (const SolveInput& c : core) tags.push_back(c.tag);
  return tags;
}

OracleResult oracle_solve(const WorldSet& candidates,
                          std::span<const SolveInput> constraints,
                          std::size_t max_candidates) {
  if (candidates.size() > max_candidates)
    throw Error(Errc::TooManyCandidates,
                "oracle bound exceeded: " + std::to_string(candidates.size()) +
                    " candidates > " + std::to_string(max_candidates));
  const std::vector<WorldId>& base = candidates.items();
  OracleResult result;
  const std::uint64_t limit = std::uint64_t{1} << base.size();
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    std::vector<WorldId> picked;
    for (std::size_t i = 0; i < base.size(); ++i)
      if (mask & (std::uint64_t{1} << i)) picked.push_back(base[i]);
    WorldSet d(std::move(picked));

    bool ok = true;
    for (const SolveInput& c : constraints) {
      switch (c.status) {
        case ModalStatus::Possible:
          ok = d.overlaps(c.worlds);
          break;
        case ModalStatus::Necessary:
          ok = d.is_subset_of(c.worlds);
          break;
        case ModalStatus::Contingent:
          ok = d.overlaps(c.worlds) && !d.is_subset_of(c.worlds);
          break;
        case ModalStatus::Impossible:
          ok = !d.overlaps(c.worlds);
          break;
      }
      if (!ok) break;
    }
    if (ok) {
      result.maximal = WorldSet::unite(result.maximal, d);
      result.satisfying.push_back(std::move(d));
    }
  }
  result.consistent = !result.satisfying.empty();
  return result;
}

}  // namespace pkb
