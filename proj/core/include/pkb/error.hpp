#pragma once

#include <stdexcept>
#include <string>

namespace pkb {

enum class Errc {
  // kernel
  EmptyWorld,
  DuplicateLabel,
  DuplicateName,
  UnknownWorld,
  AtomOutsideWorld,
  EmptyExtent,
  CrossWorldMereology,
  NoCommonPart,
  // possibility
  EmptyPossibility,
  UnknownIndividual,
  FunctionalViolation,
  UnknownPossibility,
  EmptySet,
  NotComoverlapable,
  // doxastic
  UnknownContext,
  InconsistentContext,
  ModallyInconsistent,
  ZeroDenominator,
  TooManyCandidates,
  EpochOutOfRange,
  // testimony
  UnregisteredSpeaker,
  UnknownTestimony,
  UnknownNestedContext,
  InvalidEndorsement,
  // identity
  InconsistentStore,
  DisjointLineages,
  IncompatibleStores,
};

const char* errc_name(Errc code);

/// Contract violations (unknown handles, cross-world mereology, malformed
/// input) throw. Outcomes that are part of the protocol (a rejected
/// assertion, a merge conflict, parse diagnostics) are returned as values.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace pkb
