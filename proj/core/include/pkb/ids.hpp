#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace pkb {

// Handles are indices into the owning store's tables. They are only
// meaningful relative to the store that issued them.

struct WorldId {
  std::uint32_t value = 0;
  friend auto operator<=>(WorldId, WorldId) = default;
};

struct IndividualId {
  std::uint32_t value = 0;
  friend auto operator<=>(IndividualId, IndividualId) = default;
};

struct PossibilityId {
  std::uint32_t value = 0;
  friend auto operator<=>(PossibilityId, PossibilityId) = default;
};

struct ContextId {
  std::uint32_t value = 0;
  friend auto operator<=>(ContextId, ContextId) = default;
};

// The de-nunc clock. Epoch 0 is the epoch a fresh store starts in; every
// `epoch` directive advances it by one.
struct Epoch {
  std::uint64_t value = 0;
  friend auto operator<=>(Epoch, Epoch) = default;
  Epoch next() const { return Epoch{value + 1}; }
};

using AtomIndex = std::uint32_t;

}  // namespace pkb
