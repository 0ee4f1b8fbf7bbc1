#pragma once

#include <optional>
#include <string>

namespace pkb {

/// Status a context can assert of a possibility. Contingent and Necessary
/// refine Possible; classify() only ever answers with the most specific of
/// Necessary / Contingent / Impossible.
enum class ModalStatus { Possible, Necessary, Contingent, Impossible };

/// Joint status of a set of possibilities over the whole model.
/// Comnecessary and Comcontingent are the two compossible cases.
enum class SetModalStatus { Impossible, Comnecessary, Comcontingent };

constexpr bool compossible(SetModalStatus s) {
  return s != SetModalStatus::Impossible;
}

/// Property-to-property (de dicto) relation between two possibilities
/// read as property extensions.
enum class DeDictoStatus { Necessarily, ContingentlyPossible, Impossible };

const char* to_string(ModalStatus s);
const char* to_string(SetModalStatus s);
const char* to_string(DeDictoStatus s);
std::optional<ModalStatus> parse_modal_status(const std::string& word);

}  // namespace pkb
