#pragma once

#include <optional>
#include <string_view>

#include "oip/riasec.hpp"

namespace oip {

/// Extracts a Likert response from raw model output.
///
/// Accepts, case-insensitively and ignoring surrounding punctuation and
/// whitespace: an exact scale label, a standalone digit 1-5, or text that is a
/// substring of exactly one label. Text containing two distinct scale labels
/// (or conflicting digits) is ambiguous and never resolved silently.
///
/// Returns nullopt on failure; the caller keeps the raw text for the record.
std::optional<LikertValue> parse_likert(std::string_view text, Language language);

}  // namespace oip
