#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace chartkit {

// Canonical number grammar shared by cell classification and answer scoring.
//
// Accepts an optional currency prefix ($, €, £, ¥, ₹), an optional sign,
// digits with well-formed "," thousands groups, an optional fraction and
// exponent, and an optional short unit suffix ("%" or a purely alphabetic
// token of at most 8 letters). Percentages keep their face magnitude:
// "25%" parses to 25, not 0.25. Returns nullopt when the trimmed text does
// not match the grammar as a whole.
std::optional<double> parse_number(std::string_view text);

// Trim ASCII whitespace from both ends.
std::string_view trim(std::string_view s);

// Normalization used by string answer comparison: trim, ASCII casefold,
// collapse internal whitespace runs to one space, strip one trailing period.
std::string normalize_answer(std::string_view s);

}  // namespace chartkit
