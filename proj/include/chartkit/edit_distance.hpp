#pragma once

#include <cstddef>
#include <string_view>

namespace chartkit {

// Character-level Levenshtein distance (unit insert/delete/substitute).
std::size_t levenshtein(std::string_view a, std::string_view b);

// True iff levenshtein(a, b) <= limit. Banded evaluation; O(min(m,n)*limit)
// instead of the full matrix, which matters because structural matching
// compares every prediction/ground-truth pair at thresholds of at most 5.
bool levenshtein_within(std::string_view a, std::string_view b, std::size_t limit);

}  // namespace chartkit
