#include "chartkit/edit_distance.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace chartkit {

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  // b is the shorter string; one rolling column of |b|+1 entries.
  std::vector<std::size_t> col(b.size() + 1);
  std::iota(col.begin(), col.end(), std::size_t{0});
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::size_t diag = col[0];
    col[0] = i + 1;
    for (std::size_t j = 0; j < b.size(); ++j) {
      std::size_t sub = diag + (a[i] == b[j] ? 0 : 1);
      diag = col[j + 1];
      col[j + 1] = std::min({col[j + 1] + 1, col[j] + 1, sub});
    }
  }
  return col[b.size()];
}

bool levenshtein_within(std::string_view a, std::string_view b, std::size_t limit) {
  if (a.size() < b.size()) std::swap(a, b);
  if (a.size() - b.size() > limit) return false;
  if (limit == 0) return a == b;
  if (b.empty()) return a.size() <= limit;

  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 2;
  std::vector<std::size_t> col(b.size() + 1);
  std::iota(col.begin(), col.end(), std::size_t{0});
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::size_t diag = col[0];
    col[0] = i + 1;
    // Cells outside the |i-j| <= limit band can never reach <= limit.
    std::size_t lo = (i + 1 > limit) ? i + 1 - limit : 1;
    std::size_t hi = std::min(b.size(), i + 1 + limit);
    if (lo > 1) {
      diag = col[lo - 1];
      col[lo - 1] = kInf;
    }
    std::size_t best = kInf;
    for (std::size_t j = lo; j <= hi; ++j) {
      std::size_t up = (j == hi && hi < b.size()) ? kInf : col[j];
      std::size_t sub = diag + (a[i] == b[j - 1] ? 0 : 1);
      diag = col[j];
      col[j] = std::min({up + 1, col[j - 1] + 1, sub});
      best = std::min(best, col[j]);
    }
    if (hi < b.size()) col[hi + 1] = kInf;
    if (best > limit) return false;
  }
  return col[b.size()] <= limit;
}

}  // namespace chartkit
