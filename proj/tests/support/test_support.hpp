#pragma once

// Test-only oracles and fixture builders. Everything here is independent of
// the implementation paths it checks: the Levenshtein oracle fills the full
// dynamic-programming matrix, and the matching oracle enumerates all
// injections.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "chartkit/chart_types.hpp"
#include "chartkit/scrm.hpp"
#include "chartkit/table.hpp"

namespace testsupport {

inline std::size_t levenshtein_oracle(const std::string& a, const std::string& b) {
  const std::size_t m = a.size(), n = b.size();
  std::vector<std::vector<std::size_t>> d(m + 1, std::vector<std::size_t>(n + 1));
  for (std::size_t i = 0; i <= m; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= n; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      std::size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
    }
  }
  return d[m][n];
}

// Maximum-cardinality matching by exhaustive search over all injections of
// prediction triplets into ground-truth triplets.
inline std::size_t brute_force_matching(const chartkit::TripletSet& pred,
                                        const chartkit::TripletSet& gt,
                                        const chartkit::scrm::ToleranceRegime& regime,
                                        const chartkit::scrm::ScrmConfig& config = {}) {
  const std::size_t np = pred.items.size();
  const std::size_t ng = gt.items.size();
  std::vector<std::vector<bool>> compat(np, std::vector<bool>(ng, false));
  for (std::size_t p = 0; p < np; ++p)
    for (std::size_t g = 0; g < ng; ++g)
      compat[p][g] = chartkit::scrm::triplet_compatible(pred.items[p], gt.items[g],
                                                        regime, config);

  std::vector<bool> used(ng, false);
  std::size_t best = 0;
  auto recurse = [&](auto&& self, std::size_t p, std::size_t matched) -> void {
    best = std::max(best, matched);
    if (p == np) return;
    // Even matching every remaining prediction cannot beat the best.
    if (matched + (np - p) <= best) return;
    for (std::size_t g = 0; g < ng; ++g) {
      if (used[g] || !compat[p][g]) continue;
      used[g] = true;
      self(self, p + 1, matched + 1);
      used[g] = false;
    }
    self(self, p + 1, matched);  // leave prediction p unmatched
  };
  recurse(recurse, 0, 0);
  return best;
}

// Deterministic random chart tables. Cells are integers rendered as text so
// CSV round trips are exact.
struct TableGen {
  std::mt19937_64 rng;

  explicit TableGen(std::uint64_t seed) : rng(seed) {}

  std::size_t uniform(std::size_t lo, std::size_t hi) {
    return lo + rng() % (hi - lo + 1);
  }

  chartkit::ChartTable table(std::size_t max_rows = 8, std::size_t max_cols = 8,
                             bool with_text_cells = false,
                             bool with_empty_cells = false) {
    chartkit::ChartTable t;
    std::size_t rows = uniform(1, max_rows);
    std::size_t cols = uniform(1, max_cols);
    for (std::size_t i = 0; i < rows; ++i)
      t.row_entities.push_back("row" + std::to_string(i) + "_" +
                               std::to_string(uniform(0, 999)));
    for (std::size_t j = 0; j < cols; ++j)
      t.col_entities.push_back("col" + std::to_string(j) + "_" +
                               std::to_string(uniform(0, 999)));
    t.cells.assign(rows, std::vector<chartkit::CellValue>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        std::size_t pick = uniform(0, 9);
        if (with_empty_cells && pick == 0) {
          t.cells[i][j] = chartkit::CellValue::empty();
        } else if (with_text_cells && pick == 1) {
          t.cells[i][j] = chartkit::CellValue::classify(
              "label_" + std::to_string(uniform(0, 99)));
        } else {
          t.cells[i][j] = chartkit::CellValue::classify(
              std::to_string(static_cast<long>(uniform(0, 100000))));
        }
      }
    }
    return t;
  }

  // In-place row/column shuffles built on the deterministic generator.
  void shuffle_rows(chartkit::ChartTable& t) {
    for (std::size_t i = t.rows(); i > 1; --i) {
      std::size_t j = rng() % i;
      std::swap(t.row_entities[i - 1], t.row_entities[j]);
      std::swap(t.cells[i - 1], t.cells[j]);
    }
  }

  void shuffle_cols(chartkit::ChartTable& t) {
    for (std::size_t j = t.cols(); j > 1; --j) {
      std::size_t k = rng() % j;
      std::swap(t.col_entities[j - 1], t.col_entities[k]);
      for (auto& row : t.cells) std::swap(row[j - 1], row[k]);
    }
  }

  // Random triplet sets for matching-oracle comparisons; small alphabets
  // force near-collisions so the matcher is actually exercised.
  chartkit::TripletSet triplets(std::size_t max_items) {
    static const char* rows[] = {"alpha", "alphb", "beta", "bets", "gamma"};
    static const char* cols[] = {"sales", "salez", "count", "cost"};
    chartkit::TripletSet set;
    std::size_t n = uniform(0, max_items);
    for (std::size_t i = 0; i < n; ++i) {
      chartkit::Triplet t;
      t.row = rows[uniform(0, 4)];
      t.col = cols[uniform(0, 3)];
      if (uniform(0, 5) == 0) {
        t.value = chartkit::CellValue::classify("tag" + std::to_string(uniform(0, 3)));
      } else {
        t.value =
            chartkit::CellValue::classify(std::to_string(100 + uniform(0, 20)));
      }
      set.items.push_back(std::move(t));
    }
    return set;
  }
};

// Scales every numeric cell by `factor`, regenerating the raw text.
inline chartkit::ChartTable scale_values(const chartkit::ChartTable& t, double factor) {
  chartkit::ChartTable out = t;
  for (auto& row : out.cells) {
    for (auto& cell : row) {
      if (!cell.is_numeric()) continue;
      double v = cell.number * factor;
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6f", v);
      cell = chartkit::CellValue::classify(buf);
    }
  }
  return out;
}

}  // namespace testsupport
