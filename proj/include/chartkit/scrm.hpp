#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chartkit/chart_types.hpp"
#include "chartkit/table.hpp"

namespace chartkit::scrm {

enum class ToleranceLevel { strict, slight, high };

inline constexpr std::array<ToleranceLevel, 3> kAllLevels = {
    ToleranceLevel::strict, ToleranceLevel::slight, ToleranceLevel::high};

std::string_view level_name(ToleranceLevel level);

// Paired thresholds governing triplet compatibility: j_thr bounds the edit
// distance between entity strings, e_thr the relative error between numeric
// values.
struct ToleranceRegime {
  ToleranceLevel level = ToleranceLevel::strict;
  std::size_t j_thr = 0;
  double e_thr = 0.0;
};

// Threshold table per difficulty class:
//   normal     strict (0, 0)    slight (2, 0.05)  high (5, 0.1)
//   difficult  strict (0, 0.1)  slight (2, 0.3)   high (5, 0.5)
ToleranceRegime regime_for(ChartTypeId chart_type, ToleranceLevel level);
ToleranceRegime regime_for(Difficulty difficulty, ToleranceLevel level);

// How per-image match results aggregate into AP: binary counts only images
// with a perfect two-sided match, mean_f1 averages per-image F1.
enum class ApMode { binary, mean_f1 };

// Thresholds indexed by [difficulty][level].
using ThresholdTable = std::array<std::array<ToleranceRegime, 3>, 2>;

ThresholdTable default_thresholds();

struct ScrmConfig {
  ApMode ap_mode = ApMode::binary;
  bool case_insensitive = false;
  ThresholdTable thresholds = default_thresholds();

  ToleranceRegime regime(ChartTypeId chart_type, ToleranceLevel level) const {
    return thresholds[static_cast<std::size_t>(difficulty_of(chart_type))]
                     [static_cast<std::size_t>(level)];
  }
};

struct MatchResult {
  std::vector<std::pair<std::size_t, std::size_t>> matched_pairs;
  double precision = 0.0;
  double recall = 0.0;
  bool pass = false;
};

// True iff row and column entities are within j_thr edit distance and the
// values are compatible: both numeric with |p-g| <= e_thr*|g| (exact match
// when g is 0), both text within j_thr, or both empty.
bool triplet_compatible(const Triplet& pred, const Triplet& gt,
                        const ToleranceRegime& regime,
                        const ScrmConfig& config = {});

// Maximum-cardinality one-to-one matching over the compatibility graph.
// precision = |matched| / |pred| and recall = |matched| / |gt|, with 0/0
// defined as 0; pass requires both to equal 1.
MatchResult match_triplets(const TripletSet& pred, const TripletSet& gt,
                           const ToleranceRegime& regime,
                           const ScrmConfig& config = {});

// Scores a prediction table against ground truth at one tolerance level.
// Both the prediction and its transpose are matched, and the orientation
// with more matched triplets wins (ties keep the untransposed result).
// Row/column permutations need no special handling: triplets are a set.
MatchResult image_score(const ChartTable& pred, const ChartTable& gt,
                        ChartTypeId chart_type, ToleranceLevel level,
                        const ScrmConfig& config = {});

struct ScrmSample {
  std::string id;
  ChartTypeId chart_type = ChartTypeId::bar;
  std::string pred_csv;
  std::string gt_csv;
};

struct TypeScores {
  std::array<double, 3> ap = {0.0, 0.0, 0.0};  // indexed by ToleranceLevel
  std::size_t count = 0;
};

struct ScrmReport {
  std::map<ChartTypeId, TypeScores> per_type;
  std::array<double, 3> overall = {0.0, 0.0, 0.0};
  std::size_t total = 0;
  // Samples whose prediction (or ground truth) failed to parse; they score
  // zero but never abort the run.
  std::vector<std::pair<std::string, std::string>> failures;  // (id, error)
};

struct EmptyDatasetError : std::runtime_error {
  EmptyDatasetError() : std::runtime_error("empty dataset") {}
};

// Entity replacement is applied to both sides of value-style chart types
// before matching. Throws EmptyDatasetError when samples is empty.
ScrmReport scrm_evaluate(const std::vector<ScrmSample>& samples,
                         const ScrmConfig& config = {});

}  // namespace chartkit::scrm
