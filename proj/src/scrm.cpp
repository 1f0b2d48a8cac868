#include "chartkit/scrm.hpp"

#include <algorithm>
#include <cmath>

#include "chartkit/edit_distance.hpp"
#include "chartkit/numbers.hpp"

namespace chartkit::scrm {

std::string_view level_name(ToleranceLevel level) {
  switch (level) {
    case ToleranceLevel::strict: return "strict";
    case ToleranceLevel::slight: return "slight";
    case ToleranceLevel::high: return "high";
  }
  return "strict";
}

ToleranceRegime regime_for(Difficulty difficulty, ToleranceLevel level) {
  ToleranceRegime r;
  r.level = level;
  if (difficulty == Difficulty::normal) {
    switch (level) {
      case ToleranceLevel::strict: r.j_thr = 0; r.e_thr = 0.0; break;
      case ToleranceLevel::slight: r.j_thr = 2; r.e_thr = 0.05; break;
      case ToleranceLevel::high: r.j_thr = 5; r.e_thr = 0.1; break;
    }
  } else {
    switch (level) {
      case ToleranceLevel::strict: r.j_thr = 0; r.e_thr = 0.1; break;
      case ToleranceLevel::slight: r.j_thr = 2; r.e_thr = 0.3; break;
      case ToleranceLevel::high: r.j_thr = 5; r.e_thr = 0.5; break;
    }
  }
  return r;
}

ToleranceRegime regime_for(ChartTypeId chart_type, ToleranceLevel level) {
  return regime_for(difficulty_of(chart_type), level);
}

ThresholdTable default_thresholds() {
  ThresholdTable t;
  for (Difficulty d : {Difficulty::normal, Difficulty::difficult})
    for (ToleranceLevel level : kAllLevels)
      t[static_cast<std::size_t>(d)][static_cast<std::size_t>(level)] =
          regime_for(d, level);
  return t;
}

namespace {

std::string fold(std::string_view s, bool case_insensitive) {
  std::string out(trim(s));
  if (case_insensitive) {
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
      return static_cast<char>(std::tolower(c));
    });
  }
  return out;
}

bool strings_within(std::string_view a, std::string_view b, std::size_t j_thr,
                    const ScrmConfig& config) {
  if (!config.case_insensitive)
    return levenshtein_within(trim(a), trim(b), j_thr);
  return levenshtein_within(fold(a, true), fold(b, true), j_thr);
}

bool values_compatible(const CellValue& p, const CellValue& g,
                       const ToleranceRegime& regime, const ScrmConfig& config) {
  if (p.kind != g.kind) return false;
  switch (g.kind) {
    case CellValue::Kind::empty:
      return true;
    case CellValue::Kind::numeric:
      if (g.number == 0.0) return p.number == g.number;
      return std::abs(p.number - g.number) <= regime.e_thr * std::abs(g.number);
    case CellValue::Kind::text:
      return strings_within(p.raw, g.raw, regime.j_thr, config);
  }
  return false;
}

}  // namespace

bool triplet_compatible(const Triplet& pred, const Triplet& gt,
                        const ToleranceRegime& regime, const ScrmConfig& config) {
  return strings_within(pred.row, gt.row, regime.j_thr, config) &&
         strings_within(pred.col, gt.col, regime.j_thr, config) &&
         values_compatible(pred.value, gt.value, regime, config);
}

namespace {

// Kuhn's augmenting-path matching. Sizes here are table cells (rarely more
// than a few hundred triplets), so O(V*E) is plenty.
struct Matcher {
  const std::vector<std::vector<std::size_t>>& adj;
  std::vector<std::ptrdiff_t> gt_match;
  std::vector<char> visited;

  explicit Matcher(const std::vector<std::vector<std::size_t>>& a, std::size_t gt_n)
      : adj(a), gt_match(gt_n, -1) {}

  bool augment(std::size_t p) {
    for (std::size_t g : adj[p]) {
      if (visited[g]) continue;
      visited[g] = 1;
      if (gt_match[g] < 0 || augment(static_cast<std::size_t>(gt_match[g]))) {
        gt_match[g] = static_cast<std::ptrdiff_t>(p);
        return true;
      }
    }
    return false;
  }
};

}  // namespace

MatchResult match_triplets(const TripletSet& pred, const TripletSet& gt,
                           const ToleranceRegime& regime, const ScrmConfig& config) {
  const std::size_t np = pred.items.size();
  const std::size_t ng = gt.items.size();

  std::vector<std::vector<std::size_t>> adj(np);
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t g = 0; g < ng; ++g) {
      if (triplet_compatible(pred.items[p], gt.items[g], regime, config))
        adj[p].push_back(g);
    }
  }

  Matcher m(adj, ng);
  std::size_t matched = 0;
  for (std::size_t p = 0; p < np; ++p) {
    m.visited.assign(ng, 0);
    if (m.augment(p)) ++matched;
  }

  MatchResult result;
  result.matched_pairs.reserve(matched);
  for (std::size_t g = 0; g < ng; ++g) {
    if (m.gt_match[g] >= 0)
      result.matched_pairs.emplace_back(static_cast<std::size_t>(m.gt_match[g]), g);
  }
  std::sort(result.matched_pairs.begin(), result.matched_pairs.end());
  result.precision = np == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(np);
  result.recall = ng == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(ng);
  result.pass = matched == np && matched == ng && np > 0;
  return result;
}

MatchResult image_score(const ChartTable& pred, const ChartTable& gt,
                        ChartTypeId chart_type, ToleranceLevel level,
                        const ScrmConfig& config) {
  ToleranceRegime regime = config.regime(chart_type, level);
  TripletSet gt_set = to_triplets(gt);
  MatchResult direct = match_triplets(to_triplets(pred), gt_set, regime, config);
  MatchResult flipped =
      match_triplets(to_triplets(transpose(pred)), gt_set, regime, config);
  return flipped.matched_pairs.size() > direct.matched_pairs.size() ? flipped : direct;
}

ScrmReport scrm_evaluate(const std::vector<ScrmSample>& samples,
                         const ScrmConfig& config) {
  if (samples.empty()) throw EmptyDatasetError();

  ScrmReport report;
  std::map<ChartTypeId, std::array<double, 3>> score_sum;
  std::array<double, 3> overall_sum = {0.0, 0.0, 0.0};

  for (const ScrmSample& sample : samples) {
    auto& type_scores = report.per_type[sample.chart_type];
    auto& sums = score_sum[sample.chart_type];
    type_scores.count += 1;
    report.total += 1;

    std::array<double, 3> scores = {0.0, 0.0, 0.0};
    try {
      ChartTable gt = apply_entity_replacement(parse_csv(sample.gt_csv),
                                               sample.chart_type);
      try {
        ChartTable pred = apply_entity_replacement(parse_csv(sample.pred_csv),
                                                   sample.chart_type);
        for (ToleranceLevel level : kAllLevels) {
          MatchResult r = image_score(pred, gt, sample.chart_type, level, config);
          double s;
          if (config.ap_mode == ApMode::binary) {
            s = r.pass ? 1.0 : 0.0;
          } else {
            double pr = r.precision + r.recall;
            s = pr > 0.0 ? 2.0 * r.precision * r.recall / pr : 0.0;
          }
          scores[static_cast<std::size_t>(level)] = s;
        }
      } catch (const CsvError& e) {
        report.failures.emplace_back(sample.id,
                                     std::string("prediction: ") + e.what());
      }
    } catch (const CsvError& e) {
      report.failures.emplace_back(sample.id,
                                   std::string("ground truth: ") + e.what());
    }

    for (std::size_t k = 0; k < 3; ++k) {
      sums[k] += scores[k];
      overall_sum[k] += scores[k];
    }
  }

  for (auto& [type, scores] : report.per_type) {
    const auto& sums = score_sum[type];
    for (std::size_t k = 0; k < 3; ++k)
      scores.ap[k] = 100.0 * sums[k] / static_cast<double>(scores.count);
  }
  for (std::size_t k = 0; k < 3; ++k)
    report.overall[k] = 100.0 * overall_sum[k] / static_cast<double>(report.total);
  return report;
}

}  // namespace chartkit::scrm
