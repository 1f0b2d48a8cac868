#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "chartkit/chart_types.hpp"
#include "chartkit/scrm.hpp"

namespace chartkit::report {

inline constexpr const char* kToolVersion = "0.1.0";

// Reproducibility envelope carried by every report. The timestamp is the
// only field excluded from determinism comparisons.
struct Provenance {
  std::string config_hash;
  std::string dataset_hash;
  std::string timestamp;
  std::string tool_version = kToolVersion;
};

Provenance make_provenance(const nlohmann::json& effective_config,
                           std::string_view dataset_bytes);

nlohmann::json provenance_json(const Provenance& p);

// Percentage/score formatting used by the markdown tables: two decimals,
// half-up, applied at the print layer only.
std::string format_fixed2(double v);

// Class-wise accumulator for per-sample scores (accuracy fractions or judge
// scores); reports sample-weighted means per type and overall.
struct Classwise {
  std::map<ChartTypeId, std::pair<double, std::size_t>> per_type;  // (sum, n)
  double overall_sum = 0.0;
  std::size_t overall_n = 0;

  void add(ChartTypeId type, double value) {
    auto& [sum, n] = per_type[type];
    sum += value;
    n += 1;
    overall_sum += value;
    overall_n += 1;
  }
  double mean_for(ChartTypeId type) const;
  double overall_mean() const;
};

// Structural-extraction report renderers. The markdown layout is the
// class-wise table: 18 chart-type columns plus Avg, one row per tolerance
// level.
nlohmann::json scrm_report_json(const scrm::ScrmReport& r, const Provenance& prov,
                                const std::string& model_name);
std::string scrm_report_markdown(const scrm::ScrmReport& r,
                                 const std::string& model_name);

// Generic class-wise report (QA accuracy, exact match, judge scores).
// `scale` maps stored per-sample values to printed ones (100 for
// accuracies, 1 for 0-5 scores).
nlohmann::json classwise_report_json(const Classwise& cw, const Provenance& prov,
                                     const std::string& task,
                                     const std::string& metric,
                                     const std::string& model_name, double scale);
std::string classwise_report_markdown(const Classwise& cw, const std::string& task,
                                      const std::string& metric,
                                      const std::string& model_name, double scale);

// Renders any report produced by the functions above to markdown.
std::string render_markdown(const nlohmann::json& report);

}  // namespace chartkit::report
