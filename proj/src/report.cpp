#include "chartkit/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

#include "chartkit/llm_client.hpp"

namespace chartkit::report {

Provenance make_provenance(const nlohmann::json& effective_config,
                           std::string_view dataset_bytes) {
  Provenance p;
  p.config_hash = hash_hex(fnv1a_hash(effective_config.dump()));
  p.dataset_hash = hash_hex(fnv1a_hash(dataset_bytes));
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  p.timestamp = buf;
  return p;
}

nlohmann::json provenance_json(const Provenance& p) {
  return {
      {"config_hash", p.config_hash},
      {"dataset_hash", p.dataset_hash},
      {"timestamp", p.timestamp},
      {"tool_version", p.tool_version},
  };
}

std::string format_fixed2(double v) {
  // Half-up on the second decimal; values here are non-negative.
  double scaled = std::floor(v * 100.0 + 0.5) / 100.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", scaled);
  return buf;
}

double Classwise::mean_for(ChartTypeId type) const {
  auto it = per_type.find(type);
  if (it == per_type.end() || it->second.second == 0) return 0.0;
  return it->second.first / static_cast<double>(it->second.second);
}

double Classwise::overall_mean() const {
  return overall_n == 0 ? 0.0 : overall_sum / static_cast<double>(overall_n);
}

namespace {

std::string markdown_header() {
  std::string head = "| Model | Task |";
  std::string rule = "|---|---|";
  for (ChartTypeId t : report_column_order()) {
    head += " ";
    head += chart_type_heading(t);
    head += " |";
    rule += "---|";
  }
  head += " Avg. |";
  rule += "---|";
  return head + "\n" + rule + "\n";
}

}  // namespace

nlohmann::json scrm_report_json(const scrm::ScrmReport& r, const Provenance& prov,
                                const std::string& model_name) {
  nlohmann::json per_type = nlohmann::json::object();
  for (const auto& [type, scores] : r.per_type) {
    per_type[std::string(chart_type_name(type))] = {
        {"ap_strict", scores.ap[0]},
        {"ap_slight", scores.ap[1]},
        {"ap_high", scores.ap[2]},
        {"count", scores.count},
    };
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& [id, error] : r.failures)
    failures.push_back({{"id", id}, {"error", error}});
  return {
      {"kind", "scrm"},
      {"task", "structural_extraction"},
      {"metric", "scrm_ap"},
      {"model", model_name},
      {"overall",
       {{"ap_strict", r.overall[0]},
        {"ap_slight", r.overall[1]},
        {"ap_high", r.overall[2]}}},
      {"per_type", per_type},
      {"total_samples", r.total},
      {"failures", failures},
      {"provenance", provenance_json(prov)},
  };
}

std::string scrm_report_markdown(const scrm::ScrmReport& r,
                                 const std::string& model_name) {
  std::string out = markdown_header();
  static constexpr const char* kRowLabels[3] = {"SE @strict", "SE @slight",
                                                "SE @high"};
  for (std::size_t level = 0; level < 3; ++level) {
    out += "| " + model_name + " | " + kRowLabels[level] + " |";
    for (ChartTypeId t : report_column_order()) {
      auto it = r.per_type.find(t);
      out += " ";
      out += (it == r.per_type.end() || it->second.count == 0)
                 ? "-"
                 : format_fixed2(it->second.ap[level]);
      out += " |";
    }
    out += " " + format_fixed2(r.overall[level]) + " |\n";
  }
  return out;
}

nlohmann::json classwise_report_json(const Classwise& cw, const Provenance& prov,
                                     const std::string& task,
                                     const std::string& metric,
                                     const std::string& model_name, double scale) {
  nlohmann::json per_type = nlohmann::json::object();
  for (const auto& [type, acc] : cw.per_type) {
    per_type[std::string(chart_type_name(type))] = {
        {"value", scale * (acc.second == 0
                               ? 0.0
                               : acc.first / static_cast<double>(acc.second))},
        {"count", acc.second},
    };
  }
  return {
      {"kind", "classwise"},
      {"task", task},
      {"metric", metric},
      {"model", model_name},
      {"overall", scale * cw.overall_mean()},
      {"per_type", per_type},
      {"total_samples", cw.overall_n},
      {"provenance", provenance_json(prov)},
  };
}

std::string classwise_report_markdown(const Classwise& cw, const std::string& task,
                                      const std::string& metric,
                                      const std::string& model_name, double scale) {
  std::string out = markdown_header();
  out += "| " + model_name + " | " + task + " (" + metric + ") |";
  for (ChartTypeId t : report_column_order()) {
    auto it = cw.per_type.find(t);
    out += " ";
    out += (it == cw.per_type.end() || it->second.second == 0)
               ? "-"
               : format_fixed2(scale * cw.mean_for(t));
    out += " |";
  }
  out += " " + format_fixed2(scale * cw.overall_mean()) + " |\n";
  return out;
}

std::string render_markdown(const nlohmann::json& rep) {
  const std::string kind = rep.value("kind", "");
  const std::string model = rep.value("model", "model");
  std::string out = markdown_header();
  if (kind == "scrm") {
    static constexpr const char* kLevels[3] = {"ap_strict", "ap_slight", "ap_high"};
    static constexpr const char* kRowLabels[3] = {"SE @strict", "SE @slight",
                                                  "SE @high"};
    for (std::size_t level = 0; level < 3; ++level) {
      out += "| " + model + " | " + kRowLabels[level] + " |";
      for (ChartTypeId t : report_column_order()) {
        std::string key(chart_type_name(t));
        out += " ";
        if (rep["per_type"].contains(key))
          out += format_fixed2(rep["per_type"][key][kLevels[level]].get<double>());
        else
          out += "-";
        out += " |";
      }
      out += " " + format_fixed2(rep["overall"][kLevels[level]].get<double>()) + " |\n";
    }
    return out;
  }
  out += "| " + model + " | " + rep.value("task", "") + " (" +
         rep.value("metric", "") + ") |";
  for (ChartTypeId t : report_column_order()) {
    std::string key(chart_type_name(t));
    out += " ";
    if (rep["per_type"].contains(key))
      out += format_fixed2(rep["per_type"][key]["value"].get<double>());
    else
      out += "-";
    out += " |";
  }
  out += " " + format_fixed2(rep["overall"].get<double>()) + " |\n";
  return out;
}

}  // namespace chartkit::report
