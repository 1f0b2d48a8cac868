#include "chartkit/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace chartkit::manifest {

namespace {

namespace fs = std::filesystem;

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open manifest: " + path);
  std::vector<nlohmann::json> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ManifestError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

ChartTypeId require_chart_type(const nlohmann::json& j, const std::string& path) {
  if (!j.contains("chart_type"))
    throw ManifestError(path + ": record missing chart_type");
  auto id = parse_chart_type(j["chart_type"].get<std::string>());
  if (!id)
    throw ManifestError(path + ": unknown chart_type " +
                        j["chart_type"].get<std::string>());
  return *id;
}

std::string read_optional_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "";
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string read_required_file(const fs::path& p, const std::string& what) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ManifestError("cannot read " + what + ": " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

std::vector<scrm::ScrmSample> load_scrm_manifest(const std::string& path) {
  fs::path base = fs::path(path).parent_path();
  std::vector<scrm::ScrmSample> samples;
  for (const nlohmann::json& j : read_jsonl(path)) {
    scrm::ScrmSample s;
    s.id = j.value("id", "sample-" + std::to_string(samples.size()));
    s.chart_type = require_chart_type(j, path);
    if (!j.contains("gt_csv_path"))
      throw ManifestError(path + ": record missing gt_csv_path");
    s.gt_csv = read_required_file(base / j["gt_csv_path"].get<std::string>(),
                                  "ground-truth CSV");
    if (j.contains("pred_csv_path"))
      s.pred_csv = read_optional_file(base / j["pred_csv_path"].get<std::string>());
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<AnswerSample> load_answer_manifest(const std::string& path) {
  std::vector<AnswerSample> samples;
  for (const nlohmann::json& j : read_jsonl(path)) {
    AnswerSample s;
    s.id = j.value("id", "sample-" + std::to_string(samples.size()));
    s.chart_type = require_chart_type(j, path);
    if (!j.contains("pred") || !j.contains("gt"))
      throw ManifestError(path + ": record needs pred and gt fields");
    s.pred = j["pred"].get<std::string>();
    s.gt = j["gt"].get<std::string>();
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<JudgeSample> load_judge_manifest(const std::string& path) {
  fs::path base = fs::path(path).parent_path();
  std::vector<JudgeSample> samples;
  for (const nlohmann::json& j : read_jsonl(path)) {
    JudgeSample s;
    s.id = j.value("id", "sample-" + std::to_string(samples.size()));
    s.chart_type = require_chart_type(j, path);
    s.title = j.value("title", "");
    if (j.contains("gt_csv"))
      s.gt_csv = j["gt_csv"].get<std::string>();
    else if (j.contains("gt_csv_path"))
      s.gt_csv = read_required_file(base / j["gt_csv_path"].get<std::string>(),
                                    "ground-truth CSV");
    if (!j.contains("candidate"))
      throw ManifestError(path + ": record missing candidate");
    s.candidate = j["candidate"].get<std::string>();
    s.question = j.value("question", "");
    s.reference = j.value("reference", "");
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<pipeline::SampleRecord> load_cascade_manifest(const std::string& path) {
  fs::path base = fs::path(path).parent_path();
  std::vector<pipeline::SampleRecord> samples;
  for (const nlohmann::json& j : read_jsonl(path)) {
    pipeline::SampleRecord s;
    s.id = j.value("id", "sample-" + std::to_string(samples.size()));
    if (j.contains("image_path"))
      s.image_path = (base / j["image_path"].get<std::string>()).string();
    s.chart_type = j.value("chart_type", "");
    s.title = j.value("title", "");
    if (j.contains("gt_csv"))
      s.gt_csv = j["gt_csv"].get<std::string>();
    else if (j.contains("gt_csv_path"))
      s.gt_csv = read_optional_file(base / j["gt_csv_path"].get<std::string>());
    s.question = j.value("question", "");
    s.answer = j.value("answer", "");
    samples.push_back(std::move(s));
  }
  return samples;
}

std::string slurp(const std::string& path) {
  return read_required_file(path, "file");
}

}  // namespace chartkit::manifest
