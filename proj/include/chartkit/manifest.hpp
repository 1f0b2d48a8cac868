#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "chartkit/backends.hpp"
#include "chartkit/scrm.hpp"

namespace chartkit::manifest {

struct ManifestError : std::runtime_error {
  explicit ManifestError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structural-extraction manifest: JSON lines with
// {id, chart_type, pred_csv_path, gt_csv_path}. Ground-truth files must be
// readable; a missing prediction file yields an empty prediction, which
// scores zero instead of aborting.
std::vector<scrm::ScrmSample> load_scrm_manifest(const std::string& path);

// Answer manifest: JSON lines with {id, chart_type, pred, gt}.
struct AnswerSample {
  std::string id;
  ChartTypeId chart_type = ChartTypeId::bar;
  std::string pred;
  std::string gt;
};

std::vector<AnswerSample> load_answer_manifest(const std::string& path);

// Judge manifest: JSON lines with
// {id, chart_type, title, gt_csv|gt_csv_path, candidate, question?, reference?}.
struct JudgeSample {
  std::string id;
  ChartTypeId chart_type = ChartTypeId::bar;
  std::string title;
  std::string gt_csv;
  std::string candidate;
  std::string question;
  std::string reference;
};

std::vector<JudgeSample> load_judge_manifest(const std::string& path);

// Cascade manifest: JSON lines with
// {id, image_path?, chart_type?, title?, gt_csv|gt_csv_path?, question?, answer?}.
std::vector<pipeline::SampleRecord> load_cascade_manifest(const std::string& path);

// Whole-file bytes, for dataset hashing. Throws ManifestError.
std::string slurp(const std::string& path);

}  // namespace chartkit::manifest
