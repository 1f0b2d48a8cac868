#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "chartkit/backends.hpp"
#include "chartkit/router.hpp"

namespace chartkit::pipeline {

// Per-task generation caps, enforced on every backend call.
struct TokenBudget {
  std::array<std::size_t, router::kTaskCount> max_tokens = {
      1280,  // structural_extraction
      100,   // title_extraction
      20,    // type_classification
      100,   // question_answering
      512,   // description
      512,   // summarization
      1024,  // redrawing
      0,     // out_of_scope (never generates)
  };

  std::size_t of(router::TaskKind t) const {
    return max_tokens[static_cast<std::size_t>(t)];
  }
};

enum class CsvSource { predicted, golden };

std::string_view source_name(CsvSource s);

struct StageTimings {
  std::int64_t classify_us = 0;
  std::int64_t extract_us = 0;
  std::int64_t reason_us = 0;
};

struct PipelineRun {
  std::string sample_id;
  std::string instruction;
  router::TaskKind task = router::TaskKind::out_of_scope;
  double confidence = 0.0;
  router::DecoderPlan plan = router::DecoderPlan::reject;
  ChartRepresentation representation;
  CsvSource source = CsvSource::predicted;
  std::string output;
  bool rejected = false;
  std::string error;  // empty when the run succeeded
  StageTimings timings;
};

struct MissingQuestionError : std::runtime_error {
  MissingQuestionError() : std::runtime_error("QA prompt needs a user question") {}
};

struct EmptyManifestError : std::runtime_error {
  EmptyManifestError() : std::runtime_error("empty manifest") {}
};

struct Backends {
  ExtractorBackend* extractor = nullptr;
  ReasonerBackend* reasoner = nullptr;
  TokenBudget budgets;
};

// Deterministic cognition prompt: fixed task-specific instruction, then the
// representation serialized as title line, type line and CSV block, then the
// user question (QA only). Byte-identical for identical inputs.
std::string build_cognition_prompt(const ChartRepresentation& rep,
                                   router::TaskKind task,
                                   const std::optional<std::string>& user_question);

// The fixed instruction used for a cognition task instead of the raw user
// phrasing.
std::string_view fixed_task_instruction(router::TaskKind task);

// Canonical user instruction synthesized for batch runs of a task; QA uses
// the sample's own question.
std::string default_instruction(router::TaskKind task, const SampleRecord& sample);

// One cascade pass: classify the instruction, route it, and run the decoder
// plan. Backend faults are captured on the run, never thrown.
PipelineRun run_sample(const SampleRecord& sample, const std::string& instruction,
                       const router::AdapterModel& adapter, Backends& backends,
                       CsvSource mode);

// Runs every (sample, task) pair with bounded concurrency. Output order is
// manifest-major then task-major regardless of completion order.
std::vector<PipelineRun> run_batch(const std::vector<SampleRecord>& manifest,
                                   const std::set<router::TaskKind>& tasks,
                                   const router::AdapterModel& adapter,
                                   Backends& backends, CsvSource mode,
                                   std::size_t concurrency = 1);

}  // namespace chartkit::pipeline
