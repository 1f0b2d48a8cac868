#pragma once

#include <chrono>
#include <condition_variable>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "chartkit/llm_client.hpp"
#include "chartkit/router.hpp"

namespace chartkit::judge {

using JudgeUnavailable = BackendUnavailable;

struct UnparseableVerdict : std::runtime_error {
  explicit UnparseableVerdict(const std::string& msg) : std::runtime_error(msg) {}
};

struct MissingSlotError : std::runtime_error {
  explicit MissingSlotError(const std::string& slot)
      : std::runtime_error("unfilled rubric slot: " + slot) {}
};

struct JudgeRequest {
  router::TaskKind task = router::TaskKind::description;
  std::map<std::string, std::string> payload;  // slot name -> value
  std::string rubric_id;
};

struct JudgeScore {
  int score = 0;  // 0..5
  std::string rationale;
  std::string raw_response;
};

// Editable rubric templates with {slot} markers. Ships with defaults for
// description, summarization, redrawing and qa_fallback; load() replaces a
// rubric from a text file.
class RubricRegistry {
 public:
  static RubricRegistry defaults();

  void set(const std::string& rubric_id, std::string body);
  // Reads <dir>/<rubric_id>.txt for every default rubric id present there.
  void load_dir(const std::string& dir);
  const std::string& get(const std::string& rubric_id) const;
  bool has(const std::string& rubric_id) const;

  // Renders a rubric with the payload; throws MissingSlotError when a
  // marker stays unfilled.
  std::string render(const JudgeRequest& request) const;

 private:
  std::map<std::string, std::string> rubrics_;
};

struct JudgeConfig {
  RetryPolicy retry;
  int rate_per_sec = 0;     // 0 disables the rate ceiling
  int max_in_flight = 0;    // 0 disables the bound
};

// Scores one candidate on the 0-5 scale. Renders the rubric, submits it to
// the backend (retrying with exponential backoff), and parses the first
// integer token in 0..5 from the response. When no score is found the judge
// is re-asked once with a stricter instruction before UnparseableVerdict.
class Judge {
 public:
  Judge(ChatClient& client, RubricRegistry rubrics, JudgeConfig config = {},
        AuditLog* audit = nullptr);

  JudgeScore score(const JudgeRequest& request, const std::string& sample_id = "");

 private:
  std::string submit(const std::string& prompt, const std::string& sample_id);

  ChatClient& client_;
  RubricRegistry rubrics_;
  JudgeConfig config_;
  AuditLog* audit_;

  std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  std::chrono::steady_clock::time_point next_slot_{};
};

// Exposed for tests: first integer token in 0..5, if any.
std::optional<int> parse_score(std::string_view response);

JudgeScore judge_score(const JudgeRequest& request, Judge& judge,
                       const std::string& sample_id = "");

}  // namespace chartkit::judge
