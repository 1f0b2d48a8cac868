#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace chartkit::pipeline {

// One benchmark sample as listed in a cascade manifest. Ground-truth fields
// are optional; stub backends and golden mode read them, network backends
// only need the image.
struct SampleRecord {
  std::string id;
  std::string image_path;
  std::string chart_type;
  std::string title;
  std::string gt_csv;
  std::string question;
  std::string answer;
};

// The intermediate bundle the perception stage hands to cognition.
struct ChartRepresentation {
  std::string title;
  std::string chart_type;
  std::string csv;
  // Set when the csv does not parse; degraded representations still flow
  // downstream, mirroring real prediction errors.
  bool degraded = false;
};

struct BackendTimeout : std::runtime_error {
  explicit BackendTimeout(const std::string& msg) : std::runtime_error(msg) {}
};

struct BackendMalformedResponse : std::runtime_error {
  explicit BackendMalformedResponse(const std::string& msg)
      : std::runtime_error(msg) {}
};

// Perception backend: image in, (title, type, csv) out.
class ExtractorBackend {
 public:
  virtual ~ExtractorBackend() = default;
  virtual ChartRepresentation extract(const SampleRecord& sample,
                                      std::size_t max_new_tokens) = 0;
};

// Cognition backend: prompt in, generated text out.
class ReasonerBackend {
 public:
  virtual ~ReasonerBackend() = default;
  virtual std::string reason(const std::string& prompt,
                             std::size_t max_new_tokens) = 0;
};

struct TransportConfig {
  int timeout_ms = 30000;
  int retries = 0;  // extra attempts after the first
};

// HTTP transport. Requests are JSON posts: the extractor sends
// {"image_b64": ..., "max_new_tokens": N} and expects
// {"title": ..., "type": ..., "csv": ...}; the reasoner sends
// {"prompt": ..., "max_new_tokens": N} and expects {"text": ...}.
class HttpExtractor : public ExtractorBackend {
 public:
  HttpExtractor(std::string base_url, std::string path = "/extract",
                TransportConfig config = {});
  ChartRepresentation extract(const SampleRecord& sample,
                              std::size_t max_new_tokens) override;

 private:
  std::string base_url_, path_;
  TransportConfig config_;
};

class HttpReasoner : public ReasonerBackend {
 public:
  HttpReasoner(std::string base_url, std::string path = "/generate",
               TransportConfig config = {});
  std::string reason(const std::string& prompt,
                     std::size_t max_new_tokens) override;

 private:
  std::string base_url_, path_;
  TransportConfig config_;
};

// Subprocess transport speaking the same JSON contract over stdin/stdout:
// one request object in, one response object out, process per call.
class SubprocessExtractor : public ExtractorBackend {
 public:
  SubprocessExtractor(std::string command, TransportConfig config = {});
  ChartRepresentation extract(const SampleRecord& sample,
                              std::size_t max_new_tokens) override;

 private:
  std::string command_;
  TransportConfig config_;
};

class SubprocessReasoner : public ReasonerBackend {
 public:
  SubprocessReasoner(std::string command, TransportConfig config = {});
  std::string reason(const std::string& prompt,
                     std::size_t max_new_tokens) override;

 private:
  std::string command_;
  TransportConfig config_;
};

// Runs `command` with `input` on stdin; returns captured stdout. Throws
// BackendTimeout past the deadline and BackendMalformedResponse on nonzero
// exit.
std::string run_subprocess(const std::string& command, const std::string& input,
                           int timeout_ms);

std::string base64_encode(std::string_view bytes);

// ---------------------------------------------------------------------------
// In-process stubs. They double as offline CLI backends and as test fixtures
// with call counters.
// ---------------------------------------------------------------------------

// Returns the sample's ground truth verbatim.
class PerfectExtractor : public ExtractorBackend {
 public:
  ChartRepresentation extract(const SampleRecord& sample,
                              std::size_t max_new_tokens) override;
  int calls() const { return calls_.load(); }

 private:
  std::atomic<int> calls_{0};
};

// Ground truth with a seeded fraction of numeric cells corrupted; every
// corrupted value moves by well over the 5% answer margin.
class CorruptingExtractor : public ExtractorBackend {
 public:
  CorruptingExtractor(double corruption_rate, std::uint64_t seed)
      : rate_(corruption_rate), seed_(seed) {}
  ChartRepresentation extract(const SampleRecord& sample,
                              std::size_t max_new_tokens) override;
  int calls() const { return calls_.load(); }

 private:
  double rate_;
  std::uint64_t seed_;
  std::atomic<int> calls_{0};
};

// Deterministic reasoner that actually reads the CSV inside its prompt and
// answers the restricted question grammar (cell lookup, column max/min,
// column sum). Non-QA prompts get a canned deterministic reply.
class OracleReasoner : public ReasonerBackend {
 public:
  std::string reason(const std::string& prompt,
                     std::size_t max_new_tokens) override;
  int calls() const { return calls_.load(); }
  const std::vector<std::size_t>& observed_budgets() const { return budgets_; }

 private:
  std::atomic<int> calls_{0};
  std::vector<std::size_t> budgets_;
  std::mutex mu_;
};

// Always times out; exercises per-run failure capture.
class TimeoutReasoner : public ReasonerBackend {
 public:
  std::string reason(const std::string&, std::size_t) override {
    throw BackendTimeout("stub timeout");
  }
};

// Question grammar understood by the oracle reasoner; fixtures generate
// questions and ground-truth answers with these helpers.
std::string lookup_question(const std::string& row, const std::string& col);
std::string max_question(const std::string& col);
std::string min_question(const std::string& col);
std::string sum_question(const std::string& col);

// Shortest clean rendering shared by answer generation and the oracle, so
// golden-mode answers compare exactly.
std::string format_answer_number(double value);

// Computes the ground-truth answer for one of the grammar's questions from
// CSV text; empty string when unanswerable.
std::string answer_from_csv(const std::string& question, const std::string& csv);

}  // namespace chartkit::pipeline
