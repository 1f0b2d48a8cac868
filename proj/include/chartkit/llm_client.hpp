#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>

namespace chartkit {

struct BackendUnavailable : std::runtime_error {
  explicit BackendUnavailable(const std::string& msg) : std::runtime_error(msg) {}
};

// Minimal chat-completion client: one prompt in, one completion out.
// A single call makes a single attempt; retry policy belongs to callers.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

struct HttpChatConfig {
  std::string base_url;  // e.g. "https://api.example.com"
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4";
  std::string api_key;   // falls back to $CHARTKIT_API_KEY
  double temperature = 0.0;
  int timeout_ms = 60000;
  int max_tokens = 0;    // 0 means unset
};

// Chat-completion-style JSON endpoint over HTTP(S).
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(HttpChatConfig config);
  std::string complete(const std::string& prompt) override;

 private:
  HttpChatConfig config_;
};

// In-process stub driven by a callback; the workhorse of offline tests.
class ScriptedChatClient : public ChatClient {
 public:
  explicit ScriptedChatClient(std::function<std::string(const std::string&)> fn)
      : fn_(std::move(fn)) {}
  std::string complete(const std::string& prompt) override {
    std::lock_guard<std::mutex> lock(mu_);
    ++calls_;
    return fn_(prompt);
  }
  int calls() const { return calls_; }

 private:
  std::function<std::string(const std::string&)> fn_;
  std::mutex mu_;
  int calls_ = 0;
};

struct RetryPolicy {
  int max_retries = 3;
  int initial_backoff_ms = 250;  // doubles per retry; 0 disables sleeping
};

// Runs fn, retrying BackendUnavailable with exponential backoff. Rethrows
// after the final attempt.
std::string retry_with_backoff(const RetryPolicy& policy,
                               const std::function<std::string()>& fn);

// Thread-safe JSON-lines audit sink recording every backend exchange.
class AuditLog {
 public:
  AuditLog() = default;  // disabled
  explicit AuditLog(std::string path) : path_(std::move(path)) {}

  bool enabled() const { return !path_.empty(); }
  void record(const std::string& sample_id, const std::string& prompt,
              const std::string& response);

 private:
  std::string path_;
  std::mutex mu_;
};

std::uint64_t fnv1a_hash(std::string_view bytes);
std::string hash_hex(std::uint64_t h);

}  // namespace chartkit
