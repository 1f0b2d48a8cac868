#include "chartkit/llm_client.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace chartkit {

HttpChatClient::HttpChatClient(HttpChatConfig config) : config_(std::move(config)) {
  if (config_.api_key.empty()) {
    if (const char* env = std::getenv("CHARTKIT_API_KEY")) config_.api_key = env;
  }
}

std::string HttpChatClient::complete(const std::string& prompt) {
  httplib::Client client(config_.base_url);
  client.set_connection_timeout(0, config_.timeout_ms * 1000LL);
  client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
  client.set_write_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);

  nlohmann::json body = {
      {"model", config_.model},
      {"temperature", config_.temperature},
      {"messages", {{{"role", "user"}, {"content", prompt}}}},
  };
  if (config_.max_tokens > 0) body["max_tokens"] = config_.max_tokens;

  httplib::Headers headers;
  if (!config_.api_key.empty())
    headers.emplace("Authorization", "Bearer " + config_.api_key);

  auto res = client.Post(config_.path, headers, body.dump(), "application/json");
  if (!res)
    throw BackendUnavailable("chat endpoint unreachable: " +
                             httplib::to_string(res.error()));
  if (res->status != 200)
    throw BackendUnavailable("chat endpoint returned status " +
                             std::to_string(res->status));
  try {
    nlohmann::json j = nlohmann::json::parse(res->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendUnavailable(std::string("malformed chat response: ") + e.what());
  }
}

std::string retry_with_backoff(const RetryPolicy& policy,
                               const std::function<std::string()>& fn) {
  int backoff = policy.initial_backoff_ms;
  for (int attempt = 0;; ++attempt) {
    try {
      return fn();
    } catch (const BackendUnavailable&) {
      if (attempt >= policy.max_retries) throw;
      if (backoff > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
  }
}

void AuditLog::record(const std::string& sample_id, const std::string& prompt,
                      const std::string& response) {
  if (!enabled()) return;
  nlohmann::json line = {
      {"sample_id", sample_id},
      {"prompt", prompt},
      {"prompt_hash", hash_hex(fnv1a_hash(prompt))},
      {"response", response},
  };
  std::lock_guard<std::mutex> lock(mu_);
  std::ofstream out(path_, std::ios::app);
  out << line.dump() << "\n";
}

std::uint64_t fnv1a_hash(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace chartkit
