#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "chartkit/judge.hpp"
#include "chartkit/pipeline.hpp"
#include "chartkit/router.hpp"
#include "chartkit/scrm.hpp"

namespace chartkit::config {

// Backend endpoint selection for the cascade. "http" talks to `url`,
// "subprocess" runs `command`, and the stub kinds run in process:
// stub-perfect / stub-corrupt extractors, oracle reasoner.
struct EndpointConfig {
  std::string kind = "stub-perfect";
  std::string url;
  std::string command;
  double corruption_rate = 0.3;  // stub-corrupt only
  std::uint64_t seed = 1;       // stub-corrupt only
};

struct BackendsConfig {
  EndpointConfig extractor;
  EndpointConfig reasoner = [] {
    EndpointConfig e;
    e.kind = "oracle";
    return e;
  }();
  int timeout_ms = 30000;
  int retries = 0;
  std::size_t concurrency = 2;
};

struct JudgeSection {
  HttpChatConfig http;
  RetryPolicy retry;
  int rate_per_sec = 0;
  int max_in_flight = 0;
  std::string rubric_dir;
  std::string audit_path;
  bool use_stub = false;     // scripted judge for offline runs
  int stub_score = 5;        // score the stub echoes
};

struct GenerationSection {
  std::string pools_path;
  std::string templates_dir;
  std::string audit_path;
};

// The whole effective configuration tree. Defaults reproduce the pinned
// evaluation protocol; a config file overrides individual keys.
struct Config {
  int version = 1;
  scrm::ScrmConfig scrm;
  pipeline::TokenBudget budgets;
  router::TrainConfig adapter;
  JudgeSection judge;
  BackendsConfig backends;
  GenerationSection generation;
  std::string synonyms_path;
  std::string model_name = "model";

  // Canonical JSON of the effective configuration; hashed into provenance.
  nlohmann::json effective() const;

  static Config defaults() { return {}; }
  // Defaults overlaid with the file's keys.
  static Config load(const std::string& path);
  static Config from_json(const nlohmann::json& j);
};

}  // namespace chartkit::config
