#include "chartkit/config.hpp"

#include <fstream>

namespace chartkit::config {

namespace {

nlohmann::json regime_json(const scrm::ToleranceRegime& r) {
  return {{"j_thr", r.j_thr}, {"e_thr", r.e_thr}};
}

void read_regime(const nlohmann::json& j, scrm::ToleranceRegime& r) {
  if (j.contains("j_thr")) r.j_thr = j["j_thr"].get<std::size_t>();
  if (j.contains("e_thr")) r.e_thr = j["e_thr"].get<double>();
}

constexpr const char* kLevelKeys[3] = {"strict", "slight", "high"};

}  // namespace

nlohmann::json Config::effective() const {
  nlohmann::json tolerance;
  const char* diff_keys[2] = {"normal", "difficult"};
  for (std::size_t d = 0; d < 2; ++d) {
    nlohmann::json per_level;
    for (std::size_t l = 0; l < 3; ++l)
      per_level[kLevelKeys[l]] = regime_json(scrm.thresholds[d][l]);
    tolerance[diff_keys[d]] = per_level;
  }

  nlohmann::json budget_json;
  for (std::size_t k = 0; k < router::kTaskCount; ++k)
    budget_json[std::string(router::task_name(static_cast<router::TaskKind>(k)))] =
        budgets.max_tokens[k];

  return {
      {"version", version},
      {"model_name", model_name},
      {"scrm",
       {{"ap_mode", scrm.ap_mode == scrm::ApMode::binary ? "binary" : "mean_f1"},
        {"case_insensitive", scrm.case_insensitive},
        {"tolerance", tolerance}}},
      {"token_budgets", budget_json},
      {"adapter",
       {{"hidden", adapter.hidden},
        {"epochs", adapter.epochs},
        {"batch_size", adapter.batch_size},
        {"learning_rate", adapter.learning_rate},
        {"momentum", adapter.momentum},
        {"holdout_fraction", adapter.holdout_fraction},
        {"seed", adapter.seed}}},
      {"judge",
       {{"base_url", judge.http.base_url},
        {"path", judge.http.path},
        {"model", judge.http.model},
        {"temperature", judge.http.temperature},
        {"timeout_ms", judge.http.timeout_ms},
        {"max_retries", judge.retry.max_retries},
        {"backoff_ms", judge.retry.initial_backoff_ms},
        {"rate_per_sec", judge.rate_per_sec},
        {"max_in_flight", judge.max_in_flight},
        {"rubric_dir", judge.rubric_dir},
        {"audit_path", judge.audit_path},
        {"use_stub", judge.use_stub},
        {"stub_score", judge.stub_score}}},
      {"backends",
       {{"extractor",
         {{"kind", backends.extractor.kind},
          {"url", backends.extractor.url},
          {"command", backends.extractor.command},
          {"corruption_rate", backends.extractor.corruption_rate},
          {"seed", backends.extractor.seed}}},
        {"reasoner",
         {{"kind", backends.reasoner.kind},
          {"url", backends.reasoner.url},
          {"command", backends.reasoner.command}}},
        {"timeout_ms", backends.timeout_ms},
        {"retries", backends.retries},
        {"concurrency", backends.concurrency}}},
      {"generation",
       {{"pools_path", generation.pools_path},
        {"templates_dir", generation.templates_dir},
        {"audit_path", generation.audit_path}}},
      {"paths", {{"synonyms", synonyms_path}}},
  };
}

Config Config::from_json(const nlohmann::json& j) {
  Config c;
  c.version = j.value("version", c.version);
  c.model_name = j.value("model_name", c.model_name);

  if (j.contains("scrm")) {
    const auto& s = j["scrm"];
    if (s.contains("ap_mode"))
      c.scrm.ap_mode = s["ap_mode"].get<std::string>() == "mean_f1"
                           ? scrm::ApMode::mean_f1
                           : scrm::ApMode::binary;
    c.scrm.case_insensitive = s.value("case_insensitive", false);
    if (s.contains("tolerance")) {
      const char* diff_keys[2] = {"normal", "difficult"};
      for (std::size_t d = 0; d < 2; ++d) {
        if (!s["tolerance"].contains(diff_keys[d])) continue;
        for (std::size_t l = 0; l < 3; ++l) {
          if (s["tolerance"][diff_keys[d]].contains(kLevelKeys[l]))
            read_regime(s["tolerance"][diff_keys[d]][kLevelKeys[l]],
                        c.scrm.thresholds[d][l]);
        }
      }
    }
  }

  if (j.contains("token_budgets")) {
    for (std::size_t k = 0; k < router::kTaskCount; ++k) {
      std::string key(router::task_name(static_cast<router::TaskKind>(k)));
      if (j["token_budgets"].contains(key))
        c.budgets.max_tokens[k] = j["token_budgets"][key].get<std::size_t>();
    }
  }

  if (j.contains("adapter")) {
    const auto& a = j["adapter"];
    c.adapter.hidden = a.value("hidden", c.adapter.hidden);
    c.adapter.epochs = a.value("epochs", c.adapter.epochs);
    c.adapter.batch_size = a.value("batch_size", c.adapter.batch_size);
    c.adapter.learning_rate = a.value("learning_rate", c.adapter.learning_rate);
    c.adapter.momentum = a.value("momentum", c.adapter.momentum);
    c.adapter.holdout_fraction =
        a.value("holdout_fraction", c.adapter.holdout_fraction);
    c.adapter.seed = a.value("seed", c.adapter.seed);
  }

  if (j.contains("judge")) {
    const auto& jj = j["judge"];
    c.judge.http.base_url = jj.value("base_url", c.judge.http.base_url);
    c.judge.http.path = jj.value("path", c.judge.http.path);
    c.judge.http.model = jj.value("model", c.judge.http.model);
    c.judge.http.temperature = jj.value("temperature", c.judge.http.temperature);
    c.judge.http.timeout_ms = jj.value("timeout_ms", c.judge.http.timeout_ms);
    c.judge.retry.max_retries = jj.value("max_retries", c.judge.retry.max_retries);
    c.judge.retry.initial_backoff_ms =
        jj.value("backoff_ms", c.judge.retry.initial_backoff_ms);
    c.judge.rate_per_sec = jj.value("rate_per_sec", c.judge.rate_per_sec);
    c.judge.max_in_flight = jj.value("max_in_flight", c.judge.max_in_flight);
    c.judge.rubric_dir = jj.value("rubric_dir", c.judge.rubric_dir);
    c.judge.audit_path = jj.value("audit_path", c.judge.audit_path);
    c.judge.use_stub = jj.value("use_stub", c.judge.use_stub);
    c.judge.stub_score = jj.value("stub_score", c.judge.stub_score);
  }

  if (j.contains("backends")) {
    const auto& b = j["backends"];
    auto read_endpoint = [](const nlohmann::json& e, EndpointConfig& out) {
      out.kind = e.value("kind", out.kind);
      out.url = e.value("url", out.url);
      out.command = e.value("command", out.command);
      out.corruption_rate = e.value("corruption_rate", out.corruption_rate);
      out.seed = e.value("seed", out.seed);
    };
    if (b.contains("extractor")) read_endpoint(b["extractor"], c.backends.extractor);
    if (b.contains("reasoner")) read_endpoint(b["reasoner"], c.backends.reasoner);
    c.backends.timeout_ms = b.value("timeout_ms", c.backends.timeout_ms);
    c.backends.retries = b.value("retries", c.backends.retries);
    c.backends.concurrency = b.value("concurrency", c.backends.concurrency);
  }

  if (j.contains("generation")) {
    const auto& g = j["generation"];
    c.generation.pools_path = g.value("pools_path", c.generation.pools_path);
    c.generation.templates_dir = g.value("templates_dir", c.generation.templates_dir);
    c.generation.audit_path = g.value("audit_path", c.generation.audit_path);
  }

  if (j.contains("paths"))
    c.synonyms_path = j["paths"].value("synonyms", c.synonyms_path);

  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  return from_json(nlohmann::json::parse(in));
}

}  // namespace chartkit::config
