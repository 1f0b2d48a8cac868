#pragma once

#include <memory>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "chartkit/config.hpp"
#include "chartkit/llm_client.hpp"
#include "chartkit/pipeline.hpp"
#include "chartkit/router.hpp"

namespace chartkit::cli {

// Exit-code convention: 0 success, 2 usage/input error, 3 backend error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitBackend = 3;

struct CmdResult {
  int exit_code = kExitOk;
  nlohmann::json report;  // machine-readable payload
  std::string markdown;   // human table when the command has one
  std::string error;      // populated when exit_code != 0
};

CmdResult cmd_eval_se(const std::string& manifest_path, const config::Config& cfg);

// task is one of question_answering / title_extraction / type_classification.
// The judge fallback (QA only, off by default) delegates answers that fail
// both local rules; `judge_client` overrides the configured backend, which
// offline runs use to inject a stub.
CmdResult cmd_eval_answers(const std::string& manifest_path, router::TaskKind task,
                           const config::Config& cfg, bool judge_fallback = false,
                           ChatClient* judge_client = nullptr);

CmdResult cmd_judge(const std::string& manifest_path, router::TaskKind task,
                    const config::Config& cfg, ChatClient* judge_client = nullptr);

CmdResult cmd_route(const std::string& instruction,
                    const router::AdapterModel& model);

CmdResult cmd_train_adapter(const config::Config& cfg, std::size_t per_class,
                            const std::string& out_path);

// Runs the cascade over a manifest; per-run records (including timings) go
// to runs_out as JSON lines, the aggregate (timing-free, hence
// deterministic) report is returned.
CmdResult cmd_run_cascade(const std::string& manifest_path,
                          const std::set<router::TaskKind>& tasks,
                          pipeline::CsvSource mode, const config::Config& cfg,
                          const router::AdapterModel& adapter,
                          const std::string& runs_out);

CmdResult cmd_generate(std::size_t count, std::uint64_t seed,
                       const std::string& cognition_index,
                       const config::Config& cfg, ChatClient* client);

CmdResult cmd_validate(const std::string& index_path,
                       const std::string& worksheet_out);

// Backend factories shared by the CLI and tests.
std::unique_ptr<pipeline::ExtractorBackend> make_extractor(
    const config::EndpointConfig& endpoint, const pipeline::TransportConfig& t);
std::unique_ptr<pipeline::ReasonerBackend> make_reasoner(
    const config::EndpointConfig& endpoint, const pipeline::TransportConfig& t);

nlohmann::json run_to_json(const pipeline::PipelineRun& run);

}  // namespace chartkit::cli
