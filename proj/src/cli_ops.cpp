#include "chartkit/cli_ops.hpp"

#include <fstream>

#include "chartkit/answers.hpp"
#include "chartkit/benchgen.hpp"
#include "chartkit/judge.hpp"
#include "chartkit/manifest.hpp"
#include "chartkit/report.hpp"
#include "chartkit/scrm.hpp"

namespace chartkit::cli {

namespace {

CmdResult input_error(const std::string& msg) {
  CmdResult r;
  r.exit_code = kExitInput;
  r.error = msg;
  return r;
}

CmdResult backend_error(const std::string& msg) {
  CmdResult r;
  r.exit_code = kExitBackend;
  r.error = msg;
  return r;
}

answers::SynonymTable synonyms_for(const config::Config& cfg) {
  if (!cfg.synonyms_path.empty())
    return answers::SynonymTable::load(cfg.synonyms_path);
  return answers::SynonymTable::defaults();
}

}  // namespace

CmdResult cmd_eval_se(const std::string& manifest_path, const config::Config& cfg) {
  std::vector<scrm::ScrmSample> samples;
  std::string manifest_bytes;
  try {
    manifest_bytes = manifest::slurp(manifest_path);
    samples = manifest::load_scrm_manifest(manifest_path);
  } catch (const manifest::ManifestError& e) {
    return input_error(e.what());
  }
  if (samples.empty()) return input_error("manifest has no samples");

  scrm::ScrmReport rep = scrm::scrm_evaluate(samples, cfg.scrm);
  report::Provenance prov = report::make_provenance(cfg.effective(), manifest_bytes);
  CmdResult out;
  out.report = report::scrm_report_json(rep, prov, cfg.model_name);
  out.markdown = report::scrm_report_markdown(rep, cfg.model_name);
  return out;
}

CmdResult cmd_eval_answers(const std::string& manifest_path, router::TaskKind task,
                           const config::Config& cfg, bool judge_fallback,
                           ChatClient* judge_client) {
  if (task != router::TaskKind::question_answering &&
      task != router::TaskKind::title_extraction &&
      task != router::TaskKind::type_classification)
    return input_error("eval-answers handles qa, title and type tasks");

  std::vector<manifest::AnswerSample> samples;
  std::string manifest_bytes;
  try {
    manifest_bytes = manifest::slurp(manifest_path);
    samples = manifest::load_answer_manifest(manifest_path);
  } catch (const manifest::ManifestError& e) {
    return input_error(e.what());
  }
  if (samples.empty()) return input_error("manifest has no samples");

  answers::SynonymTable synonyms = synonyms_for(cfg);

  std::unique_ptr<ScriptedChatClient> stub;
  std::unique_ptr<HttpChatClient> http;
  std::unique_ptr<judge::Judge> fallback_judge;
  if (judge_fallback && task == router::TaskKind::question_answering) {
    ChatClient* client = judge_client;
    if (!client && cfg.judge.use_stub) {
      stub = std::make_unique<ScriptedChatClient>(
          [score = cfg.judge.stub_score](const std::string&) {
            return std::to_string(score);
          });
      client = stub.get();
    }
    if (!client) {
      if (cfg.judge.http.base_url.empty())
        return backend_error("judge fallback requested but no judge configured");
      http = std::make_unique<HttpChatClient>(cfg.judge.http);
      client = http.get();
    }
    judge::RubricRegistry rubrics = judge::RubricRegistry::defaults();
    if (!cfg.judge.rubric_dir.empty()) rubrics.load_dir(cfg.judge.rubric_dir);
    judge::JudgeConfig jcfg;
    jcfg.retry = cfg.judge.retry;
    jcfg.rate_per_sec = cfg.judge.rate_per_sec;
    jcfg.max_in_flight = cfg.judge.max_in_flight;
    fallback_judge = std::make_unique<judge::Judge>(*client, std::move(rubrics), jcfg);
  }

  report::Classwise cw;
  nlohmann::json per_sample = nlohmann::json::array();
  std::string metric;
  for (const auto& s : samples) {
    bool correct = false;
    std::string method;
    switch (task) {
      case router::TaskKind::question_answering: {
        metric = "gpt_acc";
        answers::Verdict v = answers::gpt_acc_local(s.pred, s.gt);
        correct = v.correct;
        method = answers::method_name(v.method);
        if (!correct && fallback_judge &&
            v.method == answers::Verdict::Method::string_exact) {
          judge::JudgeRequest req;
          req.task = router::TaskKind::question_answering;
          req.rubric_id = "qa_fallback";
          req.payload = {{"gt_csv", ""},
                         {"title", ""},
                         {"chart_type", std::string(chart_type_name(s.chart_type))},
                         {"question", ""},
                         {"reference", s.gt},
                         {"candidate", s.pred}};
          try {
            judge::JudgeScore score = fallback_judge->score(req, s.id);
            correct = score.score >= 4;
            method = "judge_delegated";
          } catch (const BackendUnavailable& e) {
            return backend_error(e.what());
          } catch (const judge::UnparseableVerdict&) {
            // An unreadable judge reply leaves the local verdict standing.
          }
        }
        break;
      }
      case router::TaskKind::title_extraction:
        metric = "em";
        correct = answers::exact_match(s.pred, s.gt, answers::MatchField::title);
        method = "string_exact";
        break;
      default:
        metric = "em";
        correct = answers::exact_match(s.pred, s.gt, answers::MatchField::chart_type,
                                       synonyms);
        method = "synonym_exact";
        break;
    }
    cw.add(s.chart_type, correct ? 1.0 : 0.0);
    per_sample.push_back({{"id", s.id}, {"correct", correct}, {"method", method}});
  }

  report::Provenance prov = report::make_provenance(cfg.effective(), manifest_bytes);
  CmdResult out;
  out.report = report::classwise_report_json(
      cw, prov, std::string(router::task_name(task)), metric, cfg.model_name, 100.0);
  out.report["per_sample"] = per_sample;
  out.markdown = report::classwise_report_markdown(
      cw, std::string(router::task_name(task)), metric, cfg.model_name, 100.0);
  return out;
}

CmdResult cmd_judge(const std::string& manifest_path, router::TaskKind task,
                    const config::Config& cfg, ChatClient* judge_client) {
  if (task != router::TaskKind::description &&
      task != router::TaskKind::summarization && task != router::TaskKind::redrawing)
    return input_error("judge handles description, summarization and redrawing");

  std::vector<manifest::JudgeSample> samples;
  std::string manifest_bytes;
  try {
    manifest_bytes = manifest::slurp(manifest_path);
    samples = manifest::load_judge_manifest(manifest_path);
  } catch (const manifest::ManifestError& e) {
    return input_error(e.what());
  }
  if (samples.empty()) return input_error("manifest has no samples");

  std::unique_ptr<ScriptedChatClient> stub;
  std::unique_ptr<HttpChatClient> http;
  ChatClient* client = judge_client;
  if (!client && cfg.judge.use_stub) {
    stub = std::make_unique<ScriptedChatClient>(
        [score = cfg.judge.stub_score](const std::string&) {
          return std::to_string(score);
        });
    client = stub.get();
  }
  if (!client) {
    if (cfg.judge.http.base_url.empty())
      return backend_error("no judge backend configured and no stub selected");
    http = std::make_unique<HttpChatClient>(cfg.judge.http);
    client = http.get();
  }

  judge::RubricRegistry rubrics = judge::RubricRegistry::defaults();
  if (!cfg.judge.rubric_dir.empty()) rubrics.load_dir(cfg.judge.rubric_dir);
  judge::JudgeConfig jcfg;
  jcfg.retry = cfg.judge.retry;
  jcfg.rate_per_sec = cfg.judge.rate_per_sec;
  jcfg.max_in_flight = cfg.judge.max_in_flight;
  AuditLog audit(cfg.judge.audit_path);
  judge::Judge j(*client, std::move(rubrics), jcfg,
                 audit.enabled() ? &audit : nullptr);

  const std::string rubric_id(router::task_name(task));

  report::Classwise cw;
  nlohmann::json per_sample = nlohmann::json::array();
  for (const auto& s : samples) {
    judge::JudgeRequest req;
    req.task = task;
    req.rubric_id = rubric_id;
    req.payload = {{"gt_csv", s.gt_csv},
                   {"title", s.title},
                   {"chart_type", std::string(chart_type_name(s.chart_type))},
                   {"candidate", s.candidate}};
    try {
      judge::JudgeScore score = j.score(req, s.id);
      cw.add(s.chart_type, static_cast<double>(score.score));
      per_sample.push_back(
          {{"id", s.id}, {"score", score.score}, {"rationale", score.rationale}});
    } catch (const BackendUnavailable& e) {
      return backend_error(e.what());
    } catch (const judge::UnparseableVerdict& e) {
      return backend_error(e.what());
    }
  }

  report::Provenance prov = report::make_provenance(cfg.effective(), manifest_bytes);
  CmdResult out;
  out.report = report::classwise_report_json(
      cw, prov, std::string(router::task_name(task)), "gpt_score", cfg.model_name,
      1.0);
  out.report["per_sample"] = per_sample;
  out.markdown = report::classwise_report_markdown(
      cw, std::string(router::task_name(task)), "gpt_score", cfg.model_name, 1.0);
  return out;
}

CmdResult cmd_route(const std::string& instruction,
                    const router::AdapterModel& model) {
  auto [task, confidence] = model.classify(instruction);
  CmdResult out;
  out.report = {
      {"instruction", instruction},
      {"task", std::string(router::task_name(task))},
      {"plan", std::string(router::plan_name(router::route(task)))},
      {"confidence", confidence},
  };
  return out;
}

CmdResult cmd_train_adapter(const config::Config& cfg, std::size_t per_class,
                            const std::string& out_path) {
  std::vector<router::LabeledInstruction> corpus =
      router::generate_instruction_corpus(cfg.adapter.seed, per_class);
  router::AdapterModel model;
  try {
    model = router::train_adapter(corpus, cfg.adapter);
  } catch (const router::DegenerateCorpusError& e) {
    return input_error(e.what());
  }
  if (!out_path.empty()) model.save(out_path);
  CmdResult out;
  out.report = {
      {"corpus_size", corpus.size()},
      {"per_class", per_class},
      {"seed", cfg.adapter.seed},
      {"epochs", model.meta().epochs},
      {"train_samples", model.meta().train_samples},
      {"holdout_samples", model.meta().holdout_samples},
      {"validation_accuracy", model.meta().validation_accuracy},
      {"model_path", out_path},
  };
  return out;
}

std::unique_ptr<pipeline::ExtractorBackend> make_extractor(
    const config::EndpointConfig& endpoint, const pipeline::TransportConfig& t) {
  if (endpoint.kind == "http")
    return std::make_unique<pipeline::HttpExtractor>(endpoint.url, "/extract", t);
  if (endpoint.kind == "subprocess")
    return std::make_unique<pipeline::SubprocessExtractor>(endpoint.command, t);
  if (endpoint.kind == "stub-corrupt")
    return std::make_unique<pipeline::CorruptingExtractor>(endpoint.corruption_rate,
                                                           endpoint.seed);
  if (endpoint.kind == "stub-perfect")
    return std::make_unique<pipeline::PerfectExtractor>();
  throw std::invalid_argument("unknown extractor kind: " + endpoint.kind);
}

std::unique_ptr<pipeline::ReasonerBackend> make_reasoner(
    const config::EndpointConfig& endpoint, const pipeline::TransportConfig& t) {
  if (endpoint.kind == "http")
    return std::make_unique<pipeline::HttpReasoner>(endpoint.url, "/generate", t);
  if (endpoint.kind == "subprocess")
    return std::make_unique<pipeline::SubprocessReasoner>(endpoint.command, t);
  if (endpoint.kind == "oracle")
    return std::make_unique<pipeline::OracleReasoner>();
  throw std::invalid_argument("unknown reasoner kind: " + endpoint.kind);
}

nlohmann::json run_to_json(const pipeline::PipelineRun& run) {
  return {
      {"sample_id", run.sample_id},
      {"instruction", run.instruction},
      {"task", std::string(router::task_name(run.task))},
      {"confidence", run.confidence},
      {"plan", std::string(router::plan_name(run.plan))},
      {"source", std::string(pipeline::source_name(run.source))},
      {"representation",
       {{"title", run.representation.title},
        {"type", run.representation.chart_type},
        {"csv", run.representation.csv},
        {"degraded", run.representation.degraded}}},
      {"output", run.output},
      {"rejected", run.rejected},
      {"error", run.error},
      {"timings_us",
       {{"classify", run.timings.classify_us},
        {"extract", run.timings.extract_us},
        {"reason", run.timings.reason_us}}},
  };
}

CmdResult cmd_run_cascade(const std::string& manifest_path,
                          const std::set<router::TaskKind>& tasks,
                          pipeline::CsvSource mode, const config::Config& cfg,
                          const router::AdapterModel& adapter,
                          const std::string& runs_out) {
  std::vector<pipeline::SampleRecord> manifest_records;
  std::string manifest_bytes;
  try {
    manifest_bytes = manifest::slurp(manifest_path);
    manifest_records = manifest::load_cascade_manifest(manifest_path);
  } catch (const manifest::ManifestError& e) {
    return input_error(e.what());
  }
  if (manifest_records.empty()) return input_error("manifest has no samples");
  if (tasks.empty()) return input_error("no tasks selected");

  pipeline::TransportConfig transport{cfg.backends.timeout_ms, cfg.backends.retries};
  std::unique_ptr<pipeline::ExtractorBackend> extractor;
  std::unique_ptr<pipeline::ReasonerBackend> reasoner;
  try {
    extractor = make_extractor(cfg.backends.extractor, transport);
    reasoner = make_reasoner(cfg.backends.reasoner, transport);
  } catch (const std::invalid_argument& e) {
    return input_error(e.what());
  }

  pipeline::Backends backends{extractor.get(), reasoner.get(), cfg.budgets};
  std::vector<pipeline::PipelineRun> runs = pipeline::run_batch(
      manifest_records, tasks, adapter, backends, mode, cfg.backends.concurrency);

  if (!runs_out.empty()) {
    std::ofstream out(runs_out);
    if (!out) return input_error("cannot write runs file: " + runs_out);
    for (const auto& run : runs) out << run_to_json(run).dump() << "\n";
  }

  // Aggregate report carries no timings, so identical inputs give identical
  // bytes (timestamp aside).
  std::map<std::string, std::size_t> per_task;
  std::size_t errors = 0, rejected = 0;
  std::string output_stream;
  for (const auto& run : runs) {
    per_task[std::string(router::task_name(run.task))] += 1;
    if (!run.error.empty()) ++errors;
    if (run.rejected) ++rejected;
    output_stream += run.output;
    output_stream.push_back('\x1e');
  }
  nlohmann::json per_task_json = nlohmann::json::object();
  for (const auto& [name, count] : per_task) per_task_json[name] = count;

  report::Provenance prov = report::make_provenance(cfg.effective(), manifest_bytes);
  CmdResult out;
  out.report = {
      {"kind", "cascade"},
      {"mode", std::string(pipeline::source_name(mode))},
      {"runs", runs.size()},
      {"per_task", per_task_json},
      {"errors", errors},
      {"rejected", rejected},
      {"outputs_hash", hash_hex(fnv1a_hash(output_stream))},
      {"provenance", report::provenance_json(prov)},
  };
  return out;
}

CmdResult cmd_generate(std::size_t count, std::uint64_t seed,
                       const std::string& cognition_index,
                       const config::Config& cfg, ChatClient* client) {
  benchgen::GenerationPools pools = cfg.generation.pools_path.empty()
                                        ? benchgen::GenerationPools::defaults()
                                        : benchgen::GenerationPools::load(
                                              cfg.generation.pools_path);
  benchgen::TemplateLibrary templates = benchgen::TemplateLibrary::defaults();
  if (!cfg.generation.templates_dir.empty())
    templates.load_dir(cfg.generation.templates_dir);

  AuditLog audit(cfg.generation.audit_path);
  AuditLog* audit_ptr = audit.enabled() ? &audit : nullptr;
  RetryPolicy retry;

  nlohmann::json records = nlohmann::json::array();
  try {
    if (cognition_index.empty()) {
      for (std::size_t i = 0; i < count; ++i) {
        auto [chart_type, topic] = benchgen::sample_pools(pools, seed + i);
        std::string prompt =
            benchgen::render_for(templates.get("perception"), pools, chart_type, topic);
        std::string completion =
            client ? benchgen::submit_generation(prompt, *client, retry, audit_ptr,
                                                 "gen-" + std::to_string(i))
                   : "";
        records.push_back({{"index", i},
                           {"chart_type", std::string(chart_type_name(chart_type))},
                           {"topic", topic},
                           {"prompt", prompt},
                           {"completion", completion}});
      }
    } else {
      benchgen::LoadResult loaded = benchgen::load_bundles(cognition_index);
      static constexpr const char* kCognitionTemplates[] = {
          "qa", "description", "summarization", "redrawing"};
      std::size_t emitted = 0;
      for (const benchgen::SampleBundle& b : loaded.bundles) {
        if (count > 0 && emitted >= count) break;
        if (!b.chart_type) continue;
        for (const char* tid : kCognitionTemplates) {
          std::string prompt = benchgen::render_for(
              templates.get(tid), pools, *b.chart_type, b.topic,
              {{"csv", b.csv}, {"title", b.title}});
          std::string completion =
              client ? benchgen::submit_generation(prompt, *client, retry, audit_ptr,
                                                   b.id + "/" + tid)
                     : "";
          records.push_back({{"id", b.id},
                             {"template", tid},
                             {"prompt", prompt},
                             {"completion", completion}});
        }
        ++emitted;
      }
    }
  } catch (const BackendUnavailable& e) {
    return backend_error(e.what());
  }

  CmdResult out;
  out.report = {{"count", records.size()}, {"records", records}};
  return out;
}

CmdResult cmd_validate(const std::string& index_path,
                       const std::string& worksheet_out) {
  benchgen::LoadResult loaded = benchgen::load_bundles(index_path);
  nlohmann::json per_bundle = nlohmann::json::array();
  std::size_t total_violations = loaded.violations.size();

  nlohmann::json load_violations = nlohmann::json::array();
  for (const auto& v : loaded.violations)
    load_violations.push_back({{"kind", std::string(benchgen::violation_name(v.kind))},
                               {"detail", v.detail}});

  for (const auto& bundle : loaded.bundles) {
    std::vector<benchgen::Violation> violations = benchgen::validate_format(bundle);
    total_violations += violations.size();
    nlohmann::json vj = nlohmann::json::array();
    for (const auto& v : violations)
      vj.push_back({{"kind", std::string(benchgen::violation_name(v.kind))},
                    {"detail", v.detail}});
    per_bundle.push_back({{"id", bundle.id}, {"violations", vj}});
  }

  if (!worksheet_out.empty()) {
    std::ofstream out(worksheet_out);
    if (!out) return input_error("cannot write worksheet: " + worksheet_out);
    out << benchgen::review_worksheet(loaded.bundles).dump(2) << "\n";
  }

  CmdResult out;
  out.report = {
      {"bundles", loaded.bundles.size()},
      {"load_violations", load_violations},
      {"per_bundle", per_bundle},
      {"total_violations", total_violations},
  };
  return out;
}

}  // namespace chartkit::cli
