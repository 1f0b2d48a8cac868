// chartkit command-line front end: evaluation, routing, cascade runs,
// benchmark generation and validation.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "chartkit/cli_ops.hpp"
#include "chartkit/manifest.hpp"
#include "chartkit/report.hpp"

namespace {

using chartkit::cli::CmdResult;
using chartkit::cli::kExitInput;

struct GlobalOpts {
  std::string config_path;
  bool json = false;
  std::uint64_t seed = 7;
  std::size_t concurrency = 0;  // 0 keeps the config value
};

chartkit::config::Config load_config(const GlobalOpts& g) {
  chartkit::config::Config cfg = g.config_path.empty()
                                     ? chartkit::config::Config::defaults()
                                     : chartkit::config::Config::load(g.config_path);
  cfg.adapter.seed = g.seed;
  if (g.concurrency > 0) cfg.backends.concurrency = g.concurrency;
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int finish(const CmdResult& result, const GlobalOpts& g,
           const std::string& json_out, const std::string& md_out) {
  if (result.exit_code != 0) {
    std::cerr << "error: " << result.error << "\n";
    return result.exit_code;
  }
  if (!json_out.empty()) write_text(json_out, result.report.dump(2) + "\n");
  if (!md_out.empty() && !result.markdown.empty()) write_text(md_out, result.markdown);
  if (g.json)
    std::cout << result.report.dump(2) << "\n";
  else if (!result.markdown.empty())
    std::cout << result.markdown;
  else
    std::cout << result.report.dump(2) << "\n";
  return 0;
}

std::optional<chartkit::router::TaskKind> parse_task_arg(const std::string& name) {
  return chartkit::router::parse_task(name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chart evaluation and routing toolkit"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "configuration file (JSON)");
  app.add_flag("--json", g.json, "print machine-readable JSON to stdout");
  app.add_option("--seed", g.seed, "global seed")->capture_default_str();
  app.add_option("--concurrency", g.concurrency, "backend concurrency bound");

  // eval-se
  auto* eval_se = app.add_subcommand("eval-se", "score structural extraction");
  std::string se_manifest, se_json_out, se_md_out, se_model_name, se_ap_mode;
  bool se_case_insensitive = false;
  eval_se->add_option("--manifest", se_manifest, "JSONL manifest")->required();
  eval_se->add_option("--json-out", se_json_out, "write report JSON here");
  eval_se->add_option("--md-out", se_md_out, "write markdown table here");
  eval_se->add_option("--model-name", se_model_name, "row label for reports");
  eval_se->add_option("--ap-mode", se_ap_mode, "binary or mean_f1");
  eval_se->add_flag("--case-insensitive", se_case_insensitive,
                    "fold case before edit distance");

  // eval-answers
  auto* eval_ans = app.add_subcommand("eval-answers", "score QA/title/type answers");
  std::string ans_manifest, ans_task = "qa", ans_json_out, ans_md_out;
  bool ans_judge_fallback = false;
  eval_ans->add_option("--manifest", ans_manifest, "JSONL manifest")->required();
  eval_ans->add_option("--task", ans_task, "qa, title or type")->capture_default_str();
  eval_ans->add_option("--json-out", ans_json_out, "write report JSON here");
  eval_ans->add_option("--md-out", ans_md_out, "write markdown table here");
  eval_ans->add_flag("--judge-fallback", ans_judge_fallback,
                     "delegate unmatched QA answers to the judge");

  // judge
  auto* judge_cmd = app.add_subcommand("judge", "judge-score open-ended outputs");
  std::string judge_manifest, judge_task = "summarization", judge_json_out,
              judge_md_out;
  bool judge_stub = false;
  int judge_stub_score = 5;
  judge_cmd->add_option("--manifest", judge_manifest, "JSONL manifest")->required();
  judge_cmd->add_option("--task", judge_task,
                        "description, summarization or redrawing")
      ->capture_default_str();
  judge_cmd->add_option("--json-out", judge_json_out, "write report JSON here");
  judge_cmd->add_option("--md-out", judge_md_out, "write markdown table here");
  judge_cmd->add_flag("--stub", judge_stub, "use the offline stub judge");
  judge_cmd->add_option("--stub-score", judge_stub_score,
                        "score the stub judge returns")
      ->capture_default_str();

  // route
  auto* route_cmd = app.add_subcommand("route", "classify one instruction");
  std::string route_instruction, route_model;
  route_cmd->add_option("instruction", route_instruction, "user instruction")
      ->required();
  route_cmd->add_option("--model", route_model, "trained adapter model file")
      ->required();

  // train-adapter
  auto* train_cmd = app.add_subcommand("train-adapter", "train the instruction adapter");
  std::string train_out = "adapter.bin";
  std::size_t train_per_class = 875;
  train_cmd->add_option("--out", train_out, "model output path")->capture_default_str();
  train_cmd->add_option("--per-class", train_per_class,
                        "instructions generated per class")
      ->capture_default_str();

  // run-cascade
  auto* cascade_cmd = app.add_subcommand("run-cascade", "run the cascade pipeline");
  std::string cas_manifest, cas_tasks = "se", cas_mode = "predicted";
  std::string cas_model, cas_runs_out, cas_json_out;
  cascade_cmd->add_option("--manifest", cas_manifest, "JSONL manifest")->required();
  cascade_cmd->add_option("--tasks", cas_tasks,
                          "comma-separated tasks (se,title,type,qa,desc,summ,redraw)")
      ->capture_default_str();
  cascade_cmd->add_option("--mode", cas_mode, "predicted or golden")->capture_default_str();
  cascade_cmd->add_option("--model", cas_model, "trained adapter model file")
      ->required();
  cascade_cmd->add_option("--runs-out", cas_runs_out, "per-run JSONL output");
  cascade_cmd->add_option("--json-out", cas_json_out, "aggregate report JSON");

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "assemble generation prompts");
  std::size_t gen_count = 5;
  std::string gen_index, gen_json_out;
  bool gen_stub_client = false;
  gen_cmd->add_option("--count", gen_count, "number of samples")->capture_default_str();
  gen_cmd->add_option("--cognition-index", gen_index,
                      "bundle JSONL; switches to cognition prompts");
  gen_cmd->add_option("--json-out", gen_json_out, "write records here");
  gen_cmd->add_flag("--stub-client", gen_stub_client,
                    "submit to an offline echo client");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "format-validate bundles");
  std::string val_index, val_worksheet, val_json_out;
  validate_cmd->add_option("--index", val_index, "bundle JSONL index")->required();
  validate_cmd->add_option("--worksheet", val_worksheet,
                           "write the human-review worksheet here");
  validate_cmd->add_option("--json-out", val_json_out, "write validation JSON here");

  // report
  auto* report_cmd = app.add_subcommand("report", "render a report JSON to markdown");
  std::string rep_in, rep_md_out;
  report_cmd->add_option("--in", rep_in, "report JSON file")->required();
  report_cmd->add_option("--md-out", rep_md_out, "write markdown here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    chartkit::config::Config cfg = load_config(g);

    if (eval_se->parsed()) {
      if (!se_model_name.empty()) cfg.model_name = se_model_name;
      if (se_ap_mode == "mean_f1") cfg.scrm.ap_mode = chartkit::scrm::ApMode::mean_f1;
      if (se_case_insensitive) cfg.scrm.case_insensitive = true;
      return finish(chartkit::cli::cmd_eval_se(se_manifest, cfg), g, se_json_out,
                    se_md_out);
    }

    if (eval_ans->parsed()) {
      auto task = parse_task_arg(ans_task);
      if (!task) {
        std::cerr << "error: unknown task " << ans_task << "\n";
        return kExitInput;
      }
      return finish(chartkit::cli::cmd_eval_answers(ans_manifest, *task, cfg,
                                                    ans_judge_fallback),
                    g, ans_json_out, ans_md_out);
    }

    if (judge_cmd->parsed()) {
      auto task = parse_task_arg(judge_task);
      if (!task) {
        std::cerr << "error: unknown task " << judge_task << "\n";
        return kExitInput;
      }
      if (judge_stub) {
        cfg.judge.use_stub = true;
        cfg.judge.stub_score = judge_stub_score;
      }
      return finish(chartkit::cli::cmd_judge(judge_manifest, *task, cfg), g,
                    judge_json_out, judge_md_out);
    }

    if (route_cmd->parsed()) {
      chartkit::router::AdapterModel model =
          chartkit::router::AdapterModel::load(route_model);
      return finish(chartkit::cli::cmd_route(route_instruction, model), g, "", "");
    }

    if (train_cmd->parsed()) {
      return finish(chartkit::cli::cmd_train_adapter(cfg, train_per_class, train_out),
                    g, "", "");
    }

    if (cascade_cmd->parsed()) {
      std::set<chartkit::router::TaskKind> tasks;
      std::stringstream ss(cas_tasks);
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto task = parse_task_arg(item);
        if (!task) {
          std::cerr << "error: unknown task " << item << "\n";
          return kExitInput;
        }
        tasks.insert(*task);
      }
      chartkit::pipeline::CsvSource mode = cas_mode == "golden"
                                               ? chartkit::pipeline::CsvSource::golden
                                               : chartkit::pipeline::CsvSource::predicted;
      chartkit::router::AdapterModel model =
          chartkit::router::AdapterModel::load(cas_model);
      return finish(chartkit::cli::cmd_run_cascade(cas_manifest, tasks, mode, cfg,
                                                   model, cas_runs_out),
                    g, cas_json_out, "");
    }

    if (gen_cmd->parsed()) {
      std::unique_ptr<chartkit::ScriptedChatClient> stub;
      if (gen_stub_client) {
        stub = std::make_unique<chartkit::ScriptedChatClient>([](const std::string&) {
          return std::string(
              "Quarterly Revenue by Region\nRegion,Revenue\nNorth,120\n"
              "South,95\nEast,143\nWest,88\n");
        });
      }
      return finish(chartkit::cli::cmd_generate(gen_count, g.seed, gen_index, cfg,
                                                stub.get()),
                    g, gen_json_out, "");
    }

    if (validate_cmd->parsed()) {
      return finish(chartkit::cli::cmd_validate(val_index, val_worksheet), g,
                    val_json_out, "");
    }

    if (report_cmd->parsed()) {
      std::ifstream in(rep_in);
      if (!in) {
        std::cerr << "error: cannot open " << rep_in << "\n";
        return kExitInput;
      }
      nlohmann::json rep = nlohmann::json::parse(in);
      std::string md = chartkit::report::render_markdown(rep);
      if (!rep_md_out.empty()) write_text(rep_md_out, md);
      std::cout << md;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
