#include "chartkit/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <thread>

#include "chartkit/table.hpp"

namespace chartkit::pipeline {

std::string_view source_name(CsvSource s) {
  return s == CsvSource::golden ? "golden" : "predicted";
}

std::string_view fixed_task_instruction(router::TaskKind task) {
  switch (task) {
    case router::TaskKind::question_answering:
      return "Answer the question using only the chart data below. Reply "
             "with the answer only.";
    case router::TaskKind::description:
      return "Write a detailed description of the chart represented by the "
             "data below, covering every series and notable value.";
    case router::TaskKind::summarization:
      return "Summarize the key trends of the chart represented by the data "
             "below in a few sentences.";
    case router::TaskKind::redrawing:
      return "Write Python code that redraws the chart represented by the "
             "data below, preserving its chart type.";
    default:
      return "";
  }
}

std::string build_cognition_prompt(const ChartRepresentation& rep,
                                   router::TaskKind task,
                                   const std::optional<std::string>& user_question) {
  if (!router::is_cognition_task(task))
    throw std::invalid_argument("not a cognition task: " +
                                std::string(router::task_name(task)));
  if (task == router::TaskKind::question_answering &&
      (!user_question || user_question->empty()))
    throw MissingQuestionError();

  std::string prompt(fixed_task_instruction(task));
  prompt += "\n\n";
  prompt += "Title: " + rep.title + "\n";
  prompt += "Type: " + rep.chart_type + "\n";
  prompt += "Data:\n" + rep.csv;
  if (prompt.back() != '\n') prompt.push_back('\n');
  if (task == router::TaskKind::question_answering)
    prompt += "\nQuestion: " + *user_question + "\n";
  return prompt;
}

std::string default_instruction(router::TaskKind task, const SampleRecord& sample) {
  switch (task) {
    case router::TaskKind::structural_extraction:
      return "Convert this chart into a table.";
    case router::TaskKind::title_extraction:
      return "What is the title of this chart?";
    case router::TaskKind::type_classification:
      return "What type of chart is this?";
    case router::TaskKind::question_answering:
      return sample.question;
    case router::TaskKind::description:
      return "Describe this chart in detail.";
    case router::TaskKind::summarization:
      return "Summarize this chart.";
    case router::TaskKind::redrawing:
      return "Write python code to recreate this chart.";
    case router::TaskKind::out_of_scope:
      return "Translate this paragraph into French.";
  }
  return "";
}

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_us(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start)
      .count();
}

}  // namespace

PipelineRun run_sample(const SampleRecord& sample, const std::string& instruction,
                       const router::AdapterModel& adapter, Backends& backends,
                       CsvSource mode) {
  PipelineRun run;
  run.sample_id = sample.id;
  run.instruction = instruction;

  auto t0 = Clock::now();
  auto [task, confidence] = adapter.classify(instruction);
  run.timings.classify_us = elapsed_us(t0);
  run.task = task;
  run.confidence = confidence;
  run.plan = router::route(task);

  if (run.plan == router::DecoderPlan::reject) {
    run.rejected = true;
    run.output =
        "This request is outside the supported chart tasks; nothing was run.";
    return run;
  }

  // Perception tasks read at their own budget; cognition needs the full
  // structural extraction, so the extractor always gets at least that cap.
  std::size_t extract_budget =
      router::is_perception_task(task)
          ? backends.budgets.of(task)
          : backends.budgets.of(router::TaskKind::structural_extraction);

  auto t1 = Clock::now();
  try {
    run.representation = backends.extractor->extract(sample, extract_budget);
  } catch (const BackendTimeout& e) {
    run.timings.extract_us = elapsed_us(t1);
    run.error = std::string("extractor timeout: ") + e.what();
    return run;
  } catch (const BackendMalformedResponse& e) {
    run.timings.extract_us = elapsed_us(t1);
    run.error = std::string("extractor malformed response: ") + e.what();
    return run;
  }
  run.timings.extract_us = elapsed_us(t1);

  if (mode == CsvSource::golden && !sample.gt_csv.empty()) {
    run.representation.csv = sample.gt_csv;
    run.source = CsvSource::golden;
  } else {
    run.source = CsvSource::predicted;
  }
  try {
    parse_csv(run.representation.csv);
    run.representation.degraded = false;
  } catch (const CsvError&) {
    run.representation.degraded = true;
  }

  if (run.plan == router::DecoderPlan::base_only) {
    switch (task) {
      case router::TaskKind::structural_extraction:
        run.output = run.representation.csv;
        break;
      case router::TaskKind::title_extraction:
        run.output = run.representation.title;
        break;
      default:
        run.output = run.representation.chart_type;
        break;
    }
    return run;
  }

  std::optional<std::string> question;
  if (task == router::TaskKind::question_answering) {
    if (sample.question.empty()) {
      run.error = "missing question for QA sample";
      return run;
    }
    question = sample.question;
  }
  std::string prompt;
  try {
    prompt = build_cognition_prompt(run.representation, task, question);
  } catch (const MissingQuestionError& e) {
    run.error = e.what();
    return run;
  }

  auto t2 = Clock::now();
  try {
    run.output = backends.reasoner->reason(prompt, backends.budgets.of(task));
  } catch (const BackendTimeout& e) {
    run.error = std::string("reasoner timeout: ") + e.what();
  } catch (const BackendMalformedResponse& e) {
    run.error = std::string("reasoner malformed response: ") + e.what();
  }
  run.timings.reason_us = elapsed_us(t2);
  return run;
}

std::vector<PipelineRun> run_batch(const std::vector<SampleRecord>& manifest,
                                   const std::set<router::TaskKind>& tasks,
                                   const router::AdapterModel& adapter,
                                   Backends& backends, CsvSource mode,
                                   std::size_t concurrency) {
  if (manifest.empty()) throw EmptyManifestError();
  if (tasks.empty()) throw std::invalid_argument("no tasks selected");
  if (concurrency == 0) concurrency = 1;

  struct Job {
    std::size_t slot;
    const SampleRecord* sample;
    router::TaskKind task;
  };
  std::vector<Job> jobs;
  jobs.reserve(manifest.size() * tasks.size());
  std::size_t slot = 0;
  for (const SampleRecord& sample : manifest)
    for (router::TaskKind task : tasks) jobs.push_back({slot++, &sample, task});

  std::vector<PipelineRun> runs(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      runs[job.slot] = run_sample(*job.sample,
                                  default_instruction(job.task, *job.sample),
                                  adapter, backends, mode);
    }
  };

  if (concurrency == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    std::size_t n = std::min(concurrency, jobs.size());
    pool.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return runs;
}

}  // namespace chartkit::pipeline
