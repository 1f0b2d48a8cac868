#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "chartkit/answers.hpp"
#include "chartkit/pipeline.hpp"
#include "chartkit/table.hpp"
#include "support/test_support.hpp"

using namespace chartkit;
using namespace chartkit::pipeline;
using chartkit::router::AdapterModel;
using chartkit::router::TaskKind;

namespace {

const AdapterModel& adapter() {
  static AdapterModel model = [] {
    auto corpus = router::generate_instruction_corpus(7, 120);
    router::TrainConfig cfg;
    cfg.epochs = 12;
    cfg.seed = 7;
    return router::train_adapter(corpus, cfg);
  }();
  return model;
}

SampleRecord make_sample(const std::string& id, std::uint64_t seed) {
  testsupport::TableGen gen(seed);
  ChartTable t = gen.table(5, 3);
  SampleRecord s;
  s.id = id;
  s.chart_type = "bar";
  s.title = "Fixture " + id;
  s.gt_csv = serialize_csv(t);
  // A lookup question over a known cell.
  s.question = lookup_question(t.row_entities[0], t.col_entities[0]);
  s.answer = answer_from_csv(s.question, s.gt_csv);
  return s;
}

}  // namespace

TEST_CASE("token budget defaults match the per-task caps") {
  TokenBudget b;
  CHECK(b.of(TaskKind::structural_extraction) == 1280);
  CHECK(b.of(TaskKind::title_extraction) == 100);
  CHECK(b.of(TaskKind::type_classification) == 20);
  CHECK(b.of(TaskKind::question_answering) == 100);
  CHECK(b.of(TaskKind::description) == 512);
  CHECK(b.of(TaskKind::summarization) == 512);
  CHECK(b.of(TaskKind::redrawing) == 1024);
}

TEST_CASE("cognition prompts are deterministic and carry the fixed header") {
  ChartRepresentation rep{"My Title", "bar", "K,c\nr,1\n", false};
  std::string a = build_cognition_prompt(rep, TaskKind::summarization, std::nullopt);
  std::string b = build_cognition_prompt(rep, TaskKind::summarization, std::nullopt);
  CHECK(a == b);
  CHECK(a.find(fixed_task_instruction(TaskKind::summarization)) == 0);
  CHECK(a.find("Title: My Title\n") != std::string::npos);
  CHECK(a.find("Type: bar\n") != std::string::npos);
  CHECK(a.find("Data:\nK,c\nr,1\n") != std::string::npos);
  CHECK(a.find("Question:") == std::string::npos);

  std::string qa =
      build_cognition_prompt(rep, TaskKind::question_answering, "Which month peaked?");
  CHECK(qa.find("Question: Which month peaked?\n") != std::string::npos);
  CHECK(qa.ends_with("Question: Which month peaked?\n"));
}

TEST_CASE("QA prompts without a question are rejected") {
  ChartRepresentation rep{"t", "bar", "K,c\nr,1\n", false};
  CHECK_THROWS_AS(build_cognition_prompt(rep, TaskKind::question_answering, std::nullopt),
                  MissingQuestionError);
  CHECK_THROWS_AS(build_cognition_prompt(rep, TaskKind::structural_extraction,
                                         std::nullopt),
                  std::invalid_argument);
}

TEST_CASE("base-only runs return extractor fields and never call the reasoner") {
  SampleRecord sample = make_sample("s1", 42);
  PerfectExtractor extractor;
  OracleReasoner reasoner;
  Backends backends{&extractor, &reasoner, {}};

  PipelineRun se = run_sample(sample, "Convert this chart into a table.", adapter(),
                              backends, CsvSource::predicted);
  CHECK(se.task == TaskKind::structural_extraction);
  CHECK(se.plan == router::DecoderPlan::base_only);
  CHECK(se.output == sample.gt_csv);
  CHECK(se.error.empty());

  PipelineRun title = run_sample(sample, "What is the title of this chart?",
                                 adapter(), backends, CsvSource::predicted);
  CHECK(title.output == sample.title);

  PipelineRun type = run_sample(sample, "What type of chart is this?", adapter(),
                                backends, CsvSource::predicted);
  CHECK(type.output == "bar");

  CHECK(reasoner.calls() == 0);
  CHECK(extractor.calls() == 3);
}

TEST_CASE("out-of-scope instructions are rejected without backend calls") {
  SampleRecord sample = make_sample("s2", 43);
  PerfectExtractor extractor;
  OracleReasoner reasoner;
  Backends backends{&extractor, &reasoner, {}};

  PipelineRun run = run_sample(sample, "Translate this paragraph into French.",
                               adapter(), backends, CsvSource::predicted);
  CHECK(run.plan == router::DecoderPlan::reject);
  CHECK(run.rejected);
  CHECK(extractor.calls() == 0);
  CHECK(reasoner.calls() == 0);
}

TEST_CASE("QA through the oracle reasoner answers from the given CSV") {
  SampleRecord sample = make_sample("s3", 44);
  PerfectExtractor extractor;
  OracleReasoner reasoner;
  Backends backends{&extractor, &reasoner, {}};

  PipelineRun run =
      run_sample(sample, sample.question, adapter(), backends, CsvSource::predicted);
  CHECK(run.task == TaskKind::question_answering);
  CHECK(run.plan == router::DecoderPlan::base_then_auxiliary);
  CHECK(run.output == sample.answer);
  CHECK(reasoner.calls() == 1);
}

TEST_CASE("golden mode substitutes the ground-truth CSV") {
  SampleRecord sample = make_sample("s4", 45);
  CorruptingExtractor extractor(1.0, 99);  // corrupt every numeric cell
  OracleReasoner reasoner;
  Backends backends{&extractor, &reasoner, {}};

  PipelineRun predicted =
      run_sample(sample, sample.question, adapter(), backends, CsvSource::predicted);
  CHECK(predicted.source == CsvSource::predicted);
  CHECK_FALSE(predicted.output == sample.answer);

  PipelineRun golden =
      run_sample(sample, sample.question, adapter(), backends, CsvSource::golden);
  CHECK(golden.source == CsvSource::golden);
  CHECK(golden.output == sample.answer);
}

TEST_CASE("reasoner calls carry exactly the task budget") {
  SampleRecord sample = make_sample("s5", 46);
  PerfectExtractor extractor;
  OracleReasoner reasoner;
  Backends backends{&extractor, &reasoner, {}};

  run_sample(sample, sample.question, adapter(), backends, CsvSource::predicted);
  run_sample(sample, "Describe this chart in detail.", adapter(), backends,
             CsvSource::predicted);
  run_sample(sample, "Summarize this chart.", adapter(), backends,
             CsvSource::predicted);
  run_sample(sample, "Write python code to recreate this chart.", adapter(),
             backends, CsvSource::predicted);

  REQUIRE(reasoner.observed_budgets().size() == 4);
  CHECK(reasoner.observed_budgets()[0] == 100);   // QA
  CHECK(reasoner.observed_budgets()[1] == 512);   // description
  CHECK(reasoner.observed_budgets()[2] == 512);   // summarization
  CHECK(reasoner.observed_budgets()[3] == 1024);  // redrawing
}

TEST_CASE("backend faults are captured per run, not thrown") {
  SampleRecord sample = make_sample("s6", 47);
  PerfectExtractor extractor;
  TimeoutReasoner timeout;
  Backends backends{&extractor, &timeout, {}};

  PipelineRun run =
      run_sample(sample, sample.question, adapter(), backends, CsvSource::predicted);
  CHECK(run.error.find("timeout") != std::string::npos);
  CHECK(run.output.empty());
}

TEST_CASE("degraded representations still flow to cognition") {
  SampleRecord sample = make_sample("s7", 48);
  sample.gt_csv = "not,a\nvalid";  // ragged
  PerfectExtractor extractor;
  OracleReasoner reasoner;
  Backends backends{&extractor, &reasoner, {}};
  PipelineRun run = run_sample(sample, "Summarize this chart.", adapter(), backends,
                               CsvSource::predicted);
  CHECK(run.representation.degraded);
  CHECK(run.error.empty());
  CHECK_FALSE(run.output.empty());
}

TEST_CASE("run_batch keeps manifest order and isolates failures") {
  std::vector<SampleRecord> manifest;
  for (int i = 0; i < 6; ++i)
    manifest.push_back(make_sample("b" + std::to_string(i), 100 + i));

  PerfectExtractor extractor;
  OracleReasoner reasoner;
  Backends backends{&extractor, &reasoner, {}};

  std::set<TaskKind> tasks = {TaskKind::structural_extraction,
                              TaskKind::question_answering};
  auto runs = run_batch(manifest, tasks, adapter(), backends, CsvSource::predicted, 3);
  REQUIRE(runs.size() == 12);
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    CHECK(runs[2 * i].sample_id == manifest[i].id);
    CHECK(runs[2 * i].task == TaskKind::structural_extraction);
    CHECK(runs[2 * i].output == manifest[i].gt_csv);
    CHECK(runs[2 * i + 1].task == TaskKind::question_answering);
    CHECK(runs[2 * i + 1].output == manifest[i].answer);
  }

  // Concurrency never reorders output slots.
  auto runs_seq =
      run_batch(manifest, tasks, adapter(), backends, CsvSource::predicted, 1);
  REQUIRE(runs_seq.size() == runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    CHECK(runs_seq[i].sample_id == runs[i].sample_id);
    CHECK(runs_seq[i].output == runs[i].output);
  }
}

TEST_CASE("a QA sample without a question records an error, others unaffected") {
  std::vector<SampleRecord> manifest = {make_sample("ok", 7), make_sample("broken", 8)};
  manifest[1].question.clear();

  PerfectExtractor extractor;
  OracleReasoner reasoner;
  Backends backends{&extractor, &reasoner, {}};
  auto runs = run_batch(manifest, {TaskKind::question_answering}, adapter(), backends,
                        CsvSource::predicted, 2);
  REQUIRE(runs.size() == 2);
  CHECK(runs[0].error.empty());
  CHECK_FALSE(runs[1].error.empty());
}

TEST_CASE("empty manifests and empty task sets are rejected") {
  PerfectExtractor extractor;
  OracleReasoner reasoner;
  Backends backends{&extractor, &reasoner, {}};
  CHECK_THROWS_AS(run_batch({}, {TaskKind::structural_extraction}, adapter(),
                            backends, CsvSource::predicted, 1),
                  EmptyManifestError);
  CHECK_THROWS_AS(run_batch({make_sample("x", 1)}, {}, adapter(), backends,
                            CsvSource::predicted, 1),
                  std::invalid_argument);
}

TEST_CASE("golden-mode QA accuracy dominates predicted mode under corruption") {
  for (std::uint64_t seed : {11ULL, 22ULL, 33ULL}) {
    std::vector<SampleRecord> manifest;
    for (int i = 0; i < 20; ++i)
      manifest.push_back(make_sample("g" + std::to_string(i), seed * 1000 + i));

    CorruptingExtractor extractor(0.3, seed);
    OracleReasoner reasoner;
    Backends backends{&extractor, &reasoner, {}};

    auto score = [&](CsvSource mode) {
      auto runs = run_batch(manifest, {TaskKind::question_answering}, adapter(),
                            backends, mode, 2);
      int correct = 0;
      for (std::size_t i = 0; i < manifest.size(); ++i)
        if (answers::relaxed_acc(runs[i].output, manifest[i].answer)) ++correct;
      return correct;
    };

    int golden = score(CsvSource::golden);
    int predicted = score(CsvSource::predicted);
    CHECK(golden == static_cast<int>(manifest.size()));
    CHECK(golden >= predicted);
  }
}

TEST_CASE("subprocess transport round trips the JSON contract") {
  SubprocessReasoner reasoner(STUB_BACKEND_PATH, {5000, 0});
  std::string out = reasoner.reason("hello world", 77);
  CHECK(out == "stub-reasoner:11:77");

  SubprocessExtractor extractor(STUB_BACKEND_PATH, {5000, 0});
  ChartRepresentation rep = extractor.extract(SampleRecord{}, 1280);
  CHECK(rep.title == "Stub Title");
  CHECK(rep.chart_type == "bar");
  CHECK(parse_csv(rep.csv).rows() == 2);
}

TEST_CASE("subprocess timeouts and failures map to typed errors") {
  SubprocessReasoner slow("sleep 5", {200, 0});
  CHECK_THROWS_AS(slow.reason("x", 10), BackendTimeout);

  SubprocessReasoner broken("false", {2000, 0});
  CHECK_THROWS_AS(broken.reason("x", 10), BackendMalformedResponse);

  SubprocessReasoner garbage("echo not-json", {2000, 0});
  CHECK_THROWS_AS(garbage.reason("x", 10), BackendMalformedResponse);
}

TEST_CASE("HTTP transport speaks the wire contract") {
  httplib::Server server;
  server.Post("/generate", [](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body = nlohmann::json::parse(req.body);
    nlohmann::json reply = {
        {"text", "echo:" + std::to_string(body["max_new_tokens"].get<int>())}};
    res.set_content(reply.dump(), "application/json");
  });
  server.Post("/extract", [](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body = nlohmann::json::parse(req.body);
    REQUIRE(body.contains("image_b64"));
    nlohmann::json reply = {
        {"title", "T"}, {"type", "line"}, {"csv", "K,c\nr,1\n"}};
    res.set_content(reply.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&server] { server.listen_after_bind(); });
  server.wait_until_ready();
  std::string base = "http://127.0.0.1:" + std::to_string(port);

  HttpReasoner reasoner(base, "/generate", {2000, 0});
  CHECK(reasoner.reason("prompt", 512) == "echo:512");

  // The extractor posts the image bytes; give it a real file.
  std::string image = "http_image_test.png";
  {
    std::ofstream img(image, std::ios::binary);
    img << "fake image bytes";
  }
  SampleRecord sample;
  sample.image_path = image;
  HttpExtractor extractor(base, "/extract", {2000, 0});
  ChartRepresentation rep = extractor.extract(sample, 1280);
  CHECK(rep.chart_type == "line");
  std::remove(image.c_str());

  server.stop();
  server_thread.join();
}

TEST_CASE("HTTP transport maps missing fields to malformed responses") {
  httplib::Server server;
  server.Post("/generate", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"unexpected\":1}", "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&server] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpReasoner reasoner("http://127.0.0.1:" + std::to_string(port), "/generate",
                        {2000, 0});
  CHECK_THROWS_AS(reasoner.reason("x", 10), BackendMalformedResponse);

  server.stop();
  server_thread.join();
}

TEST_CASE("base64 encoding matches known vectors") {
  CHECK(base64_encode("") == "");
  CHECK(base64_encode("f") == "Zg==");
  CHECK(base64_encode("fo") == "Zm8=");
  CHECK(base64_encode("foo") == "Zm9v");
  CHECK(base64_encode("foobar") == "Zm9vYmFy");
}

TEST_CASE("oracle question helpers agree with answer_from_csv") {
  std::string csv = "Month,Sales,Returns\nJan,100,5\nFeb,250,8\nMar,50,2\n";
  CHECK(answer_from_csv(lookup_question("Feb", "Sales"), csv) == "250");
  CHECK(answer_from_csv(max_question("Sales"), csv) == "Feb");
  CHECK(answer_from_csv(min_question("Sales"), csv) == "Mar");
  CHECK(answer_from_csv(sum_question("Sales"), csv) == "400");
  CHECK(answer_from_csv(sum_question("Returns"), csv) == "15");
  CHECK(answer_from_csv(lookup_question("Nope", "Sales"), csv) == "");
  CHECK(answer_from_csv("What is the meaning of life?", csv) == "");
}
