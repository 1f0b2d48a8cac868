#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>
#include <set>

#include "chartkit/router.hpp"

using namespace chartkit::router;

TEST_CASE("task enum covers 8 classes split into perception and cognition") {
  CHECK(kTaskCount == 8);
  int perception = 0, cognition = 0;
  for (std::size_t i = 0; i < kTaskCount; ++i) {
    TaskKind t = static_cast<TaskKind>(i);
    if (is_perception_task(t)) ++perception;
    if (is_cognition_task(t)) ++cognition;
  }
  CHECK(perception == 3);
  CHECK(cognition == 4);
}

TEST_CASE("route maps plans exhaustively") {
  CHECK(route(TaskKind::structural_extraction) == DecoderPlan::base_only);
  CHECK(route(TaskKind::title_extraction) == DecoderPlan::base_only);
  CHECK(route(TaskKind::type_classification) == DecoderPlan::base_only);
  CHECK(route(TaskKind::question_answering) == DecoderPlan::base_then_auxiliary);
  CHECK(route(TaskKind::description) == DecoderPlan::base_then_auxiliary);
  CHECK(route(TaskKind::summarization) == DecoderPlan::base_then_auxiliary);
  CHECK(route(TaskKind::redrawing) == DecoderPlan::base_then_auxiliary);
  CHECK(route(TaskKind::out_of_scope) == DecoderPlan::reject);
}

TEST_CASE("corpus generation is deterministic and exact in size") {
  auto a = generate_instruction_corpus(7, 20);
  auto b = generate_instruction_corpus(7, 20);
  CHECK(a == b);
  CHECK(a.size() == 160);

  auto c = generate_instruction_corpus(8, 20);
  CHECK(a != c);

  auto tiny = generate_instruction_corpus(1, 1);
  CHECK(tiny.size() == 8);
  std::set<TaskKind> classes;
  for (const auto& [text, label] : tiny) classes.insert(label);
  CHECK(classes.size() == 8);
}

TEST_CASE("corpus instructions are unique within each class") {
  auto corpus = generate_instruction_corpus(3, 400);
  std::set<std::pair<std::string, TaskKind>> seen;
  for (const auto& item : corpus) CHECK(seen.insert(item).second);
}

TEST_CASE("the full 7K corpus is available") {
  auto corpus = generate_instruction_corpus(7, 875);
  CHECK(corpus.size() == 7000);
}

TEST_CASE("featurizer hashes uni+bigrams case-insensitively") {
  FeaturizerSpec spec;
  auto a = featurize(spec, "Convert this chart");
  auto b = featurize(spec, "convert THIS chart!");
  CHECK(a == b);
  CHECK_FALSE(featurize(spec, "convert chart this") == a);  // bigrams differ
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1].first < a[i].first);
  // 3 unigrams + 2 bigrams (minus collisions) land in [1, 5] buckets
  CHECK(a.size() >= 1);
  CHECK(a.size() <= 5);
}

namespace {

TrainConfig small_config(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.epochs = 12;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("training at reduced scale hits high held-out accuracy") {
  auto corpus = generate_instruction_corpus(7, 120);
  AdapterModel model = train_adapter(corpus, small_config(7));
  CHECK(model.meta().validation_accuracy >= 0.95);
  CHECK(model.meta().train_samples + model.meta().holdout_samples == corpus.size());
}

TEST_CASE("same seed twice gives identical weights; different seed differs") {
  auto corpus = generate_instruction_corpus(11, 40);
  AdapterModel a = train_adapter(corpus, small_config(5));
  AdapterModel b = train_adapter(corpus, small_config(5));
  CHECK(a == b);
  AdapterModel c = train_adapter(corpus, small_config(6));
  CHECK_FALSE(a == c);
}

TEST_CASE("a class missing from the corpus is degenerate") {
  auto corpus = generate_instruction_corpus(7, 30);
  std::erase_if(corpus, [](const LabeledInstruction& x) {
    return x.second == TaskKind::redrawing;
  });
  CHECK_THROWS_AS(train_adapter(corpus, small_config(7)), DegenerateCorpusError);
}

TEST_CASE("holdout fraction outside (0,1) is rejected") {
  auto corpus = generate_instruction_corpus(7, 10);
  TrainConfig cfg = small_config(7);
  cfg.holdout_fraction = 0.0;
  CHECK_THROWS_AS(train_adapter(corpus, cfg), std::invalid_argument);
  cfg.holdout_fraction = 1.0;
  CHECK_THROWS_AS(train_adapter(corpus, cfg), std::invalid_argument);
}

TEST_CASE("classification examples route to the expected tasks") {
  auto corpus = generate_instruction_corpus(7, 150);
  AdapterModel model = train_adapter(corpus, small_config(7));

  CHECK(model.classify("Convert this chart into a table.").first ==
        TaskKind::structural_extraction);
  CHECK(model.classify("What is the highest value shown?").first ==
        TaskKind::question_answering);
  CHECK(model.classify("Translate this paragraph into French.").first ==
        TaskKind::out_of_scope);
  CHECK(model.classify("summarize this chart").first == TaskKind::summarization);
  CHECK(model.classify("What is the title of this chart?").first ==
        TaskKind::title_extraction);

  auto [task, confidence] = model.classify("Describe this chart in detail.");
  CHECK(task == TaskKind::description);
  CHECK(confidence > 0.0);
  CHECK(confidence <= 1.0);
}

TEST_CASE("no perception-labeled holdout instruction routes to the auxiliary") {
  auto corpus = generate_instruction_corpus(13, 100);
  AdapterModel model = train_adapter(corpus, small_config(13));
  // The held-out split is internal; checking over the whole corpus is
  // strictly stronger.
  for (const auto& [text, label] : corpus) {
    if (!is_perception_task(label)) continue;
    auto [predicted, conf] = model.classify(text);
    CHECK(route(predicted) != DecoderPlan::base_then_auxiliary);
  }
}

TEST_CASE("softmax probabilities sum to one for arbitrary inputs") {
  auto corpus = generate_instruction_corpus(7, 40);
  AdapterModel model = train_adapter(corpus, small_config(7));
  std::mt19937_64 rng(55);
  const char* words[] = {"chart", "zebra", "quantum", "sum", "plot", "rain"};
  for (int i = 0; i < 100; ++i) {
    std::string text;
    for (int w = 0; w < 5; ++w) text += std::string(words[rng() % 6]) + " ";
    auto p = model.probabilities(text);
    double sum = 0.0;
    for (double v : p) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-6);
  }
}

TEST_CASE("argmax is stable under positive scaling of the logits") {
  auto corpus = generate_instruction_corpus(7, 40);
  AdapterModel model = train_adapter(corpus, small_config(7));
  for (const char* text : {"summarize this graph", "what type of chart is this?",
                           "book me a flight", "redraw the figure in python"}) {
    auto logits = model.logits(text);
    auto argmax = [](const std::vector<double>& v) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
      return best;
    };
    std::size_t base = argmax(logits);
    for (double scale : {0.01, 0.5, 3.0, 1000.0}) {
      std::vector<double> scaled = logits;
      for (double& v : scaled) v *= scale;
      CHECK(argmax(scaled) == base);
    }
  }
}

TEST_CASE("gradient check: analytic matches central differences") {
  auto corpus = generate_instruction_corpus(7, 10);
  std::vector<std::pair<std::vector<std::pair<std::uint32_t, double>>, TaskKind>> batch;
  FeaturizerSpec spec;
  for (std::size_t i = 0; i < 10; ++i)
    batch.emplace_back(featurize(spec, corpus[i].first), corpus[i].second);

  // Untrained model with seeded random weights.
  auto tiny_corpus = generate_instruction_corpus(7, 2);
  TrainConfig cfg = small_config(7);
  cfg.epochs = 1;
  AdapterModel model = train_adapter(tiny_corpus, cfg);

  double max_rel = ModelGradients::finite_difference_check(model, batch, 30, 99);
  CHECK(max_rel <= 1e-4);
}

TEST_CASE("save/load round trip reproduces classify exactly") {
  auto corpus = generate_instruction_corpus(7, 60);
  AdapterModel model = train_adapter(corpus, small_config(7));

  std::string path = "adapter_roundtrip_test.bin";
  model.save(path);
  AdapterModel loaded = AdapterModel::load(path);
  std::remove(path.c_str());

  CHECK(loaded == model);
  CHECK(loaded.meta().validation_accuracy == model.meta().validation_accuracy);
  for (const char* text : {"convert this plot to csv", "who won the cup?",
                           "give me the heading"}) {
    auto a = model.probabilities(text);
    auto b = loaded.probabilities(text);
    CHECK(a == b);
  }
}

TEST_CASE("per_class beyond the pool size is rejected") {
  CHECK_THROWS_AS(generate_instruction_corpus(7, 1000000), std::invalid_argument);
}
