#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chartkit::router {

// The seven chart tasks plus a catch-all for requests outside the model's
// capabilities. The first three are perception tasks, the next four
// cognition tasks.
enum class TaskKind {
  structural_extraction,
  title_extraction,
  type_classification,
  question_answering,
  description,
  summarization,
  redrawing,
  out_of_scope,
};

inline constexpr std::size_t kTaskCount = 8;

std::string_view task_name(TaskKind t);
std::optional<TaskKind> parse_task(std::string_view name);

constexpr bool is_perception_task(TaskKind t) {
  return t == TaskKind::structural_extraction ||
         t == TaskKind::title_extraction || t == TaskKind::type_classification;
}

constexpr bool is_cognition_task(TaskKind t) {
  return t == TaskKind::question_answering || t == TaskKind::description ||
         t == TaskKind::summarization || t == TaskKind::redrawing;
}

// Which decoders a classified instruction engages: perception tasks need
// only the base decoder, cognition tasks chain the auxiliary decoder after
// it, out-of-scope requests are refused.
enum class DecoderPlan { base_only, base_then_auxiliary, reject };

std::string_view plan_name(DecoderPlan p);

constexpr DecoderPlan route(TaskKind task) {
  if (is_perception_task(task)) return DecoderPlan::base_only;
  if (is_cognition_task(task)) return DecoderPlan::base_then_auxiliary;
  return DecoderPlan::reject;
}

using LabeledInstruction = std::pair<std::string, TaskKind>;

// Deterministic template-based corpus: per_class unique instructions per
// task class, phrased from >= 25 templates per class with noun/politeness
// slot fills. Throws std::invalid_argument when per_class exceeds the
// template pool of some class.
std::vector<LabeledInstruction> generate_instruction_corpus(std::uint64_t seed,
                                                            std::size_t per_class);

// Hashed bag of lowercase word uni+bigrams.
struct FeaturizerSpec {
  std::uint32_t hash_dim = 4096;
  std::uint32_t ngram_min = 1;
  std::uint32_t ngram_max = 2;
};

// Sparse (feature index, count) pairs, indices strictly increasing.
std::vector<std::pair<std::uint32_t, double>> featurize(
    const FeaturizerSpec& spec, std::string_view text);

struct TrainConfig {
  std::uint32_t hidden = 256;
  std::uint32_t epochs = 20;
  std::uint32_t batch_size = 64;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double holdout_fraction = 0.1;
  std::uint64_t seed = 7;
};

struct TrainMeta {
  std::uint32_t epochs = 0;
  std::uint64_t seed = 0;
  double validation_accuracy = 0.0;
  std::size_t train_samples = 0;
  std::size_t holdout_samples = 0;
};

struct DegenerateCorpusError : std::runtime_error {
  explicit DegenerateCorpusError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// Three affine layers with rectifier activations and a softmax head.
// Layer 1 weights are stored feature-major [D x H] so sparse inputs touch
// contiguous rows.
class AdapterModel {
 public:
  AdapterModel() = default;
  AdapterModel(FeaturizerSpec spec, std::uint32_t hidden);

  // Softmax probabilities over the 8 classes.
  std::vector<double> probabilities(std::string_view instruction) const;
  // Pre-softmax scores, exposed for decision-level checks.
  std::vector<double> logits(std::string_view instruction) const;
  std::pair<TaskKind, double> classify(std::string_view instruction) const;

  const FeaturizerSpec& featurizer() const { return spec_; }
  std::uint32_t hidden() const { return hidden_; }
  const TrainMeta& meta() const { return meta_; }

  void save(const std::string& path) const;
  static AdapterModel load(const std::string& path);

  friend bool operator==(const AdapterModel& a, const AdapterModel& b);

 private:
  friend struct ModelGradients;
  friend AdapterModel train_adapter(const std::vector<LabeledInstruction>& corpus,
                                    const TrainConfig& config);

  FeaturizerSpec spec_;
  std::uint32_t hidden_ = 0;
  // w1 [D x H], w2 [H x H] row-major, w3 [8 x H] row-major.
  std::vector<double> w1_, b1_, w2_, b2_, w3_, b3_;
  TrainMeta meta_;

  void forward(std::span<const std::pair<std::uint32_t, double>> features,
               std::span<double> h1, std::span<double> h2,
               std::span<double> out) const;
};

// Mean cross-entropy loss and gradients over a batch; shared by the trainer
// and the finite-difference gradient check.
struct ModelGradients {
  using Batch =
      std::span<const std::pair<std::vector<std::pair<std::uint32_t, double>>, TaskKind>>;

  std::vector<double> w1, b1, w2, b2, w3, b3;
  double loss = 0.0;

  static ModelGradients compute(const AdapterModel& model, Batch batch);

  // Mean cross-entropy over the batch (forward pass only).
  static double batch_loss(const AdapterModel& model, Batch batch);

  // Largest relative disagreement between analytic gradients and central
  // finite differences over a deterministic sample of parameters from every
  // weight and bias array. The relative error denominator is floored at
  // 1e-6 so exactly-zero gradients compare cleanly.
  static double finite_difference_check(const AdapterModel& model, Batch batch,
                                        std::size_t per_array, std::uint64_t seed);
};

// Fits the classifier with mini-batch gradient descent plus momentum.
// Deterministic for a fixed seed. Throws DegenerateCorpusError when a class
// is missing from the training split.
AdapterModel train_adapter(const std::vector<LabeledInstruction>& corpus,
                           const TrainConfig& config);

}  // namespace chartkit::router
