#include "chartkit/router.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <unordered_set>

#include "chartkit/kernels.hpp"

namespace chartkit::router {

std::string_view task_name(TaskKind t) {
  switch (t) {
    case TaskKind::structural_extraction: return "structural_extraction";
    case TaskKind::title_extraction: return "title_extraction";
    case TaskKind::type_classification: return "type_classification";
    case TaskKind::question_answering: return "question_answering";
    case TaskKind::description: return "description";
    case TaskKind::summarization: return "summarization";
    case TaskKind::redrawing: return "redrawing";
    case TaskKind::out_of_scope: return "out_of_scope";
  }
  return "out_of_scope";
}

std::optional<TaskKind> parse_task(std::string_view name) {
  struct Alias {
    std::string_view name;
    TaskKind task;
  };
  static constexpr Alias aliases[] = {
      {"structural_extraction", TaskKind::structural_extraction},
      {"se", TaskKind::structural_extraction},
      {"title_extraction", TaskKind::title_extraction},
      {"title", TaskKind::title_extraction},
      {"type_classification", TaskKind::type_classification},
      {"type", TaskKind::type_classification},
      {"question_answering", TaskKind::question_answering},
      {"qa", TaskKind::question_answering},
      {"description", TaskKind::description},
      {"desc", TaskKind::description},
      {"summarization", TaskKind::summarization},
      {"summ", TaskKind::summarization},
      {"redrawing", TaskKind::redrawing},
      {"redraw", TaskKind::redrawing},
      {"out_of_scope", TaskKind::out_of_scope},
  };
  for (const Alias& a : aliases)
    if (a.name == name) return a.task;
  return std::nullopt;
}

std::string_view plan_name(DecoderPlan p) {
  switch (p) {
    case DecoderPlan::base_only: return "base_only";
    case DecoderPlan::base_then_auxiliary: return "base_then_auxiliary";
    case DecoderPlan::reject: return "reject";
  }
  return "reject";
}

// ---------------------------------------------------------------------------
// Corpus generation
// ---------------------------------------------------------------------------

namespace {

struct Template {
  const char* text;       // lowercase; imperatives without final punctuation
  bool question;          // questions carry their own "?"
  bool has_noun = false;  // contains the {noun} slot
};

struct ClassTemplates {
  TaskKind task;
  std::vector<const char*> nouns;
  std::vector<Template> templates;
};

const std::vector<const char*>& chart_nouns() {
  static const std::vector<const char*> nouns = {
      "chart", "graph", "plot", "figure", "visualization", "diagram",
      "chart image", "graphic"};
  return nouns;
}

const std::vector<ClassTemplates>& class_templates() {
  static const std::vector<ClassTemplates> classes = [] {
    std::vector<ClassTemplates> all;

    all.push_back({TaskKind::structural_extraction, chart_nouns(), {
        {"convert this {noun} into a table", false, true},
        {"convert the {noun} to csv format", false, true},
        {"extract the underlying data table from this {noun}", false, true},
        {"extract the data from this {noun}", false, true},
        {"turn this {noun} into a data table", false, true},
        {"transform the {noun} into structured data", false, true},
        {"give me the raw data behind this {noun}", false, true},
        {"pull the numbers out of this {noun} and arrange them as a table", false, true},
        {"recover the data matrix from the {noun}", false, true},
        {"produce a csv version of this {noun}", false, true},
        {"list every data point in the {noun} in tabular form", false, true},
        {"write out the table that this {noun} was drawn from", false, true},
        {"digitize the values in this {noun} into rows and columns", false, true},
        {"read off all values from the {noun} and tabulate them", false, true},
        {"export the contents of this {noun} as comma separated values", false, true},
        {"reconstruct the source table of the {noun}", false, true},
        {"generate the data table corresponding to this {noun}", false, true},
        {"parse this {noun} into structured tabular data", false, true},
        {"hand me the spreadsheet representation of this {noun}", false, true},
        {"derive the full data grid from the {noun}", false, true},
        {"capture all the plotted values of this {noun} in a table", false, true},
        {"convert this {noun} into its underlying csv data", false, true},
        {"map the {noun} back to the table it encodes", false, true},
        {"retrieve the structured records displayed in the {noun}", false, true},
        {"tabulate the series shown in this {noun}", false, true},
        {"what are the exact values plotted in this {noun}?", true, true},
        {"what is the underlying data table of this {noun}?", true, true},
    }});

    all.push_back({TaskKind::title_extraction, chart_nouns(), {
        {"extract the title of this {noun}", false, true},
        {"tell me the title of the {noun}", false, true},
        {"give me the title of this {noun}", false, true},
        {"read the title text from the {noun}", false, true},
        {"identify the title of the {noun}", false, true},
        {"report the heading of this {noun}", false, true},
        {"find the caption title of the {noun}", false, true},
        {"state the title shown above the {noun}", false, true},
        {"write down the title of this {noun}", false, true},
        {"output just the title of the {noun}", false, true},
        {"grab the heading text of this {noun}", false, true},
        {"fetch the title from the {noun}", false, true},
        {"determine the main title of this {noun}", false, true},
        {"copy the title of the {noun} exactly as written", false, true},
        {"provide the exact heading of this {noun}", false, true},
        {"extract only the heading line from this {noun}", false, true},
        {"locate the title of the {noun} and return it", false, true},
        {"what is the title of this {noun}?", true, true},
        {"what does the title of the {noun} say?", true, true},
        {"what heading appears on this {noun}?", true, true},
        {"which title is displayed on the {noun}?", true, true},
        {"what is the caption heading of the {noun}?", true, true},
        {"how is this {noun} titled?", true, true},
        {"what name appears at the top of the {noun}?", true, true},
        {"what is the exact wording of the title of this {noun}?", true, true},
    }});

    all.push_back({TaskKind::type_classification, chart_nouns(), {
        {"classify the type of this {noun}", false, true},
        {"identify the chart type of this {noun}", false, true},
        {"determine what kind of {noun} this is", false, true},
        {"recognize the category of this {noun}", false, true},
        {"tell me what type of {noun} this is", false, true},
        {"name the kind of {noun} shown", false, true},
        {"label this {noun} with its chart type", false, true},
        {"state the visualization type of this {noun}", false, true},
        {"categorize this {noun} by its chart type", false, true},
        {"report the chart type used in this {noun}", false, true},
        {"detect the type of the {noun}", false, true},
        {"output the chart type of the {noun}", false, true},
        {"give the chart category for this {noun}", false, true},
        {"specify which chart family this {noun} belongs to", false, true},
        {"decide which chart type this {noun} uses", false, true},
        {"what type of {noun} is this?", true, true},
        {"what kind of {noun} is shown here?", true, true},
        {"is this a bar chart or a line chart?", true, false},
        {"which chart type does this {noun} use?", true, true},
        {"what chart style is this {noun} drawn in?", true, true},
        {"is this {noun} a pie chart?", true, true},
        {"what category of {noun} am i looking at?", true, true},
        {"which of the standard chart types is this {noun}?", true, true},
        {"what visualization type does this {noun} represent?", true, true},
        {"is the {noun} a histogram or a bar chart?", true, true},
    }});

    all.push_back({TaskKind::question_answering, chart_nouns(), {
        {"what is the highest value shown?", true, false},
        {"what is the lowest value in the {noun}?", true, true},
        {"which category has the largest value in this {noun}?", true, true},
        {"which entry has the smallest value?", true, false},
        {"what is the difference between the maximum and minimum values?", true, false},
        {"what is the total of all values in the {noun}?", true, true},
        {"what is the average of the values shown?", true, false},
        {"which category ranks second in this {noun}?", true, true},
        {"how many categories are displayed in the {noun}?", true, true},
        {"by how much does the largest value exceed the smallest?", true, false},
        {"what value does the first category take?", true, false},
        {"which series grows fastest in this {noun}?", true, true},
        {"what is the median value plotted here?", true, false},
        {"how much did the value change between the first and last points?", true, false},
        {"what fraction of the total does the top category hold?", true, false},
        {"which point marks the peak of the {noun}?", true, true},
        {"at which category do the two series cross?", true, false},
        {"what is the combined value of the top three categories?", true, false},
        {"which month saw the biggest drop?", true, false},
        {"what is the ratio between the largest and smallest entries?", true, false},
        {"answer this question about the {noun} using only its data", false, true},
        {"compute the sum of the values plotted in this {noun}", false, true},
        {"calculate the average across all categories in the {noun}", false, true},
        {"compare the first and last values of the {noun}", false, true},
        {"work out the gap between the two largest values", false, false},
        {"find the category with the maximum value in this {noun}", false, true},
        {"count how many entries exceed the average", false, false},
    }});

    all.push_back({TaskKind::description, chart_nouns(), {
        {"describe this {noun} in detail", false, true},
        {"write a detailed description of the {noun}", false, true},
        {"explain what this {noun} shows", false, true},
        {"walk me through the contents of this {noun}", false, true},
        {"give a thorough description of the {noun}", false, true},
        {"describe the data presented in this {noun}", false, true},
        {"provide a full description of what the {noun} displays", false, true},
        {"narrate the information conveyed by this {noun}", false, true},
        {"describe every series and axis in the {noun}", false, true},
        {"lay out in words what this {noun} contains", false, true},
        {"offer a comprehensive description of this {noun}", false, true},
        {"detail the distribution shown in the {noun}", false, true},
        {"portray the contents of the {noun} in prose", false, true},
        {"describe the trends and values visible in this {noun}", false, true},
        {"spell out what is depicted in the {noun}", false, true},
        {"characterize the data in this {noun} thoroughly", false, true},
        {"write a paragraph describing the {noun}", false, true},
        {"present a verbal account of this {noun}", false, true},
        {"elaborate on what the {noun} illustrates", false, true},
        {"document the information shown in this {noun}", false, true},
        {"what does this {noun} show in detail?", true, true},
        {"what information does this {noun} present?", true, true},
        {"what exactly is depicted in this {noun}?", true, true},
        {"what do the axes and series of this {noun} represent?", true, true},
        {"describe the layout and values of the {noun}", false, true},
    }});

    all.push_back({TaskKind::summarization, chart_nouns(), {
        {"summarize this {noun}", false, true},
        {"give a brief summary of the {noun}", false, true},
        {"sum up the key trends in this {noun}", false, true},
        {"condense this {noun} into a few sentences", false, true},
        {"provide a short summary of the data in the {noun}", false, true},
        {"write a concise summary of what the {noun} shows", false, true},
        {"boil the {noun} down to its main takeaways", false, true},
        {"recap the main findings of this {noun}", false, true},
        {"summarize the overall trend of the {noun}", false, true},
        {"give me the highlights of this {noun}", false, true},
        {"outline the key points of the {noun} briefly", false, true},
        {"state the main message of this {noun} in one or two lines", false, true},
        {"compress the information in the {noun} into a short overview", false, true},
        {"offer a high level overview of this {noun}", false, true},
        {"abstract the essential insights from the {noun}", false, true},
        {"deliver an executive summary of this {noun}", false, true},
        {"wrap up the findings of the {noun} in a sentence or two", false, true},
        {"summarize the big picture shown by this {noun}", false, true},
        {"briefly restate what the {noun} indicates", false, true},
        {"distill the {noun} into its key insights", false, true},
        {"what are the key takeaways from this {noun}?", true, true},
        {"what is the overall trend in this {noun}?", true, true},
        {"what is the gist of this {noun}?", true, true},
        {"what would a one sentence summary of the {noun} be?", true, true},
        {"what are the main conclusions of this {noun}?", true, true},
    }});

    all.push_back({TaskKind::redrawing, chart_nouns(), {
        {"write python code to recreate this {noun}", false, true},
        {"generate matplotlib code that reproduces the {noun}", false, true},
        {"redraw this {noun} with code", false, true},
        {"produce plotting code for this {noun}", false, true},
        {"recreate the {noun} programmatically", false, true},
        {"write a script that plots this {noun} again", false, true},
        {"give me code that renders the same {noun}", false, true},
        {"reproduce this {noun} using a plotting library", false, true},
        {"draft python that draws an identical {noun}", false, true},
        {"code up a replica of this {noun}", false, true},
        {"implement a program that redraws the {noun}", false, true},
        {"regenerate this {noun} from its data using matplotlib", false, true},
        {"plot the same {noun} again in python", false, true},
        {"write the source code needed to rebuild this {noun}", false, true},
        {"provide a python snippet that recreates the {noun}", false, true},
        {"draw this {noun} again via code", false, true},
        {"script the redrawing of this {noun}", false, true},
        {"emit code that produces this exact {noun}", false, true},
        {"rebuild the {noun} with a charting library", false, true},
        {"redraw the {noun} preserving its chart type", false, true},
        {"what python code would redraw this {noun}?", true, true},
        {"how would you recreate this {noun} in matplotlib?", true, true},
        {"what script reproduces the {noun} exactly?", true, true},
        {"which code draws this {noun} again?", true, true},
        {"what matplotlib calls rebuild this {noun}?", true, true},
    }});

    all.push_back({TaskKind::out_of_scope,
                   {"paragraph", "sentence", "document", "email", "essay",
                    "article", "story", "message"}, {
        {"translate this {noun} into french", false, true},
        {"translate the {noun} into spanish", false, true},
        {"rewrite this {noun} in formal english", false, true},
        {"proofread my {noun} for grammar mistakes", false, true},
        {"compose a short {noun} about the ocean", false, true},
        {"draft an apology {noun} to my landlord", false, true},
        {"shorten this {noun} to fit a tweet", false, true},
        {"write a poem about the spring rain", false, false},
        {"book me a flight to tokyo for next friday", false, false},
        {"recommend a good pasta recipe for dinner", false, false},
        {"solve this quadratic equation for x", false, false},
        {"set a reminder for my dentist appointment", false, false},
        {"play some relaxing jazz music", false, false},
        {"refactor this java function to be more readable", false, false},
        {"debug the segmentation fault in my c program", false, false},
        {"plan a three day itinerary for rome", false, false},
        {"order a large pepperoni pizza", false, false},
        {"what is the capital of peru?", true, false},
        {"who won the football world cup in 2014?", true, false},
        {"how do i reset my wifi password?", true, false},
        {"what is the weather like in berlin tomorrow?", true, false},
        {"when does the next train to boston leave?", true, false},
        {"what is the meaning of life?", true, false},
        {"how tall is mount everest?", true, false},
        {"which actor starred in that space movie?", true, false},
        {"how do i bake sourdough bread at home?", true, false},
        {"what time is it in sydney right now?", true, false},
    }});

    return all;
  }();
  return classes;
}

struct Wrapper {
  const char* prefix;
  const char* punct;
};

constexpr Wrapper kImperativeWrappers[] = {
    {"", "."},           {"please ", "."},       {"kindly ", "."},
    {"i want you to ", "."}, {"i need you to ", "."}, {"could you ", "?"},
    {"can you ", "?"},   {"would you ", "?"},
};

constexpr const char* kImperativeSuffixes[] = {
    "", " for me", " right away", " in your reply", " as precisely as you can",
};

constexpr Wrapper kQuestionWrappers[] = {
    {"", ""},
    {"tell me: ", ""},
    {"quick question: ", ""},
    {"i'd like to know: ", ""},
    {"here's my question: ", ""},
    {"answer this: ", ""},
    {"one thing: ", ""},
    {"just checking: ", ""},
};

std::string fill_noun(std::string_view text, std::string_view noun) {
  std::string out;
  out.reserve(text.size() + noun.size());
  std::size_t pos = 0;
  while (true) {
    std::size_t at = text.find("{noun}", pos);
    if (at == std::string_view::npos) {
      out.append(text.substr(pos));
      return out;
    }
    out.append(text.substr(pos, at - pos));
    out.append(noun);
    pos = at + 6;
  }
}

std::string capitalize(std::string s) {
  for (char& c : s) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
    }
  }
  return s;
}

// All distinct phrasings of one class, in deterministic first-seen order.
std::vector<std::string> expand_class(const ClassTemplates& cls) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  auto emit = [&](std::string s) {
    if (seen.insert(s).second) out.push_back(std::move(s));
  };

  for (const Template& t : cls.templates) {
    std::vector<std::string> bodies;
    if (t.has_noun) {
      for (const char* noun : cls.nouns) bodies.push_back(fill_noun(t.text, noun));
    } else {
      bodies.emplace_back(t.text);
    }
    for (const std::string& body : bodies) {
      if (t.question) {
        for (const Wrapper& w : kQuestionWrappers)
          emit(capitalize(w.prefix + body));
      } else {
        for (const Wrapper& w : kImperativeWrappers)
          for (const char* suffix : kImperativeSuffixes)
            emit(capitalize(w.prefix + body + suffix + w.punct));
      }
    }
  }
  return out;
}

// Portable Fisher-Yates; std::shuffle's draw sequence is implementation
// defined, and corpus bytes must not depend on the standard library build.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng() % i]);
}

}  // namespace

std::vector<LabeledInstruction> generate_instruction_corpus(std::uint64_t seed,
                                                            std::size_t per_class) {
  if (per_class == 0) throw std::invalid_argument("per_class must be >= 1");
  std::vector<LabeledInstruction> corpus;
  corpus.reserve(per_class * kTaskCount);
  for (const ClassTemplates& cls : class_templates()) {
    std::vector<std::string> pool = expand_class(cls);
    if (pool.size() < per_class)
      throw std::invalid_argument(
          "per_class exceeds the phrasing pool for task " +
          std::string(task_name(cls.task)) + " (" + std::to_string(pool.size()) +
          " available)");
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL *
                                (static_cast<std::uint64_t>(cls.task) + 1)));
    deterministic_shuffle(pool, rng);
    for (std::size_t i = 0; i < per_class; ++i)
      corpus.emplace_back(std::move(pool[i]), cls.task);
  }
  std::mt19937_64 rng(seed ^ 0xc2b2ae3d27d4eb4fULL);
  deterministic_shuffle(corpus, rng);
  return corpus;
}

// ---------------------------------------------------------------------------
// Featurizer
// ---------------------------------------------------------------------------

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char raw : text) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

}  // namespace

std::vector<std::pair<std::uint32_t, double>> featurize(const FeaturizerSpec& spec,
                                                        std::string_view text) {
  std::vector<std::string> tokens = tokenize(text);
  std::vector<std::uint32_t> idx;
  auto add = [&](std::string_view gram) {
    idx.push_back(static_cast<std::uint32_t>(fnv1a(gram) % spec.hash_dim));
  };
  if (spec.ngram_min <= 1 && spec.ngram_max >= 1)
    for (const std::string& t : tokens) add(t);
  if (spec.ngram_max >= 2 && tokens.size() >= 2) {
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
      add(tokens[i] + "\x1f" + tokens[i + 1]);
  }
  std::sort(idx.begin(), idx.end());
  std::vector<std::pair<std::uint32_t, double>> features;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && idx[j] == idx[i]) ++j;
    features.emplace_back(idx[i], static_cast<double>(j - i));
    i = j;
  }
  return features;
}

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

AdapterModel::AdapterModel(FeaturizerSpec spec, std::uint32_t hidden)
    : spec_(spec), hidden_(hidden) {
  w1_.assign(static_cast<std::size_t>(spec.hash_dim) * hidden, 0.0);
  b1_.assign(hidden, 0.0);
  w2_.assign(static_cast<std::size_t>(hidden) * hidden, 0.0);
  b2_.assign(hidden, 0.0);
  w3_.assign(static_cast<std::size_t>(kTaskCount) * hidden, 0.0);
  b3_.assign(kTaskCount, 0.0);
}

void AdapterModel::forward(std::span<const std::pair<std::uint32_t, double>> features,
                           std::span<double> h1, std::span<double> h2,
                           std::span<double> out) const {
  const std::size_t h = hidden_;
  std::copy(b1_.begin(), b1_.end(), h1.begin());
  for (const auto& [idx, count] : features)
    kernels::axpy(count, std::span<const double>(w1_).subspan(idx * h, h), h1);
  for (double& v : h1) v = v > 0.0 ? v : 0.0;
  kernels::affine(w2_, b2_, h1, h2, h, h);
  for (double& v : h2) v = v > 0.0 ? v : 0.0;
  kernels::affine(w3_, b3_, h2, out, kTaskCount, h);
}

std::vector<double> AdapterModel::logits(std::string_view instruction) const {
  std::vector<double> h1(hidden_), h2(hidden_), out(kTaskCount);
  auto features = featurize(spec_, instruction);
  forward(features, h1, h2, out);
  return out;
}

std::vector<double> AdapterModel::probabilities(std::string_view instruction) const {
  std::vector<double> out = logits(instruction);
  kernels::softmax_inplace(out);
  return out;
}

std::pair<TaskKind, double> AdapterModel::classify(std::string_view instruction) const {
  std::vector<double> p = probabilities(instruction);
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = i;
  return {static_cast<TaskKind>(best), p[best]};
}

bool operator==(const AdapterModel& a, const AdapterModel& b) {
  return a.spec_.hash_dim == b.spec_.hash_dim &&
         a.spec_.ngram_min == b.spec_.ngram_min &&
         a.spec_.ngram_max == b.spec_.ngram_max && a.hidden_ == b.hidden_ &&
         a.w1_ == b.w1_ && a.b1_ == b.b1_ && a.w2_ == b.w2_ && a.b2_ == b.b2_ &&
         a.w3_ == b.w3_ && a.b3_ == b.b3_;
}

// ---------------------------------------------------------------------------
// Gradients and training
// ---------------------------------------------------------------------------

double ModelGradients::batch_loss(const AdapterModel& model, Batch batch) {
  const std::size_t h = model.hidden_;
  std::vector<double> h1(h), h2(h), probs(kTaskCount);
  const double inv_n = batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const auto& [features, label] : batch) {
    model.forward(features, h1, h2, probs);
    kernels::softmax_inplace(probs);
    loss += -std::log(std::max(probs[static_cast<std::size_t>(label)], 1e-300)) * inv_n;
  }
  return loss;
}

double ModelGradients::finite_difference_check(const AdapterModel& model,
                                               Batch batch, std::size_t per_array,
                                               std::uint64_t seed) {
  ModelGradients analytic = compute(model, batch);
  AdapterModel probe = model;
  std::mt19937_64 rng(seed);

  struct ArrayPair {
    std::vector<double>* param;
    const std::vector<double>* grad;
  };
  ArrayPair arrays[] = {
      {&probe.w1_, &analytic.w1}, {&probe.b1_, &analytic.b1},
      {&probe.w2_, &analytic.w2}, {&probe.b2_, &analytic.b2},
      {&probe.w3_, &analytic.w3}, {&probe.b3_, &analytic.b3},
  };

  const double h = 1e-5;
  double max_rel = 0.0;
  for (const ArrayPair& a : arrays) {
    const std::size_t n = a.param->size();
    const std::size_t checks = std::min(per_array, n);
    for (std::size_t k = 0; k < checks; ++k) {
      std::size_t idx = rng() % n;
      double saved = (*a.param)[idx];
      (*a.param)[idx] = saved + h;
      double up = batch_loss(probe, batch);
      (*a.param)[idx] = saved - h;
      double down = batch_loss(probe, batch);
      (*a.param)[idx] = saved;
      double numeric = (up - down) / (2.0 * h);
      double exact = (*a.grad)[idx];
      double rel = std::abs(exact - numeric) /
                   std::max({std::abs(exact), std::abs(numeric), 1e-6});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

ModelGradients ModelGradients::compute(const AdapterModel& model, Batch batch) {
  const std::size_t h = model.hidden_;
  const std::size_t d = model.spec_.hash_dim;
  ModelGradients g;
  g.w1.assign(d * h, 0.0);
  g.b1.assign(h, 0.0);
  g.w2.assign(h * h, 0.0);
  g.b2.assign(h, 0.0);
  g.w3.assign(kTaskCount * h, 0.0);
  g.b3.assign(kTaskCount, 0.0);

  const double inv_n = batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
  std::vector<double> h1(h), h2(h), probs(kTaskCount);
  std::vector<double> d3(kTaskCount), dh2(h), d2(h), dh1(h), d1(h);

  for (const auto& [features, label] : batch) {
    model.forward(features, h1, h2, probs);
    kernels::softmax_inplace(probs);
    const std::size_t y = static_cast<std::size_t>(label);
    g.loss += -std::log(std::max(probs[y], 1e-300)) * inv_n;

    // dL/dlogits, pre-scaled by 1/n so downstream grads inherit the mean.
    for (std::size_t k = 0; k < kTaskCount; ++k)
      d3[k] = (probs[k] - (k == y ? 1.0 : 0.0)) * inv_n;

    kernels::rank1_update(g.w3, d3, h2, 1.0, kTaskCount, h);
    for (std::size_t k = 0; k < kTaskCount; ++k) g.b3[k] += d3[k];

    kernels::matvec_t(model.w3_, d3, dh2, kTaskCount, h);
    for (std::size_t k = 0; k < h; ++k) d2[k] = h2[k] > 0.0 ? dh2[k] : 0.0;

    kernels::rank1_update(g.w2, d2, h1, 1.0, h, h);
    kernels::axpy(1.0, d2, g.b2);

    kernels::matvec_t(model.w2_, d2, dh1, h, h);
    for (std::size_t k = 0; k < h; ++k) d1[k] = h1[k] > 0.0 ? dh1[k] : 0.0;

    for (const auto& [idx, count] : features)
      kernels::axpy(count, d1, std::span<double>(g.w1).subspan(idx * h, h));
    kernels::axpy(1.0, d1, g.b1);
  }
  return g;
}

namespace {

void init_uniform(std::vector<double>& w, std::size_t fan_in, std::size_t fan_out,
                  std::mt19937_64& rng) {
  const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  // Fixed-point draws keep initialization independent of the standard
  // library's distribution implementation.
  for (double& v : w) {
    double u = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
    v = (2.0 * u - 1.0) * s;
  }
}

}  // namespace

AdapterModel train_adapter(const std::vector<LabeledInstruction>& corpus,
                           const TrainConfig& config) {
  if (config.holdout_fraction <= 0.0 || config.holdout_fraction >= 1.0)
    throw std::invalid_argument("holdout_fraction must be in (0, 1)");
  if (corpus.empty()) throw DegenerateCorpusError("empty corpus");

  FeaturizerSpec spec;
  using Example = std::pair<std::vector<std::pair<std::uint32_t, double>>, TaskKind>;
  std::vector<Example> examples;
  examples.reserve(corpus.size());
  for (const auto& [text, label] : corpus)
    examples.emplace_back(featurize(spec, text), label);

  std::mt19937_64 rng(config.seed);
  deterministic_shuffle(examples, rng);

  std::size_t holdout_n = static_cast<std::size_t>(
      std::floor(config.holdout_fraction * static_cast<double>(examples.size())));
  holdout_n = std::min(holdout_n, examples.size() - 1);
  const std::size_t train_n = examples.size() - holdout_n;

  std::array<std::size_t, kTaskCount> class_counts{};
  for (std::size_t i = 0; i < train_n; ++i)
    class_counts[static_cast<std::size_t>(examples[i].second)] += 1;
  for (std::size_t k = 0; k < kTaskCount; ++k) {
    if (class_counts[k] == 0)
      throw DegenerateCorpusError("class missing from training split: " +
                                  std::string(task_name(static_cast<TaskKind>(k))));
  }

  AdapterModel model(spec, config.hidden);
  std::mt19937_64 init_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  init_uniform(model.w1_, spec.hash_dim, config.hidden, init_rng);
  init_uniform(model.w2_, config.hidden, config.hidden, init_rng);
  init_uniform(model.w3_, config.hidden, kTaskCount, init_rng);

  // Momentum buffers, one per parameter array.
  std::vector<double> v1(model.w1_.size(), 0.0), vb1(model.b1_.size(), 0.0);
  std::vector<double> v2(model.w2_.size(), 0.0), vb2(model.b2_.size(), 0.0);
  std::vector<double> v3(model.w3_.size(), 0.0), vb3(model.b3_.size(), 0.0);

  std::vector<std::size_t> order(train_n);
  for (std::size_t i = 0; i < train_n; ++i) order[i] = i;

  std::vector<Example> batch;
  for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    deterministic_shuffle(order, rng);
    for (std::size_t start = 0; start < train_n; start += config.batch_size) {
      const std::size_t end = std::min(train_n, start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(examples[order[i]]);
      ModelGradients g = ModelGradients::compute(model, batch);
      const double mu = config.momentum;
      const double lr = config.learning_rate;
      kernels::momentum_step(model.w1_, v1, g.w1, mu, lr);
      kernels::momentum_step(model.b1_, vb1, g.b1, mu, lr);
      kernels::momentum_step(model.w2_, v2, g.w2, mu, lr);
      kernels::momentum_step(model.b2_, vb2, g.b2, mu, lr);
      kernels::momentum_step(model.w3_, v3, g.w3, mu, lr);
      kernels::momentum_step(model.b3_, vb3, g.b3, mu, lr);
    }
  }

  std::size_t correct = 0;
  std::vector<double> h1(config.hidden), h2(config.hidden), out(kTaskCount);
  for (std::size_t i = train_n; i < examples.size(); ++i) {
    model.forward(examples[i].first, h1, h2, out);
    std::size_t best = 0;
    for (std::size_t k = 1; k < kTaskCount; ++k)
      if (out[k] > out[best]) best = k;
    if (best == static_cast<std::size_t>(examples[i].second)) ++correct;
  }

  model.meta_.epochs = config.epochs;
  model.meta_.seed = config.seed;
  model.meta_.train_samples = train_n;
  model.meta_.holdout_samples = holdout_n;
  model.meta_.validation_accuracy =
      holdout_n == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(holdout_n);
  return model;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'C', 'K', 'A', 'D'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

void write_array(std::ofstream& out, const std::vector<double>& v) {
  std::uint64_t n = v.size();
  write_pod(out, n);
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
}

void read_array(std::ifstream& in, std::vector<double>& v) {
  std::uint64_t n = 0;
  read_pod(in, n);
  v.resize(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
}

}  // namespace

void AdapterModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out.write(kMagic, 4);
  write_pod(out, kFormatVersion);
  write_pod(out, spec_.hash_dim);
  write_pod(out, spec_.ngram_min);
  write_pod(out, spec_.ngram_max);
  write_pod(out, hidden_);
  write_pod(out, meta_.epochs);
  write_pod(out, meta_.seed);
  write_pod(out, meta_.validation_accuracy);
  write_pod(out, static_cast<std::uint64_t>(meta_.train_samples));
  write_pod(out, static_cast<std::uint64_t>(meta_.holdout_samples));
  write_array(out, w1_);
  write_array(out, b1_);
  write_array(out, w2_);
  write_array(out, b2_);
  write_array(out, w3_);
  write_array(out, b3_);
  if (!out) throw std::runtime_error("short write to model file: " + path);
}

AdapterModel AdapterModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not an adapter model file: " + path);
  std::uint32_t version = 0;
  read_pod(in, version);
  if (version != kFormatVersion)
    throw std::runtime_error("unsupported model format version");
  AdapterModel m;
  read_pod(in, m.spec_.hash_dim);
  read_pod(in, m.spec_.ngram_min);
  read_pod(in, m.spec_.ngram_max);
  read_pod(in, m.hidden_);
  read_pod(in, m.meta_.epochs);
  read_pod(in, m.meta_.seed);
  read_pod(in, m.meta_.validation_accuracy);
  std::uint64_t train_n = 0, holdout_n = 0;
  read_pod(in, train_n);
  read_pod(in, holdout_n);
  m.meta_.train_samples = train_n;
  m.meta_.holdout_samples = holdout_n;
  read_array(in, m.w1_);
  read_array(in, m.b1_);
  read_array(in, m.w2_);
  read_array(in, m.b2_);
  read_array(in, m.w3_);
  read_array(in, m.b3_);
  if (!in) throw std::runtime_error("truncated model file: " + path);
  return m;
}

}  // namespace chartkit::router
