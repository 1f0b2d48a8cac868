#include "chartkit/benchgen.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "chartkit/table.hpp"

namespace chartkit::benchgen {

namespace {

std::string default_hint(ChartTypeId t) {
  switch (t) {
    case ChartTypeId::box:
      return "Each row must contain a five-number summary (minimum, first "
             "quartile, median, third quartile, maximum) in increasing order.";
    case ChartTypeId::candlestick:
      return "Each row holds open, high, low and close prices for one "
             "period, with high the largest and low the smallest of the four.";
    case ChartTypeId::bar3d:
      return "Rows and columns form two categorical axes; each cell holds "
             "one non-negative bar height.";
    case ChartTypeId::rose:
      return "Use a single value column of positive magnitudes, one sector "
             "per row, with visible differences between sectors.";
    case ChartTypeId::pie:
    case ChartTypeId::ring:
      return "Use a single value column of positive shares that sum to a "
             "round total such as 100.";
    case ChartTypeId::heatmap:
      return "Values fill a dense 2-D grid; keep magnitudes within one "
             "order of magnitude so the color scale stays readable.";
    case ChartTypeId::funnel:
      return "Use a single value column with strictly decreasing stage "
             "counts from top to bottom.";
    case ChartTypeId::histogram:
      return "Rows are consecutive bins of equal width; the value column "
             "holds non-negative counts.";
    case ChartTypeId::bubble:
      return "Provide three value columns per row: x position, y position "
             "and bubble size.";
    case ChartTypeId::multi_axes:
      return "Use two to three value columns with clearly different "
             "magnitudes, one per axis.";
    case ChartTypeId::radar:
      return "Use three to six value columns representing axes with "
             "comparable scales.";
    case ChartTypeId::area:
      return "Values form cumulative or stacked series over an ordered "
             "axis such as time.";
    case ChartTypeId::treemap:
      return "Use a single value column of positive areas, a handful of "
             "rows, no zeros.";
    default:
      return "Use one row per category with clearly distinguishable values.";
  }
}

}  // namespace

GenerationPools GenerationPools::defaults() {
  GenerationPools pools;
  for (ChartTypeId t : all_chart_types()) {
    pools.chart_types.push_back(
        {t, is_general_type(t) ? kGeneralTypeWeight : 1.0, default_hint(t)});
  }
  pools.topics = {
      // commerce
      "retail_sales", "e_commerce", "finance_markets", "marketing",
      "real_estate",
      // industry
      "manufacturing", "energy_production", "agriculture",
      "transportation_logistics", "construction",
      // society
      "education", "public_health", "demographics", "employment_labor",
      "government_budget",
      // culture
      "media_entertainment", "sports_competition", "tourism_travel",
      "arts_museums",
      // lifestyle
      "food_nutrition", "fitness_wellbeing", "consumer_technology",
  };
  return pools;
}

GenerationPools GenerationPools::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pools file: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  GenerationPools pools;
  for (const auto& entry : j.at("chart_types")) {
    auto id = parse_chart_type(entry.at("type").get<std::string>());
    if (!id)
      throw std::runtime_error("unknown chart type in pools: " +
                               entry.at("type").get<std::string>());
    pools.chart_types.push_back({*id, entry.value("weight", 1.0),
                                 entry.value("hint", default_hint(*id))});
  }
  for (const auto& topic : j.at("topics"))
    pools.topics.push_back(topic.get<std::string>());
  if (pools.chart_types.size() != kChartTypeCount)
    throw std::runtime_error("pools must list all 18 chart types");
  if (pools.topics.size() != 22)
    throw std::runtime_error("pools must list exactly 22 topics");
  return pools;
}

const GenerationPools::TypeEntry& GenerationPools::entry(ChartTypeId t) const {
  for (const TypeEntry& e : chart_types)
    if (e.type == t) return e;
  throw std::out_of_range("chart type missing from pools");
}

std::pair<ChartTypeId, std::string> sample_pools(const GenerationPools& pools,
                                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double total = 0.0;
  for (const auto& e : pools.chart_types) total += e.weight;
  double u = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
  double target = u * total;
  ChartTypeId chosen = pools.chart_types.back().type;
  for (const auto& e : pools.chart_types) {
    if (target < e.weight) {
      chosen = e.type;
      break;
    }
    target -= e.weight;
  }
  const std::string& topic = pools.topics[rng() % pools.topics.size()];
  return {chosen, topic};
}

// ---------------------------------------------------------------------------
// Templates
// ---------------------------------------------------------------------------

namespace {

PromptTemplate make_template(std::string id, Stage stage, std::string body) {
  PromptTemplate t;
  t.template_id = std::move(id);
  t.stage = stage;
  t.body = std::move(body);
  for (ChartTypeId type : all_chart_types())
    t.type_specific_inserts[type] = default_hint(type);
  return t;
}

}  // namespace

TemplateLibrary TemplateLibrary::defaults() {
  TemplateLibrary lib;

  lib.templates_["perception"] = make_template(
      "perception", Stage::perception,
      "Generate the underlying data for a {chart_type} chart about {topic}.\n"
      "{length_constraint}\n"
      "{type_specific_insert}\n"
      "First give a concise, realistic chart title on its own line.\n"
      "Then output the data as CSV: a header row whose first field names the "
      "row-entity axis followed by one field per value column, then one row "
      "per entity. Keep every value visible and recognizable when plotted.");

  lib.templates_["qa"] = make_template(
      "qa", Stage::cognition,
      "Here is the data of a {chart_type} chart titled \"{title}\" about "
      "{topic}:\n{csv}\n{type_specific_insert}\n"
      "Write two question-answer pairs that can be answered solely from this "
      "data, exercising reasoning such as comparison, aggregation or lookup.\n"
      "Format each pair as:\nQuestion: ...\nAnswer: ...");

  lib.templates_["description"] = make_template(
      "description", Stage::cognition,
      "Here is the data of a {chart_type} chart titled \"{title}\" about "
      "{topic}:\n{csv}\n{type_specific_insert}\n"
      "Write a detailed description of the chart, covering every series, "
      "notable values and the distribution of the data.");

  lib.templates_["summarization"] = make_template(
      "summarization", Stage::cognition,
      "Here is the data of a {chart_type} chart titled \"{title}\" about "
      "{topic}:\n{csv}\n{type_specific_insert}\n"
      "Summarize the trend-like, high-level characteristics of this chart "
      "in a few sentences.");

  lib.templates_["redrawing"] = make_template(
      "redrawing", Stage::cognition,
      "Here is the data of a {chart_type} chart titled \"{title}\" about "
      "{topic}:\n{csv}\n{type_specific_insert}\n"
      "Write Python code that plots this data as a {chart_type} chart with "
      "the same title.");

  return lib;
}

void TemplateLibrary::load_dir(const std::string& dir) {
  for (auto& [id, tmpl] : templates_) {
    std::filesystem::path p = std::filesystem::path(dir) / (id + ".txt");
    std::ifstream in(p);
    if (!in) continue;
    std::ostringstream body;
    body << in.rdbuf();
    tmpl.body = body.str();
  }
}

const PromptTemplate& TemplateLibrary::get(const std::string& template_id) const {
  auto it = templates_.find(template_id);
  if (it == templates_.end())
    throw std::out_of_range("unknown template: " + template_id);
  return it->second;
}

std::vector<std::string> TemplateLibrary::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : templates_) out.push_back(id);
  return out;
}

std::string build_prompt(const PromptTemplate& tmpl,
                         const std::map<std::string, std::string>& slots) {
  const std::string& body = tmpl.body;
  std::string out;
  out.reserve(body.size());
  for (std::size_t i = 0; i < body.size();) {
    if (body[i] == '{') {
      std::size_t close = body.find('}', i);
      if (close != std::string::npos) {
        std::string slot = body.substr(i + 1, close - i - 1);
        bool slot_like = !slot.empty() &&
                         slot.find_first_not_of(
                             "abcdefghijklmnopqrstuvwxyz_") == std::string::npos;
        if (slot_like) {
          auto it = slots.find(slot);
          if (it == slots.end()) throw MissingSlotError(slot);
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(body[i]);
    ++i;
  }
  return out;
}

std::string render_for(const PromptTemplate& tmpl, const GenerationPools& pools,
                       ChartTypeId chart_type, const std::string& topic,
                       std::map<std::string, std::string> extra) {
  std::map<std::string, std::string> slots = std::move(extra);
  slots.emplace("chart_type", std::string(chart_type_name(chart_type)));
  slots.emplace("topic", topic);
  auto insert_it = tmpl.type_specific_inserts.find(chart_type);
  slots.emplace("type_specific_insert", insert_it != tmpl.type_specific_inserts.end()
                                            ? insert_it->second
                                            : pools.entry(chart_type).hint);
  slots.emplace("length_constraint",
                "Use between 3 and 12 rows and between 1 and 4 value columns, "
                "with value magnitudes that stay legible when plotted.");
  return build_prompt(tmpl, slots);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::string_view violation_name(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::null_file: return "null_file";
    case Violation::Kind::csv_unparseable: return "csv_unparseable";
    case Violation::Kind::non_positive_length: return "non_positive_length";
    case Violation::Kind::missing_cognition_field: return "missing_cognition_field";
  }
  return "null_file";
}

std::vector<Violation> validate_format(const SampleBundle& bundle) {
  std::vector<Violation> out;

  if (!bundle.image_path.empty()) {
    std::error_code ec;
    auto size = std::filesystem::file_size(bundle.image_path, ec);
    if (ec || size == 0)
      out.push_back({Violation::Kind::null_file,
                     "image missing or empty: " + bundle.image_path});
  }
  if (bundle.title.empty())
    out.push_back({Violation::Kind::null_file, "title empty"});

  if (bundle.csv.empty()) {
    out.push_back({Violation::Kind::null_file, "csv empty"});
  } else {
    try {
      parse_csv(bundle.csv);
    } catch (const CsvError& e) {
      switch (e.kind) {
        case CsvError::Kind::non_positive_length:
          out.push_back({Violation::Kind::non_positive_length, e.what()});
          break;
        case CsvError::Kind::empty_input:
          out.push_back({Violation::Kind::null_file, "csv blank"});
          break;
        default:
          out.push_back({Violation::Kind::csv_unparseable, e.what()});
          break;
      }
    }
  }

  if (bundle.qa.size() != 2) {
    out.push_back({Violation::Kind::missing_cognition_field,
                   "expected 2 QA pairs, found " + std::to_string(bundle.qa.size())});
  } else {
    for (std::size_t i = 0; i < bundle.qa.size(); ++i) {
      if (bundle.qa[i].question.empty() || bundle.qa[i].answer.empty())
        out.push_back({Violation::Kind::missing_cognition_field,
                       "QA pair " + std::to_string(i) + " incomplete"});
    }
  }
  if (bundle.description.empty())
    out.push_back({Violation::Kind::missing_cognition_field, "description missing"});
  if (bundle.summarization.empty())
    out.push_back({Violation::Kind::missing_cognition_field, "summarization missing"});
  if (bundle.redraw_code.empty())
    out.push_back({Violation::Kind::missing_cognition_field, "redraw code missing"});
  return out;
}

std::string submit_generation(const std::string& prompt, ChatClient& client,
                              const RetryPolicy& retry, AuditLog* audit,
                              const std::string& sample_id) {
  std::string response =
      retry_with_backoff(retry, [&] { return client.complete(prompt); });
  if (audit) audit->record(sample_id, prompt, response);
  return response;
}

// ---------------------------------------------------------------------------
// Dataset loader
// ---------------------------------------------------------------------------

namespace {

std::optional<std::string> read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

LoadResult load_bundles(const std::string& index_path) {
  LoadResult result;
  std::ifstream in(index_path);
  if (!in) {
    result.violations.push_back(
        {Violation::Kind::null_file, "index unreadable: " + index_path});
    return result;
  }
  std::filesystem::path base = std::filesystem::path(index_path).parent_path();

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      result.violations.push_back(
          {Violation::Kind::null_file,
           "index line " + std::to_string(lineno) + ": " + e.what()});
      continue;
    }
    SampleBundle b;
    b.id = j.value("id", "line-" + std::to_string(lineno));
    if (j.contains("chart_type"))
      b.chart_type = parse_chart_type(j["chart_type"].get<std::string>());
    b.topic = j.value("topic", "");
    b.title = j.value("title", "");
    if (j.contains("csv")) {
      b.csv = j["csv"].get<std::string>();
    } else if (j.contains("csv_path")) {
      auto text = read_text_file(base / j["csv_path"].get<std::string>());
      if (text) {
        b.csv = *text;
      } else {
        result.violations.push_back(
            {Violation::Kind::null_file,
             b.id + ": csv file unreadable: " + j["csv_path"].get<std::string>()});
      }
    }
    if (j.contains("image_path"))
      b.image_path = (base / j["image_path"].get<std::string>()).string();
    for (const auto& qa : j.value("qa", nlohmann::json::array()))
      b.qa.push_back({qa.value("question", ""), qa.value("answer", "")});
    b.description = j.value("description", "");
    b.summarization = j.value("summarization", "");
    b.redraw_code = j.value("redrawing", j.value("redraw_code", ""));
    b.split = j.value("split", "val") == std::string("test") ? Split::test : Split::val;
    result.bundles.push_back(std::move(b));
  }
  return result;
}

nlohmann::json review_worksheet(const std::vector<SampleBundle>& bundles) {
  nlohmann::json out = nlohmann::json::array();
  for (const SampleBundle& b : bundles) {
    nlohmann::json checks = {
        {"pair_content_matches_image", nullptr},
        {"qa_reasoning_valid", nullptr},
        {"summary_description_score", nullptr},
    };
    out.push_back({
        {"id", b.id},
        {"chart_type",
         b.chart_type ? std::string(chart_type_name(*b.chart_type)) : ""},
        {"topic", b.topic},
        {"image_path", b.image_path},
        {"checks", checks},
        {"reviewer", ""},
        {"notes", ""},
    });
  }
  return out;
}

}  // namespace chartkit::benchgen
