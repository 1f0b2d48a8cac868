#include "chartkit/answers.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chartkit/numbers.hpp"

namespace chartkit::answers {

std::string_view method_name(Verdict::Method m) {
  switch (m) {
    case Verdict::Method::numeric_margin: return "numeric_margin";
    case Verdict::Method::string_exact: return "string_exact";
    case Verdict::Method::judge_delegated: return "judge_delegated";
  }
  return "string_exact";
}

Verdict gpt_acc_local(std::string_view pred, std::string_view gt) {
  Verdict v;
  auto p = parse_number(pred);
  auto g = parse_number(gt);
  if (p && g) {
    v.method = Verdict::Method::numeric_margin;
    if (*g == 0.0) {
      v.correct = *p == 0.0;
      v.detail = v.correct ? "exact zero match" : "ground truth 0 requires exact 0";
    } else {
      double rel = std::abs(*p - *g) / std::abs(*g);
      v.correct = rel <= 0.05 * (1.0 + 1e-9);
      std::ostringstream os;
      os << "relative error " << rel;
      v.detail = os.str();
    }
    return v;
  }
  v.method = Verdict::Method::string_exact;
  std::string np = normalize_answer(pred);
  std::string ng = normalize_answer(gt);
  v.correct = np == ng;
  v.detail = v.correct ? "normalized strings equal" : "normalized strings differ";
  return v;
}

bool relaxed_acc(std::string_view pred, std::string_view gt) {
  return gpt_acc_local(pred, gt).correct;
}

SynonymTable SynonymTable::defaults() {
  SynonymTable t;
  struct Entry {
    ChartTypeId id;
    std::initializer_list<const char*> names;
  };
  static const Entry entries[] = {
      {ChartTypeId::bar,
       {"bar", "bar chart", "bar graph", "bar plot", "vertical bar chart",
        "column chart", "grouped bar chart", "stacked bar chart",
        "horizontal bar chart"}},
      {ChartTypeId::bar_num,
       {"bar_num", "bar chart with number", "bar chart with numbers",
        "bar chart with numerical data", "annotated bar chart",
        "bar chart with data labels", "labeled bar chart"}},
      {ChartTypeId::line,
       {"line", "line chart", "line graph", "line plot", "multi-line chart"}},
      {ChartTypeId::line_num,
       {"line_num", "line chart with number", "line chart with numbers",
        "line chart with numerical data", "annotated line chart",
        "line chart with data labels", "labeled line chart"}},
      {ChartTypeId::pie, {"pie", "pie chart", "pie graph", "pie plot"}},
      {ChartTypeId::ring,
       {"ring", "ring chart", "donut chart", "doughnut chart", "donut"}},
      {ChartTypeId::radar,
       {"radar", "radar chart", "spider chart", "web chart", "star plot"}},
      {ChartTypeId::box,
       {"box", "box plot", "boxplot", "box chart", "box-and-whisker plot",
        "box and whisker plot"}},
      {ChartTypeId::bar3d,
       {"bar3d", "3d bar", "3d bar chart", "3d-bar", "3d-bar chart",
        "three dimensional bar chart", "3d bar graph", "bar 3d"}},
      {ChartTypeId::histogram, {"histogram", "hist", "frequency histogram"}},
      {ChartTypeId::treemap, {"treemap", "tree map", "treemap chart"}},
      {ChartTypeId::rose,
       {"rose", "rose chart", "nightingale chart", "nightingale rose chart",
        "polar area chart", "coxcomb chart"}},
      {ChartTypeId::bubble,
       {"bubble", "bubble chart", "bubble plot", "bubble graph"}},
      {ChartTypeId::multi_axes,
       {"multi_axes", "multi-axes", "multi-axes chart", "multi axes chart",
        "multiple axes chart", "dual axis chart", "dual-axis chart",
        "combo chart"}},
      {ChartTypeId::area,
       {"area", "area chart", "area graph", "stacked area chart",
        "area plot"}},
      {ChartTypeId::heatmap, {"heatmap", "heat map", "heatmap chart"}},
      {ChartTypeId::funnel, {"funnel", "funnel chart", "funnel plot"}},
      {ChartTypeId::candlestick,
       {"candlestick", "candle", "candlestick chart", "candle chart",
        "k-line chart", "ohlc chart"}},
  };
  for (const Entry& e : entries)
    for (const char* name : e.names) t.add(name, e.id);
  return t;
}

SynonymTable SynonymTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open synonym table: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  SynonymTable t;
  if (j.contains("version")) t.version_ = j["version"].get<int>();
  const nlohmann::json& entries = j.contains("entries") ? j["entries"] : j;
  for (auto it = entries.begin(); it != entries.end(); ++it) {
    auto id = parse_chart_type(it.value().get<std::string>());
    if (!id)
      throw std::runtime_error("unknown canonical chart type: " +
                               it.value().get<std::string>());
    t.add(it.key(), *id);
  }
  return t;
}

void SynonymTable::add(std::string_view synonym, ChartTypeId target) {
  entries_[normalize_answer(synonym)] = target;
}

std::optional<ChartTypeId> SynonymTable::lookup(std::string_view text) const {
  auto it = entries_.find(normalize_answer(text));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool exact_match(std::string_view pred, std::string_view gt, MatchField field,
                 const SynonymTable& synonyms) {
  if (field == MatchField::title)
    return normalize_answer(pred) == normalize_answer(gt);
  auto gt_id = parse_chart_type(trim(gt));
  if (!gt_id) return false;
  auto pred_id = synonyms.lookup(pred);
  return pred_id && *pred_id == *gt_id;
}

}  // namespace chartkit::answers
