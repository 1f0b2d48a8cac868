#include "chartkit/chart_types.hpp"

namespace chartkit {

std::string_view chart_type_name(ChartTypeId t) {
  switch (t) {
    case ChartTypeId::bar: return "bar";
    case ChartTypeId::bar_num: return "bar_num";
    case ChartTypeId::line: return "line";
    case ChartTypeId::line_num: return "line_num";
    case ChartTypeId::pie: return "pie";
    case ChartTypeId::ring: return "ring";
    case ChartTypeId::radar: return "radar";
    case ChartTypeId::box: return "box";
    case ChartTypeId::bar3d: return "bar3d";
    case ChartTypeId::histogram: return "histogram";
    case ChartTypeId::treemap: return "treemap";
    case ChartTypeId::rose: return "rose";
    case ChartTypeId::bubble: return "bubble";
    case ChartTypeId::multi_axes: return "multi_axes";
    case ChartTypeId::area: return "area";
    case ChartTypeId::heatmap: return "heatmap";
    case ChartTypeId::funnel: return "funnel";
    case ChartTypeId::candlestick: return "candlestick";
  }
  return "unknown";
}

std::string_view chart_type_heading(ChartTypeId t) {
  switch (t) {
    case ChartTypeId::bar3d: return "3D-bar";
    case ChartTypeId::multi_axes: return "multi";
    case ChartTypeId::histogram: return "hist";
    case ChartTypeId::candlestick: return "candle";
    default: return chart_type_name(t);
  }
}

std::optional<ChartTypeId> parse_chart_type(std::string_view name) {
  for (ChartTypeId t : all_chart_types()) {
    if (chart_type_name(t) == name) return t;
  }
  return std::nullopt;
}

const std::array<ChartTypeId, kChartTypeCount>& report_column_order() {
  static const std::array<ChartTypeId, kChartTypeCount> order = {
      ChartTypeId::bar,     ChartTypeId::bar_num,   ChartTypeId::line,
      ChartTypeId::line_num, ChartTypeId::pie,       ChartTypeId::ring,
      ChartTypeId::box,     ChartTypeId::histogram, ChartTypeId::treemap,
      ChartTypeId::rose,    ChartTypeId::area,      ChartTypeId::bar3d,
      ChartTypeId::bubble,  ChartTypeId::multi_axes, ChartTypeId::radar,
      ChartTypeId::heatmap, ChartTypeId::funnel,    ChartTypeId::candlestick};
  return order;
}

}  // namespace chartkit
