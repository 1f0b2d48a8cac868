#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace chartkit {

// The 18 chart types the toolkit knows about.
enum class ChartTypeId {
  bar,
  bar_num,
  line,
  line_num,
  pie,
  ring,
  radar,
  box,
  bar3d,
  histogram,
  treemap,
  rose,
  bubble,
  multi_axes,
  area,
  heatmap,
  funnel,
  candlestick,
};

inline constexpr std::size_t kChartTypeCount = 18;

// Perception difficulty class, which selects the tolerance table used by the
// structural-extraction metric.
enum class Difficulty { normal, difficult };

constexpr std::array<ChartTypeId, kChartTypeCount> all_chart_types() {
  return {ChartTypeId::bar,     ChartTypeId::bar_num, ChartTypeId::line,
          ChartTypeId::line_num, ChartTypeId::pie,     ChartTypeId::ring,
          ChartTypeId::radar,   ChartTypeId::box,     ChartTypeId::bar3d,
          ChartTypeId::histogram, ChartTypeId::treemap, ChartTypeId::rose,
          ChartTypeId::bubble,  ChartTypeId::multi_axes, ChartTypeId::area,
          ChartTypeId::heatmap, ChartTypeId::funnel,  ChartTypeId::candlestick};
}

constexpr Difficulty difficulty_of(ChartTypeId t) {
  switch (t) {
    case ChartTypeId::rose:
    case ChartTypeId::area:
    case ChartTypeId::bar3d:
    case ChartTypeId::bubble:
    case ChartTypeId::multi_axes:
    case ChartTypeId::radar:
      return Difficulty::difficult;
    default:
      return Difficulty::normal;
  }
}

// Value-style chart types whose column labels are replaced by a canonical
// token before structural comparison (entity replacement).
constexpr bool uses_entity_replacement(ChartTypeId t) {
  switch (t) {
    case ChartTypeId::pie:
    case ChartTypeId::ring:
    case ChartTypeId::treemap:
    case ChartTypeId::funnel:
    case ChartTypeId::rose:
      return true;
    default:
      return false;
  }
}

// Five high-frequency types that get extra weight when sampling the
// generation pools.
constexpr bool is_general_type(ChartTypeId t) {
  switch (t) {
    case ChartTypeId::bar:
    case ChartTypeId::bar_num:
    case ChartTypeId::line:
    case ChartTypeId::line_num:
    case ChartTypeId::pie:
      return true;
    default:
      return false;
  }
}

// Canonical identifier, e.g. "bar3d", "multi_axes".
std::string_view chart_type_name(ChartTypeId t);

// Short heading used in class-wise report tables, e.g. "3D-bar", "multi".
std::string_view chart_type_heading(ChartTypeId t);

std::optional<ChartTypeId> parse_chart_type(std::string_view name);

// Column order of class-wise report tables: general types first, then
// fine-grained, then domain-specific.
const std::array<ChartTypeId, kChartTypeCount>& report_column_order();

}  // namespace chartkit
