#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chartkit/chart_types.hpp"

namespace chartkit {

// One table cell. Numeric cells keep both the parsed value and the original
// text so serialization round-trips formatted numbers like "1,200".
struct CellValue {
  enum class Kind { empty, numeric, text };

  Kind kind = Kind::empty;
  double number = 0.0;
  std::string raw;

  static CellValue empty() { return {}; }
  static CellValue classify(std::string_view raw_text);

  bool is_empty() const { return kind == Kind::empty; }
  bool is_numeric() const { return kind == Kind::numeric; }
  bool is_text() const { return kind == Kind::text; }

  friend bool operator==(const CellValue& a, const CellValue& b);
};

// Parsed chart data: row/column entity labels and a dense cell grid of
// dimensions |row_entities| x |col_entities|.
struct ChartTable {
  std::vector<std::string> row_entities;
  std::vector<std::string> col_entities;
  std::vector<std::vector<CellValue>> cells;
  std::optional<std::string> title;
  std::optional<ChartTypeId> chart_type;
  // Header corner label naming the row-entity axis; metadata only, not part
  // of table equality.
  std::string axis_label = "Category";

  std::size_t rows() const { return row_entities.size(); }
  std::size_t cols() const { return col_entities.size(); }
};

// Equality on entity labels and cell classifications (title/type/axis label
// excluded).
bool same_data(const ChartTable& a, const ChartTable& b);

struct Triplet {
  std::string row;
  std::string col;
  CellValue value;

  friend bool operator==(const Triplet& a, const Triplet& b) {
    return a.row == b.row && a.col == b.col && a.value == b.value;
  }
};

// Unordered multiset of (row, col, value) facts; one per non-empty cell.
struct TripletSet {
  std::vector<Triplet> items;

  std::size_t size() const { return items.size(); }
};

// Multiset equality, insensitive to production order.
bool same_triplets(const TripletSet& a, const TripletSet& b);

struct CsvError : std::runtime_error {
  enum class Kind { empty_input, malformed, non_positive_length };

  CsvError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

// Parses chart CSV text. The first row is the header: its first field names
// the row-entity axis, the remaining fields are column entities. Each later
// row starts with a row entity followed by one cell per column.
//
// Throws CsvError: empty_input for blank text, malformed for ragged rows,
// unbalanced quotes or blank entity labels, non_positive_length when the
// header has no data rows or no value columns.
ChartTable parse_csv(std::string_view text);

// Inverse of parse_csv; quoting follows the comma/double-quote dialect.
std::string serialize_csv(const ChartTable& table);

// One triplet per non-empty cell: (row_entities[i], col_entities[j], cell).
TripletSet to_triplets(const ChartTable& table);

// Swaps rows and columns; title and type are preserved.
ChartTable transpose(const ChartTable& table);

// For value-style chart types (pie, ring, treemap, funnel, rose) every
// column entity is replaced with the canonical token "value". Applied
// identically to prediction and ground truth before structural matching.
ChartTable apply_entity_replacement(const ChartTable& table, ChartTypeId chart_type);

}  // namespace chartkit
