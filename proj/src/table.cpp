#include "chartkit/table.hpp"

#include <algorithm>
#include <tuple>

#include "chartkit/numbers.hpp"

namespace chartkit {

CellValue CellValue::classify(std::string_view raw_text) {
  CellValue v;
  v.raw = std::string(raw_text);
  std::string_view trimmed = trim(raw_text);
  if (trimmed.empty()) {
    v.kind = Kind::empty;
    v.raw.clear();
    return v;
  }
  if (auto num = parse_number(trimmed)) {
    v.kind = Kind::numeric;
    v.number = *num;
  } else {
    v.kind = Kind::text;
  }
  return v;
}

bool operator==(const CellValue& a, const CellValue& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case CellValue::Kind::empty: return true;
    case CellValue::Kind::numeric: return a.number == b.number && a.raw == b.raw;
    case CellValue::Kind::text: return a.raw == b.raw;
  }
  return false;
}

bool same_data(const ChartTable& a, const ChartTable& b) {
  return a.row_entities == b.row_entities && a.col_entities == b.col_entities &&
         a.cells == b.cells;
}

bool same_triplets(const TripletSet& a, const TripletSet& b) {
  if (a.items.size() != b.items.size()) return false;
  auto key = [](const Triplet& t) {
    return std::tuple<const std::string&, const std::string&, int, double,
                      const std::string&>(
        t.row, t.col, static_cast<int>(t.value.kind), t.value.number,
        t.value.raw);
  };
  auto sorted = [&](const TripletSet& s) {
    std::vector<Triplet> v = s.items;
    std::sort(v.begin(), v.end(),
              [&](const Triplet& x, const Triplet& y) { return key(x) < key(y); });
    return v;
  };
  return sorted(a) == sorted(b);
}

namespace {

// Splits CSV text into rows of fields. Comma delimiter, double-quote
// quoting with "" escapes, \n or \r\n line endings.
std::vector<std::vector<std::string>> split_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty())
          throw CsvError(CsvError::Kind::malformed,
                         "quote inside unquoted field");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        end_row();
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(c);
        field_started = true;
        break;
    }
  }
  if (in_quotes)
    throw CsvError(CsvError::Kind::malformed, "unbalanced quote");
  if (field_started || !field.empty() || !row.empty()) end_row();
  // Blank lines carry no cells; drop them wherever they appear.
  std::erase_if(rows, [](const std::vector<std::string>& r) {
    return std::all_of(r.begin(), r.end(),
                       [](const std::string& f) { return trim(f).empty(); });
  });
  return rows;
}

std::string quote_field(const std::string& f) {
  bool needs = f.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

ChartTable parse_csv(std::string_view text) {
  if (trim(text).empty())
    throw CsvError(CsvError::Kind::empty_input, "empty CSV input");

  auto rows = split_csv(text);
  if (rows.empty())
    throw CsvError(CsvError::Kind::empty_input, "empty CSV input");

  const auto& header = rows.front();
  if (header.size() < 2)
    throw CsvError(CsvError::Kind::non_positive_length,
                   "header has no value columns");
  if (rows.size() < 2)
    throw CsvError(CsvError::Kind::non_positive_length,
                   "header present but zero data rows");

  ChartTable table;
  table.axis_label = std::string(trim(header[0]));
  for (std::size_t j = 1; j < header.size(); ++j) {
    std::string label(trim(header[j]));
    if (label.empty())
      throw CsvError(CsvError::Kind::malformed, "blank column entity");
    table.col_entities.push_back(std::move(label));
  }

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size())
      throw CsvError(CsvError::Kind::malformed, "ragged row " + std::to_string(r));
    std::string label(trim(row[0]));
    if (label.empty())
      throw CsvError(CsvError::Kind::malformed, "blank row entity");
    table.row_entities.push_back(std::move(label));
    std::vector<CellValue> cells;
    cells.reserve(row.size() - 1);
    for (std::size_t j = 1; j < row.size(); ++j)
      cells.push_back(CellValue::classify(row[j]));
    table.cells.push_back(std::move(cells));
  }
  return table;
}

std::string serialize_csv(const ChartTable& table) {
  std::string out = quote_field(table.axis_label);
  for (const auto& c : table.col_entities) {
    out.push_back(',');
    out += quote_field(c);
  }
  out.push_back('\n');
  for (std::size_t i = 0; i < table.rows(); ++i) {
    out += quote_field(table.row_entities[i]);
    for (std::size_t j = 0; j < table.cols(); ++j) {
      out.push_back(',');
      out += quote_field(table.cells[i][j].raw);
    }
    out.push_back('\n');
  }
  return out;
}

TripletSet to_triplets(const ChartTable& table) {
  TripletSet set;
  set.items.reserve(table.rows() * table.cols());
  for (std::size_t i = 0; i < table.rows(); ++i) {
    for (std::size_t j = 0; j < table.cols(); ++j) {
      const CellValue& v = table.cells[i][j];
      if (v.is_empty()) continue;
      set.items.push_back({table.row_entities[i], table.col_entities[j], v});
    }
  }
  return set;
}

ChartTable transpose(const ChartTable& table) {
  ChartTable out;
  out.row_entities = table.col_entities;
  out.col_entities = table.row_entities;
  out.title = table.title;
  out.chart_type = table.chart_type;
  out.axis_label = table.axis_label;
  out.cells.assign(table.cols(), std::vector<CellValue>(table.rows()));
  for (std::size_t i = 0; i < table.rows(); ++i)
    for (std::size_t j = 0; j < table.cols(); ++j)
      out.cells[j][i] = table.cells[i][j];
  return out;
}

ChartTable apply_entity_replacement(const ChartTable& table, ChartTypeId chart_type) {
  if (!uses_entity_replacement(chart_type)) return table;
  ChartTable out = table;
  for (auto& c : out.col_entities) c = "value";
  return out;
}

}  // namespace chartkit
