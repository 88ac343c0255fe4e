#pragma once

// Tabular output: CSV with '#' metadata lines, or a JSON document with the
// same content. Numbers use the shortest round-trip decimal form.

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fewave/config.hpp"

namespace fewave {

[[nodiscard]] inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return std::signbit(v) ? "-0" : "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
  return std::string(buf, res.ptr);
}

/// A cell is a number or a short string label.
using Cell = nlohmann::ordered_json;

struct Table {
  std::vector<std::pair<std::string, std::string>> meta;  // ordered
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_meta(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("Table: row width does not match the columns");
    rows.push_back(std::move(row));
  }

  /// Numeric value at (row, column name).
  [[nodiscard]] double number(std::size_t row, const std::string& column) const {
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (columns[c] == column) return rows.at(row).at(c).get<double>();
    throw std::out_of_range("Table: no column " + column);
  }
};

namespace io_detail {

inline std::string csv_field(const Cell& c) {
  if (c.is_number()) return format_double(c.get<double>());
  if (c.is_string()) {
    const auto s = c.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  }
  if (c.is_null()) return "";
  return c.dump();
}

}  // namespace io_detail

inline void write_csv(std::ostream& out, const Table& t) {
  for (const auto& [k, v] : t.meta) out << "# " << k << ": " << v << '\n';
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << io_detail::csv_field(row[c]);
    out << '\n';
  }
}

[[nodiscard]] inline nlohmann::ordered_json table_json(const Table& t) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.meta) meta[k] = v;
  doc["meta"] = meta;
  doc["columns"] = t.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const auto& c : row) {
      // Non-finite numbers have no JSON literal; spell them as strings.
      if (c.is_number_float() && !std::isfinite(c.get<double>())) r.push_back(format_double(c.get<double>()));
      else r.push_back(c);
    }
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  return doc;
}

inline void write_table(std::ostream& out, const Table& t, OutputFormat format) {
  if (format == OutputFormat::csv) {
    write_csv(out, t);
  } else {
    out << table_json(t).dump(2) << '\n';
  }
}

/// Writes to `path`, or to `fallback` when no path is set.
inline void write_output(const Table& t, const OutputSpec& spec, std::ostream& fallback) {
  if (!spec.path) {
    write_table(fallback, t, spec.format);
    return;
  }
  std::ofstream f(*spec.path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(*spec.path + ": cannot open for writing");
  write_table(f, t, spec.format);
  f.flush();
  if (!f) throw std::runtime_error(*spec.path + ": write failed");
}

}  // namespace fewave
