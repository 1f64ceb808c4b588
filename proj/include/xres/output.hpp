#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "xres/errors.hpp"

namespace xres {

inline constexpr int kSchemaVersion = 1;

using Cell = std::variant<double, long long, bool, std::string>;

struct Table {
  std::string schema;  // e.g. "transfer"
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("row width does not match the table header");
    rows.push_back(std::move(row));
  }
};

enum class OutputFormat { csv, json };

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError("format must be csv or json");
}

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  return std::get<std::string>(c);
}

inline std::string cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c))
    return std::isfinite(*d) ? format_double(*d) : nlohmann::json(format_double(*d)).dump();
  if (const auto* s = std::get_if<std::string>(&c)) return nlohmann::json(*s).dump();
  return cell_text(c);
}

// CSV: "# xres <schema> v1" line, header, rows.  JSON lines: header object, then one object per row.
inline void write_table(std::ostream& os, const Table& t, OutputFormat f) {
  if (f == OutputFormat::csv) {
    os << "# xres " << t.schema << " v" << kSchemaVersion << "\r\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
    os << "\r\n";
    for (const auto& r : t.rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(cell_text(r[i]));
      os << "\r\n";
    }
    return;
  }
  os << "{\"schema\":" << nlohmann::json(t.schema).dump() << ",\"version\":" << kSchemaVersion << ",\"columns\":"
     << nlohmann::json(t.columns).dump() << "}\n";
  for (const auto& r : t.rows) {
    os << '{';
    for (std::size_t i = 0; i < r.size(); ++i)
      os << (i ? "," : "") << nlohmann::json(t.columns[i]).dump() << ':' << cell_json(r[i]);
    os << "}\n";
  }
}

}  // namespace xres
