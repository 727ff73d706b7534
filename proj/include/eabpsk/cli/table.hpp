#pragma once

// In-memory result tables and their CSV / JSON serialisations.
//
// CSV: optional '# key=value' metadata lines, a header line, then one line per
// row; '\n' line endings, '.' decimal separator, doubles with 17 significant
// digits. JSON: {"meta": {...}, "rows": [{column: value, ...}, ...]}.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace eabpsk::cli {

using Cell = std::variant<std::int64_t, double, std::string>;
using Row = std::vector<Cell>;
using Meta = std::vector<std::pair<std::string, std::string>>;

struct Table {
  std::vector<std::string> columns;
  std::vector<Row> rows;
  Meta meta;
};

enum class Format { csv, json };

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string format_cell(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  return std::get<std::string>(c);
}

// Numeric cells compare by value regardless of integer/double storage.
inline bool same_value(const Cell& a, const Cell& b) {
  const auto as_double = [](const Cell& c, double& out) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) {
      out = static_cast<double>(*i);
      return true;
    }
    if (const auto* d = std::get_if<double>(&c)) {
      out = *d;
      return true;
    }
    return false;
  };
  double x = 0.0;
  double y = 0.0;
  const bool nx = as_double(a, x);
  const bool ny = as_double(b, y);
  if (nx != ny) return false;
  if (!nx) return std::get<std::string>(a) == std::get<std::string>(b);
  return x == y || (std::isnan(x) && std::isnan(y));
}

inline bool same_rows(const Table& a, const Table& b) {
  if (a.columns != b.columns || a.rows.size() != b.rows.size()) return false;
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    if (a.rows[r].size() != b.rows[r].size()) return false;
    for (std::size_t c = 0; c < a.rows[r].size(); ++c)
      if (!same_value(a.rows[r][c], b.rows[r][c])) return false;
  }
  return true;
}

inline void check_shape(const Table& t) {
  if (t.columns.empty()) throw std::invalid_argument("table has no header");
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) {
      throw std::invalid_argument("row width does not match the header");
    }
  }
}

inline std::string to_csv(const Table& t) {
  check_shape(t);
  std::string out;
  for (const auto& [key, value] : t.meta) out += "# " + key + "=" + value + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += t.columns[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json to_json(const Table& t) {
  check_shape(t);
  nlohmann::ordered_json doc;
  doc["meta"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : t.meta) doc["meta"][key] = value;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::visit([&](const auto& v) { obj[t.columns[i]] = v; }, row[i]);
    }
    doc["rows"].push_back(std::move(obj));
  }
  return doc;
}

inline std::string serialize(const Table& t, Format format) {
  if (format == Format::csv) return to_csv(t);
  return to_json(t).dump(2) + "\n";
}

/// Writes the table to `path`; an IoError names the path on failure.
inline void emit_table(const Table& t, Format format, const std::string& path) {
  const std::string text = serialize(t, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output file '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing output file '" + path + "'");
}

namespace detail {

inline Cell parse_cell(std::string_view s) {
  if (s.empty()) return std::string{};
  {
    std::int64_t i = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), i);
    if (res.ec == std::errc{} && res.ptr == s.data() + s.size()) return i;
  }
  {
    double d = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), d);
    if (res.ec == std::errc{} && res.ptr == s.data() + s.size()) return d;
  }
  return std::string(s);
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    parts.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace detail

/// Parses the CSV produced by to_csv, metadata lines included.
inline Table parse_csv(std::string_view text) {
  Table t;
  bool header_seen = false;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    if (line.starts_with("# ")) {
      const std::string_view kv = line.substr(2);
      const std::size_t eq = kv.find('=');
      if (eq == std::string_view::npos) throw std::invalid_argument("malformed metadata line");
      t.meta.emplace_back(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
      continue;
    }
    const auto parts = detail::split(line, ',');
    if (!header_seen) {
      for (auto p : parts) t.columns.emplace_back(p);
      header_seen = true;
      continue;
    }
    if (parts.size() != t.columns.size()) throw std::invalid_argument("ragged CSV row");
    Row row;
    row.reserve(parts.size());
    for (auto p : parts) row.push_back(detail::parse_cell(p));
    t.rows.push_back(std::move(row));
  }
  if (!header_seen) throw std::invalid_argument("CSV has no header line");
  return t;
}

inline Table parse_json(std::string_view text) {
  const auto doc = nlohmann::ordered_json::parse(text);
  Table t;
  for (const auto& [key, value] : doc.at("meta").items()) {
    t.meta.emplace_back(key, value.get<std::string>());
  }
  for (const auto& obj : doc.at("rows")) {
    if (t.columns.empty()) {
      for (const auto& [key, value] : obj.items()) t.columns.push_back(key);
    }
    Row row;
    for (const auto& col : t.columns) {
      const auto& v = obj.at(col);
      if (v.is_number_integer()) {
        row.emplace_back(v.get<std::int64_t>());
      } else if (v.is_number()) {
        row.emplace_back(v.get<double>());
      } else {
        row.emplace_back(v.get<std::string>());
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace eabpsk::cli
