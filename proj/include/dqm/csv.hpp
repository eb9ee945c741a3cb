#pragma once

// Minimal RFC 4180 reader/writer: comma separated, double-quote quoting with
// "" escapes, LF or CRLF line ends. Rows carry their 1-based starting line.

#include <cmath>
#include <cstdio>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dqm/core.hpp"

namespace dqm::csv {

struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

inline std::vector<Row> read_all(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::vector<Row> rows;
  Row row;
  std::string field;
  std::size_t line = 1;
  row.line = 1;
  bool quoted = false;
  bool any = false;  // current row has content
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field += ch;
      }
      continue;
    }
    switch (ch) {
      case '"':
        quoted = true;
        any = true;
        break;
      case ',':
        row.fields.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        if (any || !field.empty()) {
          row.fields.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        field.clear();
        row = Row{};
        row.line = ++line;
        any = false;
        break;
      default:
        field += ch;
        any = true;
    }
  }
  if (quoted) throw InputError("line " + std::to_string(row.line) + ": unterminated quote");
  if (any || !field.empty()) {
    row.fields.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string quote(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// 9 significant digits; NaN is written as an empty field.
inline std::string number(double v) {
  if (std::isnan(v)) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
  return buf;
}

inline std::string number(std::size_t v) { return std::to_string(v); }

inline std::string number(const std::optional<double>& v) {
  return v ? number(*v) : std::string{};
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << quote(fields[i]);
  }
  out << '\n';
}

// Column index lookup with a helpful error for missing headers.
inline std::size_t column(const Row& header, std::string_view name) {
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    if (header.fields[i] == name) return i;
  }
  throw InputError("line " + std::to_string(header.line) + ": missing column '" +
                   std::string(name) + "'");
}

inline unsigned long long parse_unsigned(const Row& row, std::size_t col, std::string_view what) {
  auto fail = [&]() -> InputError {
    return InputError("line " + std::to_string(row.line) + ": invalid " + std::string(what));
  };
  if (col >= row.fields.size()) throw fail();
  const std::string& s = row.fields[col];
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) throw fail();
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw fail();
  }
}

inline double parse_double(const Row& row, std::size_t col, std::string_view what) {
  auto fail = [&]() -> InputError {
    return InputError("line " + std::to_string(row.line) + ": invalid " + std::string(what));
  };
  if (col >= row.fields.size()) throw fail();
  const std::string& s = row.fields[col];
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw fail();
  }
  if (used != s.size() || !std::isfinite(v)) throw fail();
  return v;
}

}  // namespace dqm::csv
