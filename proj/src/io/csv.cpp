#include <charconv>
#include <cmath>
#include <system_error>

#include "coco/errors.hpp"
#include "coco/io.hpp"

namespace coco::io {

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ContractError(source + ": missing column '" + std::string(name) + "'");
}

std::string CsvTable::where(std::size_t row) const {
  return source + ":" + std::to_string(line_numbers.at(row)) + ": ";
}

CsvTable parse_csv(std::string_view text, std::string source) {
  CsvTable t;
  t.source = std::move(source);
  std::vector<std::string> fields;
  std::string field;
  std::size_t line = 1;
  std::size_t record_line = 1;
  bool in_quotes = false;
  bool field_started = false;

  auto end_record = [&] {
    fields.push_back(std::move(field));
    field.clear();
    const bool blank = fields.size() == 1 && fields[0].empty() && !field_started;
    if (!blank) {
      if (t.header.empty()) {
        t.header = std::move(fields);
      } else {
        if (fields.size() != t.header.size()) {
          throw ContractError(t.source + ":" + std::to_string(record_line) +
                              ": expected " + std::to_string(t.header.size()) +
                              " fields, got " + std::to_string(fields.size()));
        }
        t.rows.push_back(std::move(fields));
        t.line_numbers.push_back(record_line);
      }
    }
    fields.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) {
    throw ContractError(t.source + ":" + std::to_string(record_line) +
                        ": unterminated quoted field");
  }
  if (field_started || !field.empty() || !fields.empty()) end_record();
  if (t.header.empty()) throw ContractError(t.source + ": empty file, no header");
  return t;
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_file(path), path.string()); }

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const std::string& where) {
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
    throw ContractError(where + "not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view s, const std::string& where) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
    throw ContractError(where + "not a non-negative integer: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace coco::io
