#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "quasimean/errors.hpp"
#include "quasimean/sample.hpp"

namespace quasimean::cli {

struct DatasetRow {
  double value = 0.0;
  std::optional<double> weight;
};

struct Dataset {
  std::vector<DatasetRow> rows;
  std::string source;
  std::optional<std::string> label;

  [[nodiscard]] bool weighted() const noexcept { return !rows.empty() && rows.front().weight.has_value(); }

  [[nodiscard]] Sample sample() const {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r.value);
    return Sample(std::move(v));
  }

  [[nodiscard]] std::vector<double> weights() const {
    std::vector<double> w;
    w.reserve(rows.size());
    for (const auto& r : rows) w.push_back(r.weight.value_or(0.0));
    return w;
  }
};

enum class InputFormat { csv, json_lines };

/// ".jsonl" and ".ndjson" are JSON lines; everything else, including "-", is CSV.
inline InputFormat format_for_path(std::string_view path) {
  if (path.ends_with(".jsonl") || path.ends_with(".ndjson")) return InputFormat::json_lines;
  return InputFormat::csv;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.starts_with('+')) s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline double finite_or_throw(double v, std::size_t line, const char* field) {
  if (!std::isfinite(v)) throw ParseError(line, std::string(field) + " is not finite");
  return v;
}

inline DatasetRow parse_csv_record(std::string_view line, std::size_t lineno) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (fields.size() > 2) throw ParseError(lineno, "expected at most two columns (value, weight)");
  DatasetRow row;
  const auto value = parse_number(fields[0]);
  if (!value) throw ParseError(lineno, "value '" + std::string(fields[0]) + "' is not a number");
  row.value = finite_or_throw(*value, lineno, "value");
  if (fields.size() == 2 && !fields[1].empty()) {
    const auto weight = parse_number(fields[1]);
    if (!weight) throw ParseError(lineno, "weight '" + std::string(fields[1]) + "' is not a number");
    row.weight = finite_or_throw(*weight, lineno, "weight");
  }
  return row;
}

inline DatasetRow parse_json_record(std::string_view line, std::size_t lineno) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(lineno, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(lineno, "record is not a JSON object");
  const auto v = j.find("value");
  if (v == j.end() || !v->is_number()) throw ParseError(lineno, "record lacks a numeric \"value\"");
  DatasetRow row;
  row.value = finite_or_throw(v->get<double>(), lineno, "value");
  const auto w = j.find("weight");
  if (w != j.end() && !w->is_null()) {
    if (!w->is_number()) throw ParseError(lineno, "\"weight\" is not a number");
    row.weight = finite_or_throw(w->get<double>(), lineno, "weight");
  }
  return row;
}

}  // namespace detail

/// Reads one record per line. CSV: value, optional weight, and a header line
/// recognised by a non-numeric first field. JSON lines: objects with "value"
/// and optional "weight". Blank lines are ignored; line numbers are 1-based.
inline Dataset parse_dataset(std::istream& in, InputFormat format, std::string source = "-") {
  Dataset d;
  d.source = std::move(source);
  std::string line;
  std::size_t lineno = 0;
  bool first_record = true;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (lineno == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (detail::trim(view).empty()) continue;
    if (format == InputFormat::csv) {
      if (first_record) {
        first_record = false;
        const auto first_field = view.substr(0, view.find(','));
        if (!detail::parse_number(first_field)) continue;  // header
      }
      d.rows.push_back(detail::parse_csv_record(view, lineno));
    } else {
      first_record = false;
      d.rows.push_back(detail::parse_json_record(view, lineno));
    }
  }
  if (d.rows.empty()) throw ParseError(lineno, "no data records");
  const bool any = std::any_of(d.rows.begin(), d.rows.end(), [](const auto& r) { return r.weight.has_value(); });
  const bool all = std::all_of(d.rows.begin(), d.rows.end(), [](const auto& r) { return r.weight.has_value(); });
  if (any && !all) throw MixedWeightError("some records carry a weight and others do not");
  return d;
}

inline Dataset parse_dataset(std::string_view text, InputFormat format, std::string source = "-") {
  std::istringstream in{std::string(text)};
  return parse_dataset(in, format, std::move(source));
}

}  // namespace quasimean::cli
