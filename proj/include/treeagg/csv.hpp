/*
 * Copyright 2026 The treeagg Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TREEAGG_CSV_HPP_
#define TREEAGG_CSV_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "treeagg/binning.hpp"
#include "treeagg/error.hpp"
#include "treeagg/file_io.hpp"

namespace treeagg {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  }
};

// RFC 4180: comma separated, optional double quotes, "" escapes a quote
// inside a quoted field, CRLF or LF line ends. Quoted fields may span lines.
inline CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  std::size_t line = 1;
  std::size_t i = 0;
  bool any = false;
  bool quoted_field = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    quoted_field = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty() && !any)) {
      records.push_back(std::move(record));
    }
    record.clear();
    any = false;
  };

  while (i < text.size()) {
    const char c = text[i];
    if (c == '"' && field.empty() && !quoted_field) {
      quoted_field = true;
      any = true;
      ++i;
      const std::size_t start_line = line;
      for (;;) {
        if (i >= text.size()) {
          throw FormatError("unterminated quoted field starting on line " +
                            std::to_string(start_line));
        }
        if (text[i] == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        if (text[i] == '\n') ++line;
        field.push_back(text[i++]);
      }
      if (i < text.size() && text[i] != ',' && text[i] != '\n' &&
          text[i] != '\r') {
        throw FormatError("unexpected character after closing quote on line " +
                          std::to_string(line));
      }
      continue;
    }
    if (c == ',') {
      end_field();
      any = true;
      ++i;
    } else if (c == '\r' || c == '\n') {
      end_record();
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      ++i;
      ++line;
    } else {
      if (quoted_field) {
        throw FormatError("unexpected character after closing quote on line " +
                          std::to_string(line));
      }
      field.push_back(c);
      any = true;
      ++i;
    }
  }
  if (any || !field.empty()) end_record();

  if (records.empty()) throw DataError("CSV input is empty");
  CsvTable table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw FormatError("row " + std::to_string(r) + " has " +
                        std::to_string(records[r].size()) +
                        " fields, header has " +
                        std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

inline CsvTable read_csv(const std::string& path) {
  const auto bytes = read_file(path);
  return parse_csv(std::string_view(
      reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(s);
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string format_csv(const CsvTable& table) {
  std::string out;
  auto put = [&](const std::vector<std::string>& rec) {
    for (std::size_t j = 0; j < rec.size(); ++j) {
      if (j) out.push_back(',');
      out += csv_escape(rec[j]);
    }
    out.push_back('\n');
  };
  put(table.header);
  for (const auto& r : table.rows) put(r);
  return out;
}

inline void write_csv(const std::string& path, const CsvTable& table) {
  write_file_atomic(path, format_csv(table));
}

// Shortest representation that reads back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline bool is_missing_marker(std::string_view s) {
  return s.empty() || s == "NaN";
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

// Missing markers give NaN; anything else must be a finite number.
inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (is_missing_marker(s)) return std::numeric_limits<double>::quiet_NaN();
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() ||
      !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

struct DatasetSchema {
  std::string target;
  std::set<std::string> categorical;
  std::set<std::string> ignore;
};

struct LoadedData {
  RawMatrix X;
  std::vector<std::string> target;
};

namespace detail {

inline std::string cell_ref(std::size_t row, const std::string& column) {
  // Row numbers count the header as line 1.
  return "row " + std::to_string(row + 2) + ", column '" + column + "'";
}

inline RawColumn column_from_table(const CsvTable& table, std::size_t j,
                                   FeatureKind kind) {
  const auto& name = table.header[j];
  if (kind == FeatureKind::kCategorical) {
    std::vector<std::string> values;
    values.reserve(table.rows.size());
    for (const auto& r : table.rows) {
      auto v = trim(r[j]);
      values.emplace_back(is_missing_marker(v) ? std::string_view{} : v);
    }
    return RawColumn::categories(name, std::move(values));
  }
  std::vector<double> values;
  values.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    auto v = parse_double(table.rows[i][j]);
    if (!v) {
      throw DataError("cannot parse '" + table.rows[i][j] + "' as a number at " +
                      cell_ref(i, name));
    }
    values.push_back(*v);
  }
  return RawColumn::continuous(name, std::move(values));
}

}  // namespace detail

// Every column except the target and ignored ones becomes a feature.
inline LoadedData to_dataset(const CsvTable& table,
                             const DatasetSchema& schema) {
  if (table.rows.empty()) throw DataError("CSV has a header but no rows");
  std::map<std::string, int> seen;
  for (const auto& h : table.header) {
    if (++seen[h] > 1) throw DataError("duplicate column '" + h + "'");
  }
  const auto t = table.column(schema.target);
  if (!t) throw DataError("target column '" + schema.target + "' not found");
  for (const auto& c : schema.categorical) {
    if (!table.column(c)) {
      throw DataError("categorical column '" + c + "' not found");
    }
  }
  for (const auto& c : schema.ignore) {
    if (!table.column(c)) throw DataError("ignored column '" + c + "' not found");
  }

  LoadedData out;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    const auto& name = table.header[j];
    if (j == *t || schema.ignore.count(name)) continue;
    const auto kind = schema.categorical.count(name) ? FeatureKind::kCategorical
                                                     : FeatureKind::kContinuous;
    out.X.columns.push_back(detail::column_from_table(table, j, kind));
  }
  if (out.X.columns.empty()) throw DataError("no feature columns");
  out.target.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    auto v = trim(table.rows[i][*t]);
    if (is_missing_marker(v)) {
      throw DataError("missing target value at " +
                      detail::cell_ref(i, schema.target));
    }
    out.target.emplace_back(v);
  }
  return out;
}

inline LoadedData load_csv(const std::string& path,
                           const DatasetSchema& schema) {
  return to_dataset(read_csv(path), schema);
}

// Pulls the columns a fitted mapper expects, by name.
inline RawMatrix select_features(const CsvTable& table,
                                 const BinMapper& mapper) {
  if (table.rows.empty()) throw DataError("CSV has a header but no rows");
  RawMatrix X;
  for (std::size_t f = 0; f < mapper.n_features(); ++f) {
    const auto j = table.column(mapper.names[f]);
    if (!j) {
      throw DataError("feature column '" + mapper.names[f] + "' not found");
    }
    X.columns.push_back(
        detail::column_from_table(table, *j, mapper.features[f].kind));
  }
  return X;
}

inline std::vector<double> parse_targets(const std::vector<std::string>& raw,
                                         const std::string& name = "target") {
  std::vector<double> y;
  y.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto v = parse_double(raw[i]);
    if (!v || std::isnan(*v)) {
      throw DataError("cannot parse '" + raw[i] + "' as a number at " +
                      detail::cell_ref(i, name));
    }
    y.push_back(*v);
  }
  return y;
}

// Class labels as written in the file, mapped to 0..K-1. Names sort
// numerically when every label is a number, otherwise lexicographically.
inline std::vector<std::string> class_names_of(
    const std::vector<std::string>& raw) {
  std::vector<std::string> names(raw.begin(), raw.end());
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  const bool numeric = std::all_of(names.begin(), names.end(), [](auto& s) {
    auto v = parse_double(s);
    return v && !std::isnan(*v);
  });
  if (numeric) {
    std::stable_sort(names.begin(), names.end(), [](auto& a, auto& b) {
      return *parse_double(a) < *parse_double(b);
    });
  }
  return names;
}

inline std::vector<double> encode_classes(
    const std::vector<std::string>& raw,
    const std::vector<std::string>& names) {
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < names.size(); ++k) index.emplace(names[k], k);
  std::vector<double> y;
  y.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto it = index.find(raw[i]);
    if (it == index.end()) {
      throw DataError("unknown class label '" + raw[i] + "' at row " +
                      std::to_string(i + 2));
    }
    y.push_back(static_cast<double>(it->second));
  }
  return y;
}

}  // namespace treeagg

#endif  // TREEAGG_CSV_HPP_
