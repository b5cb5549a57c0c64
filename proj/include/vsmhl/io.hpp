/*
 * Copyright 2026 The vsmhl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef VSMHL_IO_HPP
#define VSMHL_IO_HPP

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vsmhl/errors.hpp"

#ifndef VSMHL_VERSION
#define VSMHL_VERSION "0.1.0"
#endif

namespace vsmhl {

inline constexpr const char *kLibraryVersion = VSMHL_VERSION;
inline constexpr int kSidecarSchemaVersion = 1;

using Cell = std::variant<std::int64_t, double, std::string>;

/// A named table with fixed columns; written as `<name>.csv`.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
      throw Error("Table::add: row width does not match columns of " + name);
    }
    rows.push_back(std::move(row));
  }
};

/// Doubles are printed with %.17g, which round-trips exactly.
inline std::string format_cell(const Cell &c) {
  if (const auto *i = std::get_if<std::int64_t>(&c)) {
    return std::to_string(*i);
  }
  if (const auto *d = std::get_if<double>(&c)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  const auto &s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') {
      q += '"';
    }
    q += ch;
  }
  return q + '"';
}

inline std::string to_csv(const Table &t) {
  std::ostringstream os;
  for (std::size_t k = 0; k < t.columns.size(); ++k) {
    os << (k ? "," : "") << t.columns[k];
  }
  os << '\n';
  for (const auto &row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      os << (k ? "," : "") << format_cell(row[k]);
    }
    os << '\n';
  }
  return os.str();
}

inline nlohmann::json sidecar_json(const Table &t, const nlohmann::json &resolved_config,
                                   std::uint64_t seed) {
  return {{"schema_version", kSidecarSchemaVersion},
          {"library_version", kLibraryVersion},
          {"table", t.name},
          {"columns", t.columns},
          {"rows", t.rows.size()},
          {"seed", seed},
          {"config", resolved_config}};
}

inline void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw Error("write failed for " + path.string());
  }
}

/// Writes `<dir>/<name>.csv` and its sidecar `<dir>/<name>.json`.
inline void write_table(const std::filesystem::path &dir, const Table &t,
                        const nlohmann::json &resolved_config, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  write_text(dir / (t.name + ".csv"), to_csv(t));
  write_text(dir / (t.name + ".json"), sidecar_json(t, resolved_config, seed).dump(2) + "\n");
}

} // namespace vsmhl

#endif // VSMHL_IO_HPP
