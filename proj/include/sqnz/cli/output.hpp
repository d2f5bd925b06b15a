// Copyright (c) 2026 The sqnz authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Tabular command output rendered as CSV (comment lines, header, rows) or as a
// JSON document that also embeds the resolved config, plus atomic file writes.

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace sqnz::cli {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::string command;
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::json config;                          ///< resolved run config
  nlohmann::json extra = nlohmann::json::object(); ///< JSON-only sections
};

/// 17 significant digits; nan and inf spelled out.
std::string format_double(double x);

std::string render_csv(const Table& t);
std::string render_json(const Table& t);

/// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Writes to `out` when set, otherwise to `fallback`.
void emit(const std::optional<std::filesystem::path>& out, const std::string& content,
          std::ostream& fallback);

} // namespace sqnz::cli
