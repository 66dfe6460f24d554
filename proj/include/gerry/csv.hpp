// Copyright 2026 The gerry Authors
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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace gerry::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row
  std::string source;

  std::optional<std::size_t> find_column(std::string_view name) const;
  std::size_t column(std::string_view name) const;  // throws ParseError
};

// Splits one record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_line(std::string_view line);

Table read_file(const std::filesystem::path& path);
Table read_text(std::string_view text, std::string source = "<memory>");

// Field converters; errors name the table, line and column.
std::int64_t to_int(const Table& t, std::size_t row, std::size_t col);
double to_double(const Table& t, std::size_t row, std::size_t col);

// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace gerry::csv
