// Copyright 2026 The ipitch Authors.
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

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ipitch {

// Minimal comma-separated table: header row required, no quoting.
class CsvTable {
 public:
  static CsvTable read(const std::filesystem::path& path);
  static CsvTable parse(std::string_view text, const std::string& origin = "<memory>");

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }

  // Index of a required column; throws ParseFailure when absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;

  const std::string& at(std::size_t row, std::size_t col) const { return rows_[row][col]; }
  double number(std::size_t row, std::size_t col) const;
  long integer(std::size_t row, std::size_t col) const;

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
};

// Shortest-safe decimal: 17 significant digits, round-trips any double.
std::string format_double(double value);

// Parses a full string as a double with '.' decimals; throws ParseFailure.
double parse_double(std::string_view text, std::string_view context);

// Writes `contents` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& contents);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace ipitch
