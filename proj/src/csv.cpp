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

#include "ipitch/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ipitch/error.hpp"

namespace ipitch {
namespace {

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

}  // namespace

CsvTable CsvTable::read(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(ErrorKind::MissingInput, "missing input file " + path.string());
  return parse(read_text_file(path), path.string());
}

CsvTable CsvTable::parse(std::string_view text, const std::string& origin) {
  CsvTable table;
  table.origin_ = origin;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    auto fields = split_fields(line);
    if (!have_header) {
      table.header_ = std::move(fields);
      for (std::size_t i = 0; i < table.header_.size(); ++i) table.index_[table.header_[i]] = i;
      have_header = true;
      continue;
    }
    if (fields.size() != table.header_.size())
      fail(ErrorKind::ParseFailure, origin + ":" + std::to_string(line_no) + ": expected " +
                                        std::to_string(table.header_.size()) + " fields, got " +
                                        std::to_string(fields.size()));
    table.rows_.push_back(std::move(fields));
    if (end == text.size()) break;
  }
  if (!have_header) fail(ErrorKind::ParseFailure, origin + ": missing header row");
  return table;
}

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end())
    fail(ErrorKind::ParseFailure, origin_ + ": missing column '" + std::string(name) + "'");
  return it->second;
}

bool CsvTable::has_column(std::string_view name) const {
  return index_.count(std::string(name)) > 0;
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  return parse_double(rows_[row][col], origin_ + " row " + std::to_string(row + 2) + " column " + header_[col]);
}

long CsvTable::integer(std::size_t row, std::size_t col) const {
  const std::string& s = rows_[row][col];
  long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    fail(ErrorKind::ParseFailure, origin_ + " row " + std::to_string(row + 2) + ": '" + s +
                                      "' is not an integer");
  return value;
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_double(std::string_view text, std::string_view context) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    fail(ErrorKind::ParseFailure, std::string(context) + ": '" + std::string(text) + "' is not a number");
  return value;
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::IoFailure, "cannot write " + path.string());
  os << contents;
  if (!os) fail(ErrorKind::IoFailure, "short write to " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::MissingInput, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ipitch
