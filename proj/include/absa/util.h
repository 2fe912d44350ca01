// Copyright 2026 The absa Authors.
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

#ifndef ABSA_UTIL_H_
#define ABSA_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace absa {

std::uint32_t fnv1a32(std::string_view bytes);
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex_digest(std::uint64_t h);  // 16 lowercase hex digits

std::string to_lower_ascii(std::string_view s);
std::string_view trim(std::string_view s);

// Minimal RFC 4180 CSV: quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_field(std::string_view value);

// Reads a whole CSV file: first row is the header. Blank lines are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};
CsvTable read_csv(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Iterates a newline-delimited text, yielding non-comment, non-blank lines.
std::vector<std::string_view> data_lines(std::string_view text);

// Formats a real with fixed decimals and no locale influence.
std::string format_fixed(double v, int decimals);
// Shortest text that parses back to exactly `v`.
std::string format_roundtrip(double v);

// Structured logging: one JSON object per line on standard error.
enum class LogLevel { kQuiet, kInfo, kDebug };
void set_log_level(LogLevel level);
void log_event(std::string_view event, nlohmann::json fields = nlohmann::json::object());

}  // namespace absa

#endif  // ABSA_UTIL_H_
