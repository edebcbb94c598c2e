/**
 * Copyright (c) 2026 The negfmini developers.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace negfmini {

/// RFC-4180 writer: comma separated, CRLF line ends, fields quoted when needed.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);
  void close();

  static std::string quote(const std::string& field);

 private:
  std::ofstream out_;
  std::size_t columns_;
  std::string path_;
};

/// Shortest round-trip decimal form of a double.
std::string csv_number(double x);
std::string csv_number(long long x);

/// Parses RFC-4180 text (quoted fields may contain commas, quotes and line breaks).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::vector<std::vector<std::string>> read_csv(const std::string& path);

}  // namespace negfmini
