// Copyright 2026 The SRPO Lab Authors. All rights reserved.
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

#ifndef SRPOLAB_CSV_HPP_
#define SRPOLAB_CSV_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace srpo {

// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite.
std::string FormatDouble(double x);

// RFC-4180 field: quoted only when it holds a comma, quote, CR or LF.
std::string CsvEscape(std::string_view field);

// Builds a CSV document in memory with "\n" line endings.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);
  CsvWriter& Row(const std::vector<std::string>& fields);
  const std::string& str() const { return out_; }

 private:
  std::size_t width_;
  std::string out_;
};

// Parses an RFC-4180 document (as written by CsvWriter) into rows.
std::vector<std::vector<std::string>> ParseCsv(std::string_view text);

}  // namespace srpo

#endif  // SRPOLAB_CSV_HPP_
