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


// nlohmann::json conversions shared by the I/O and experiment layers.

#ifndef SRPOLAB_SRC_JSON_CONVERT_HPP_
#define SRPOLAB_SRC_JSON_CONVERT_HPP_

#include <string>
#include <string_view>

#include "json.hpp"
#include "srpolab/mdp.hpp"
#include "srpolab/solvers.hpp"
#include "srpolab/theory.hpp"

namespace srpo::detail {

using Json = nlohmann::json;

// Parses text; syntax errors become kIo errors naming the line and column.
Json ParseJson(std::string_view text, const std::string& what);

// Non-finite doubles are written as the strings "inf", "-inf" and "nan".
Json NumberJson(double x);
double NumberFrom(const Json& j, const std::string& field);

Json MdpJson(const TabularMdp& m, const std::string& theta);
TabularMdp MdpFrom(const Json& j);
Json PolicyJson(const PolicyTable& pi);
PolicyTable PolicyFrom(const Json& j);
Json ValueTableJson(const ValueTable& vt, int n_actions);
Json OccupancyJson(const OccupancyVector& d);
Json TheoryReportJsonValue(const TheoryReport& r);

}  // namespace srpo::detail

#endif  // SRPOLAB_SRC_JSON_CONVERT_HPP_
