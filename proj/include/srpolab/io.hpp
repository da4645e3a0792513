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


// JSON documents for MDPs, families, policies, value tables, occupancy
// vectors and theory reports.

#ifndef SRPOLAB_IO_HPP_
#define SRPOLAB_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "srpolab/mdp.hpp"
#include "srpolab/solvers.hpp"
#include "srpolab/theory.hpp"

namespace srpo {

// {n_states, n_actions, gamma, rho0, transition[s][a][s'], reward[s][a][s'],
//  state_coords?, action_coords?, reward_lipschitz?, theta?}
std::string MdpToJson(const TabularMdp& m, const std::string& theta = "");
TabularMdp MdpFromJson(std::string_view text);

// {"shared_check": bool, "members": [mdp, ...]}. A bare array of members is
// also accepted and is checked. Shared components are always validated;
// shared_check additionally requires every member to be homomorphous with
// the first.
std::string FamilyToJson(const HipMdpFamily& family, bool shared_check = true);
HipMdpFamily FamilyFromJson(std::string_view text);

// {n_states, n_actions, probs[s][a]}
std::string PolicyToJson(const PolicyTable& pi);
PolicyTable PolicyFromJson(std::string_view text);

// {kind, v, q[s][a]?, tol_used, iterations, residual}
std::string ValueTableToJson(const ValueTable& vt, int n_actions);
ValueTable ValueTableFromJson(std::string_view text);

// {d, gamma, method, tol_used, iterations, residual}
std::string OccupancyToJson(const OccupancyVector& d);
OccupancyVector OccupancyFromJson(std::string_view text);

// One JSON object per report, one report per line.
std::string TheoryReportJson(const TheoryReport& report);
std::string TheoryReportsJsonl(const std::vector<TheoryReport>& reports);
// pair_id, theorem, premise_holds, lhs, rhs, satisfied; one row per check.
std::string TheoryReportsCsv(const std::vector<TheoryReport>& reports);

std::string ReadTextFile(const std::filesystem::path& path);
// Writes through a temporary sibling and renames it into place.
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

}  // namespace srpo

#endif  // SRPOLAB_IO_HPP_
