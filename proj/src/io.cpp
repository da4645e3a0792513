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


#include "srpolab/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json_convert.hpp"
#include "srpolab/csv.hpp"
#include "srpolab/error.hpp"

namespace srpo {
namespace detail {
namespace {

[[noreturn]] void Bad(const std::string& field, const std::string& what) {
  Fail(ErrorCode::kIo, "field '" + field + "': " + what);
}

const Json& Field(const Json& j, const std::string& name) {
  if (!j.is_object()) Bad(name, "enclosing value is not an object");
  const auto it = j.find(name);
  if (it == j.end()) Bad(name, "missing");
  return *it;
}

int IntFrom(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) Bad(field, "expected an integer");
  return j.get<int>();
}

std::vector<double> VectorFrom(const Json& j, const std::string& field) {
  if (!j.is_array()) Bad(field, "expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(NumberFrom(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Json VectorJson(std::span<const double> x) {
  Json out = Json::array();
  for (double v : x) out.push_back(NumberJson(v));
  return out;
}

Json MatrixJson(const std::vector<double>& flat, int rows, int cols) {
  Json out = Json::array();
  for (int i = 0; i < rows; ++i) {
    out.push_back(VectorJson(
        std::span<const double>(flat.data() + static_cast<std::size_t>(i) * cols, cols)));
  }
  return out;
}

std::vector<double> MatrixFrom(const Json& j, int rows, int cols, const std::string& field) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) {
    Bad(field, "expected " + std::to_string(rows) + " rows");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(rows) * cols);
  for (int i = 0; i < rows; ++i) {
    const std::string name = field + "[" + std::to_string(i) + "]";
    const std::vector<double> row = VectorFrom(j[i], name);
    if (static_cast<int>(row.size()) != cols) {
      Bad(name, "expected " + std::to_string(cols) + " entries");
    }
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

Json TensorJson(const std::vector<double>& flat, int n_states, int n_actions) {
  Json out = Json::array();
  for (int s = 0; s < n_states; ++s) {
    Json per_action = Json::array();
    for (int a = 0; a < n_actions; ++a) {
      const std::size_t base = (static_cast<std::size_t>(s) * n_actions + a) * n_states;
      per_action.push_back(
          VectorJson(std::span<const double>(flat.data() + base, n_states)));
    }
    out.push_back(std::move(per_action));
  }
  return out;
}

std::vector<double> TensorFrom(const Json& j, int n_states, int n_actions,
                               const std::string& field) {
  if (!j.is_array() || static_cast<int>(j.size()) != n_states) {
    Bad(field, "expected " + std::to_string(n_states) + " state entries");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_states) * n_actions * n_states);
  for (int s = 0; s < n_states; ++s) {
    const std::vector<double> block =
        MatrixFrom(j[s], n_actions, n_states, field + "[" + std::to_string(s) + "]");
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

Json CoordJson(const CoordTable& c, int n_items) { return MatrixJson(c.values, n_items, c.dim); }

CoordTable CoordFrom(const Json& j, int n_items, const std::string& field) {
  if (!j.is_array() || static_cast<int>(j.size()) != n_items || j.empty() ||
      !j[0].is_array()) {
    Bad(field, "expected " + std::to_string(n_items) + " coordinate rows");
  }
  const int dim = static_cast<int>(j[0].size());
  if (dim < 1) Bad(field, "coordinate rows must be nonempty");
  CoordTable c;
  c.dim = dim;
  c.values = MatrixFrom(j, n_items, dim, field);
  return c;
}

}  // namespace

Json ParseJson(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    int line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    Fail(ErrorCode::kIo, what + ": JSON syntax error at line " + std::to_string(line) +
                             ", column " + std::to_string(column));
  }
}

Json NumberJson(double x) {
  if (std::isfinite(x)) return x;
  return FormatDouble(x);
}

double NumberFrom(const Json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  Bad(field, "expected a number");
}

Json MdpJson(const TabularMdp& m, const std::string& theta) {
  Json j;
  j["n_states"] = m.n_states();
  j["n_actions"] = m.n_actions();
  j["gamma"] = m.gamma();
  j["rho0"] = VectorJson(m.rho0());
  j["transition"] = TensorJson(m.transition(), m.n_states(), m.n_actions());
  j["reward"] = TensorJson(m.reward(), m.n_states(), m.n_actions());
  if (m.has_state_coords()) {
    j["state_coords"] = CoordJson(m.annotations().state_coords, m.n_states());
  }
  if (m.has_action_coords()) {
    j["action_coords"] = CoordJson(m.annotations().action_coords, m.n_actions());
  }
  if (m.reward_lipschitz()) j["reward_lipschitz"] = *m.reward_lipschitz();
  if (!theta.empty()) j["theta"] = theta;
  return j;
}

TabularMdp MdpFrom(const Json& j) {
  const int ns = IntFrom(Field(j, "n_states"), "n_states");
  const int na = IntFrom(Field(j, "n_actions"), "n_actions");
  if (ns < 1 || na < 1) Bad("n_states", "state and action counts must be positive");
  MdpAnnotations ann;
  if (j.contains("state_coords")) ann.state_coords = CoordFrom(j["state_coords"], ns, "state_coords");
  if (j.contains("action_coords")) {
    ann.action_coords = CoordFrom(j["action_coords"], na, "action_coords");
  }
  if (j.contains("reward_lipschitz")) {
    ann.reward_lipschitz = NumberFrom(j["reward_lipschitz"], "reward_lipschitz");
  }
  return TabularMdp(ns, na, TensorFrom(Field(j, "transition"), ns, na, "transition"),
                    TensorFrom(Field(j, "reward"), ns, na, "reward"),
                    NumberFrom(Field(j, "gamma"), "gamma"),
                    VectorFrom(Field(j, "rho0"), "rho0"), std::move(ann));
}

Json PolicyJson(const PolicyTable& pi) {
  Json j;
  j["n_states"] = pi.n_states();
  j["n_actions"] = pi.n_actions();
  j["probs"] = MatrixJson(pi.probs(), pi.n_states(), pi.n_actions());
  return j;
}

PolicyTable PolicyFrom(const Json& j) {
  const int ns = IntFrom(Field(j, "n_states"), "n_states");
  const int na = IntFrom(Field(j, "n_actions"), "n_actions");
  if (ns < 1 || na < 1) Bad("n_states", "state and action counts must be positive");
  return PolicyTable(ns, na, MatrixFrom(Field(j, "probs"), ns, na, "probs"));
}

Json ValueTableJson(const ValueTable& vt, int n_actions) {
  Json j;
  j["kind"] = vt.kind == ValueKind::kHard ? "hard" : "soft";
  j["v"] = VectorJson(vt.v);
  if (!vt.q.empty()) {
    j["q"] = MatrixJson(vt.q, static_cast<int>(vt.v.size()), n_actions);
  }
  j["tol_used"] = vt.tol_used;
  j["iterations"] = vt.iterations;
  j["residual"] = NumberJson(vt.residual);
  return j;
}

Json OccupancyJson(const OccupancyVector& d) {
  Json j;
  j["d"] = VectorJson(d.d());
  j["gamma"] = d.gamma();
  j["method"] = "linear_solve";
  j["tol_used"] = kLinearResidualTol;
  j["iterations"] = 1;
  j["residual"] = NumberJson(d.residual());
  return j;
}

Json TheoryReportJsonValue(const TheoryReport& r) {
  Json j;
  j["pair_id"] = r.pair_id;
  j["member_a"] = r.member_a;
  j["member_b"] = r.member_b;
  j["eps_m"] = NumberJson(r.eps_m);
  j["eps_s"] = NumberJson(r.eps_s);
  j["eps_pi"] = NumberJson(r.eps_pi);
  j["delta"] = NumberJson(r.delta);
  j["pointwise_eps"] = NumberJson(r.pointwise_eps);
  j["lambda1"] = NumberJson(r.lipschitz.lambda1);
  j["lambda2"] = NumberJson(r.lipschitz.lambda2);
  j["r_max"] = NumberJson(r.lipschitz.r_max);
  j["state_norm"] = r.state_norm;
  j["action_norm"] = r.action_norm;
  j["seed"] = r.seed;
  Json checks = Json::array();
  for (const TheoremCheck& c : r.checks) {
    Json cj;
    cj["theorem"] = ToString(c.theorem);
    cj["label"] = c.label;
    cj["premise_holds"] = c.premise_holds;
    cj["premise_note"] = c.premise_note;
    cj["lhs"] = NumberJson(c.lhs);
    cj["rhs"] = NumberJson(c.rhs);
    cj["satisfied"] = c.satisfied;
    checks.push_back(std::move(cj));
  }
  j["checks"] = std::move(checks);
  return j;
}

}  // namespace detail

using detail::Json;

std::string MdpToJson(const TabularMdp& m, const std::string& theta) {
  return detail::MdpJson(m, theta).dump();
}

TabularMdp MdpFromJson(std::string_view text) {
  return detail::MdpFrom(detail::ParseJson(text, "MDP document"));
}

std::string FamilyToJson(const HipMdpFamily& family, bool shared_check) {
  Json j;
  j["shared_check"] = shared_check;
  Json members = Json::array();
  for (int i = 0; i < family.size(); ++i) {
    members.push_back(detail::MdpJson(family.member(i), family.theta_label(i)));
  }
  j["members"] = std::move(members);
  return j.dump();
}

HipMdpFamily FamilyFromJson(std::string_view text) {
  const Json j = detail::ParseJson(text, "family document");
  bool shared_check = true;
  const Json* members = &j;
  if (j.is_object()) {
    if (j.contains("shared_check")) {
      if (!j["shared_check"].is_boolean()) {
        Fail(ErrorCode::kIo, "field 'shared_check': expected a boolean");
      }
      shared_check = j["shared_check"].get<bool>();
    }
    if (!j.contains("members")) Fail(ErrorCode::kIo, "field 'members': missing");
    members = &j["members"];
  }
  Require(members->is_array() && !members->empty(), ErrorCode::kIo,
          "family document needs a nonempty member array");
  std::vector<TabularMdp> mdps;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < members->size(); ++i) {
    const Json& mj = (*members)[i];
    try {
      mdps.push_back(detail::MdpFrom(mj));
    } catch (const Error& e) {
      throw Error(e.code(), "member " + std::to_string(i) + ": " + e.what());
    }
    labels.push_back(mj.contains("theta") && mj["theta"].is_string()
                         ? mj["theta"].get<std::string>()
                         : std::to_string(i));
  }
  if (shared_check) {
    for (std::size_t i = 1; i < mdps.size(); ++i) {
      RequireSameSpaces(mdps.front(), mdps[i]);
      Require(is_homomorphous(mdps.front(), mdps[i]), ErrorCode::kStructural,
              "members 0 and " + std::to_string(i) + " are not homomorphous");
    }
  }
  return HipMdpFamily(std::move(mdps), std::move(labels));
}

std::string PolicyToJson(const PolicyTable& pi) { return detail::PolicyJson(pi).dump(); }

PolicyTable PolicyFromJson(std::string_view text) {
  return detail::PolicyFrom(detail::ParseJson(text, "policy document"));
}

std::string ValueTableToJson(const ValueTable& vt, int n_actions) {
  return detail::ValueTableJson(vt, n_actions).dump();
}

ValueTable ValueTableFromJson(std::string_view text) {
  const Json j = detail::ParseJson(text, "value table document");
  ValueTable vt;
  const std::string kind = detail::Field(j, "kind").is_string()
                               ? j["kind"].get<std::string>()
                               : std::string();
  if (kind == "hard") {
    vt.kind = ValueKind::kHard;
  } else if (kind == "soft") {
    vt.kind = ValueKind::kSoft;
  } else {
    detail::Bad("kind", "expected \"hard\" or \"soft\"");
  }
  vt.v = detail::VectorFrom(detail::Field(j, "v"), "v");
  if (j.contains("q")) {
    const Json& q = j["q"];
    const int na = q.is_array() && !q.empty() && q[0].is_array()
                       ? static_cast<int>(q[0].size())
                       : 0;
    vt.q = detail::MatrixFrom(q, static_cast<int>(vt.v.size()), na, "q");
  }
  vt.tol_used = detail::NumberFrom(detail::Field(j, "tol_used"), "tol_used");
  vt.iterations = detail::IntFrom(detail::Field(j, "iterations"), "iterations");
  vt.residual = detail::NumberFrom(detail::Field(j, "residual"), "residual");
  return vt;
}

std::string OccupancyToJson(const OccupancyVector& d) { return detail::OccupancyJson(d).dump(); }

OccupancyVector OccupancyFromJson(std::string_view text) {
  const Json j = detail::ParseJson(text, "occupancy document");
  OccupancyVector d(detail::VectorFrom(detail::Field(j, "d"), "d"),
                    detail::NumberFrom(detail::Field(j, "gamma"), "gamma"));
  if (j.contains("residual")) d.set_residual(detail::NumberFrom(j["residual"], "residual"));
  return d;
}

std::string TheoryReportJson(const TheoryReport& report) {
  return detail::TheoryReportJsonValue(report).dump();
}

std::string TheoryReportsJsonl(const std::vector<TheoryReport>& reports) {
  std::string out;
  for (const TheoryReport& r : reports) out += TheoryReportJson(r) + "\n";
  return out;
}

std::string TheoryReportsCsv(const std::vector<TheoryReport>& reports) {
  CsvWriter csv({"pair_id", "theorem", "premise_holds", "lhs", "rhs", "satisfied"});
  for (const TheoryReport& r : reports) {
    for (const TheoremCheck& c : r.checks) {
      csv.Row({r.pair_id, c.label, c.premise_holds ? "true" : "false", FormatDouble(c.lhs),
               FormatDouble(c.rhs), c.satisfied ? "true" : "false"});
    }
  }
  return csv.str();
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), ErrorCode::kIo, "cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    Require(out.good(), ErrorCode::kIo, "cannot open '" + tmp.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    Require(out.good(), ErrorCode::kIo, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  Require(!ec, ErrorCode::kIo,
          "cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

}  // namespace srpo
