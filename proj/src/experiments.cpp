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


#include "srpolab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "json_convert.hpp"
#include "srpolab/csv.hpp"
#include "srpolab/error.hpp"
#include "srpolab/io.hpp"
#include "srpolab/log.hpp"
#include "srpolab/rng.hpp"
#include "srpolab/solvers.hpp"

namespace srpo {
namespace {

using detail::Json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Line of the last key of `path`, found by scanning for each key in turn.
std::optional<int> LocateField(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  for (const std::string& key : path) {
    const std::string quoted = "\"" + key + "\"";
    std::size_t hit = std::string::npos;
    for (std::size_t at = text.find(quoted, pos); at != std::string::npos;
         at = text.find(quoted, at + 1)) {
      std::size_t k = at + quoted.size();
      while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
      if (k < text.size() && text[k] == ':') {
        hit = at;
        break;
      }
    }
    if (hit == std::string::npos) return std::nullopt;
    pos = hit + quoted.size();
  }
  if (path.empty()) return std::nullopt;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

std::string JoinPath(const std::vector<std::string>& path) {
  std::string out;
  for (const std::string& p : path) out += (out.empty() ? "" : ".") + p;
  return out;
}

// Walks one object of the config, tracking the field path for diagnostics.
class Reader {
 public:
  Reader(const Json& j, std::vector<std::string> path, const std::string& text)
      : j_(j), path_(std::move(path)), text_(text) {
    if (!j_.is_object()) Error(path_, "expected an object");
  }

  [[noreturn]] void Error(const std::vector<std::string>& path, const std::string& what) const {
    const auto line = LocateField(text_, path);
    std::string msg = "config";
    if (line) msg += ": line " + std::to_string(*line);
    msg += path.empty() ? ": " + what : ": field '" + JoinPath(path) + "': " + what;
    Fail(ErrorCode::kConfig, msg);
  }

  bool Has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  std::vector<std::string> PathOf(const std::string& key) const {
    auto p = path_;
    p.push_back(key);
    return p;
  }
  const Json& At(const std::string& key) const { return j_.at(key); }

  void Int(const std::string& key, int& out) {
    if (!Has(key)) return;
    const Json& v = At(key);
    if (!v.is_number_integer()) Error(PathOf(key), "expected an integer");
    const auto x = v.get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
      Error(PathOf(key), "integer out of range");
    }
    out = static_cast<int>(x);
  }
  void Double(const std::string& key, double& out) {
    if (!Has(key)) return;
    const Json& v = At(key);
    if (!v.is_number()) Error(PathOf(key), "expected a number");
    out = v.get<double>();
  }
  void String(const std::string& key, std::string& out) {
    if (!Has(key)) return;
    const Json& v = At(key);
    if (!v.is_string()) Error(PathOf(key), "expected a string");
    out = v.get<std::string>();
  }
  void Doubles(const std::string& key, std::vector<double>& out) {
    if (!Has(key)) return;
    const Json& v = At(key);
    if (!v.is_array()) Error(PathOf(key), "expected an array of numbers");
    std::vector<double> tmp;
    for (const Json& x : v) {
      if (!x.is_number()) Error(PathOf(key), "expected an array of numbers");
      tmp.push_back(x.get<double>());
    }
    out = std::move(tmp);
  }

  // Rejects keys that no accessor asked for.
  void Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) Error(PathOf(key), "unknown field");
    }
  }

  // Runs fn with a reader for a nested object, if present.
  template <typename Fn>
  void Section(const std::string& key, Fn fn) {
    if (!Has(key)) return;
    Reader sub(At(key), PathOf(key), text_);
    fn(sub);
    sub.Finish();
  }

 private:
  const Json& j_;
  std::vector<std::string> path_;
  const std::string& text_;
  std::set<std::string> seen_;
};

template <typename Parse>
void Enum(Reader& r, const std::string& key, Parse parse) {
  std::string name;
  r.String(key, name);
  if (name.empty() && !r.Has(key)) return;
  try {
    parse(name);
  } catch (const srpo::Error& e) {
    r.Error(r.PathOf(key), e.what());
  }
}

void ReadEnv(Reader& r, EnvSpec& env) {
  Enum(r, "kind", [&](const std::string& n) { env.kind = ParseEnvKind(n); });
  r.Int("width", env.width);
  r.Int("height", env.height);
  r.Int("angle_bins", env.angle_bins);
  r.Int("velocity_bins", env.velocity_bins);
  r.Int("torque_levels", env.torque_levels);
  Enum(r, "knob", [&](const std::string& n) { env.knob = ParsePendulumKnob(n); });
  r.Doubles("dynamics_params", env.dynamics_params);
  r.Double("gamma", env.gamma);
  r.Double("action_cost_coeff", env.action_cost_coeff);
  r.Double("goal_bonus", env.goal_bonus);
  r.Double("distance_coeff", env.distance_coeff);
  r.Double("gravity", env.gravity);
  r.Double("friction", env.friction);
  r.Double("gravity_scale", env.gravity_scale);
  r.Double("dt", env.dt);
  r.Int("start_spread", env.start_spread);
  r.Double("bottleneck_goal", env.bottleneck_goal);
  r.Double("bottleneck_lure", env.bottleneck_lure);
  r.Double("bottleneck_penalty", env.bottleneck_penalty);
}

void ReadSrpo(Reader& r, SrpoConfig& cfg) {
  Enum(r, "preset", [&](const std::string& n) {
    if (n == "standard") {
      cfg = SrpoConfig::Standard();
    } else if (n == "strong") {
      cfg = SrpoConfig::Strong();
    } else {
      Fail(ErrorCode::kConfig, "unknown preset '" + n + "' (standard | strong)");
    }
  });
  r.Double("lambda", cfg.lambda);
  r.Double("rho", cfg.rho);
  r.Int("batch_size", cfg.batch_size);
  r.Double("disc_lr", cfg.disc_lr);
  r.Int("disc_epochs", cfg.disc_epochs);
  r.Int("disc_interval", cfg.disc_interval);
  std::vector<double> clip = {cfg.ratio_clip.lower, cfg.ratio_clip.upper};
  r.Doubles("ratio_clip", clip);
  if (clip.size() != 2) r.Error(r.PathOf("ratio_clip"), "expected [lower, upper]");
  cfg.ratio_clip = {clip[0], clip[1]};
  Enum(r, "score", [&](const std::string& n) {
    if (n == "reward") {
      cfg.score = PartitionScore::kReward;
    } else if (n == "value") {
      cfg.score = PartitionScore::kValue;
    } else {
      Fail(ErrorCode::kConfig, "unknown score '" + n + "' (reward | value)");
    }
  });
  Enum(r, "features", [&](const std::string& n) {
    if (n == "one_hot") {
      cfg.features = FeatureKind::kOneHot;
    } else if (n == "coords") {
      cfg.features = FeatureKind::kCoords;
    } else {
      Fail(ErrorCode::kConfig, "unknown features '" + n + "' (one_hot | coords)");
    }
  });
}

void ReadLearner(Reader& r, LearnerConfig& cfg) {
  r.Int("epochs", cfg.epochs);
  r.Int("episodes_per_member", cfg.episodes_per_member);
  r.Int("horizon", cfg.horizon);
  r.Double("q_lr", cfg.q_lr);
  r.Double("temperature", cfg.temperature);
  if (r.Has("q_init")) {
    const Json& v = r.At("q_init");
    if (v.is_null()) {
      cfg.q_init.reset();
    } else if (v.is_number()) {
      cfg.q_init = v.get<double>();
    } else {
      r.Error(r.PathOf("q_init"), "expected a number or null");
    }
  }
  r.Double("explore_epsilon", cfg.explore_epsilon);
  r.Int("updates_per_epoch", cfg.updates_per_epoch);
  r.Int("buffer_capacity", cfg.buffer_capacity);
}

void ReadDensity(Reader& r, MotivatingOptions& opt) {
  r.Int("n_rollouts", opt.n_rollouts);
  r.Int("horizon", opt.horizon);
  r.Int("n_bins", opt.n_bins);
  if (r.Has("bandwidth")) {
    const Json& v = r.At("bandwidth");
    if (v.is_string() && v.get<std::string>() == "scott") {
      opt.bandwidth = Bandwidth::Scott();
    } else if (v.is_number()) {
      opt.bandwidth = Bandwidth::Fixed(v.get<double>());
    } else {
      r.Error(r.PathOf("bandwidth"), "expected \"scott\" or a positive number");
    }
  }
}

std::string FormatName(OutputFormat f) { return f == OutputFormat::kCsv ? "csv" : "json"; }

std::string ScoreName(PartitionScore s) { return s == PartitionScore::kReward ? "reward" : "value"; }

std::string FeatureName(FeatureKind f) { return f == FeatureKind::kOneHot ? "one_hot" : "coords"; }

Json ConfigJson(const RunConfig& c) {
  Json env;
  const EnvSpec& e = c.env;
  env["kind"] = ToString(e.kind);
  env["width"] = e.width;
  env["height"] = e.height;
  env["angle_bins"] = e.angle_bins;
  env["velocity_bins"] = e.velocity_bins;
  env["torque_levels"] = e.torque_levels;
  env["knob"] = ToString(e.knob);
  env["dynamics_params"] = e.dynamics_params;
  env["gamma"] = e.gamma;
  env["action_cost_coeff"] = e.action_cost_coeff;
  env["goal_bonus"] = e.goal_bonus;
  env["distance_coeff"] = e.distance_coeff;
  env["gravity"] = e.gravity;
  env["friction"] = e.friction;
  env["gravity_scale"] = e.gravity_scale;
  env["dt"] = e.dt;
  env["start_spread"] = e.start_spread;
  env["bottleneck_goal"] = e.bottleneck_goal;
  env["bottleneck_lure"] = e.bottleneck_lure;
  env["bottleneck_penalty"] = e.bottleneck_penalty;

  Json srpo;
  srpo["lambda"] = c.srpo.lambda;
  srpo["rho"] = c.srpo.rho;
  srpo["batch_size"] = c.srpo.batch_size;
  srpo["disc_lr"] = c.srpo.disc_lr;
  srpo["disc_epochs"] = c.srpo.disc_epochs;
  srpo["disc_interval"] = c.srpo.disc_interval;
  srpo["ratio_clip"] = {c.srpo.ratio_clip.lower, c.srpo.ratio_clip.upper};
  srpo["score"] = ScoreName(c.srpo.score);
  srpo["features"] = FeatureName(c.srpo.features);

  Json learner;
  learner["epochs"] = c.learner.epochs;
  learner["episodes_per_member"] = c.learner.episodes_per_member;
  learner["horizon"] = c.learner.horizon;
  learner["q_lr"] = c.learner.q_lr;
  learner["temperature"] = c.learner.temperature;
  learner["q_init"] = c.learner.q_init ? Json(*c.learner.q_init) : Json(nullptr);
  learner["explore_epsilon"] = c.learner.explore_epsilon;
  learner["updates_per_epoch"] = c.learner.updates_per_epoch;
  learner["buffer_capacity"] = c.learner.buffer_capacity;

  Json theory;
  theory["n_pairs"] = c.theory.n_pairs;
  theory["n_random_policies"] = c.theory.n_random_policies;

  Json density;
  density["n_rollouts"] = c.density.n_rollouts;
  density["horizon"] = c.density.horizon;
  density["n_bins"] = c.density.n_bins;
  density["bandwidth"] = c.density.bandwidth.rule == Bandwidth::Rule::kScott
                             ? Json("scott")
                             : Json(c.density.bandwidth.value);

  Json j;
  j["experiment"] = ToString(c.experiment);
  j["env"] = std::move(env);
  j["srpo"] = std::move(srpo);
  j["learner"] = std::move(learner);
  j["theory"] = std::move(theory);
  j["density"] = std::move(density);
  j["format"] = FormatName(c.format);
  return j;
}

std::string Timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
                          now.time_since_epoch())
                          .count() %
                      1000000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%06lldZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<long long>(micros));
  return buf;
}

std::string MemberName(const std::string& stem, int i, const std::string& ext) {
  return stem + "_" + std::to_string(i) + "." + ext;
}

// Writes one artifact and records its name.
class ArtifactWriter {
 public:
  ArtifactWriter(std::filesystem::path dir, SeedOutcome& out) : dir_(std::move(dir)), out_(out) {}
  void Write(const std::string& name, std::string_view text) {
    WriteTextFile(dir_ / name, text);
    out_.files.push_back(name);
  }

 private:
  std::filesystem::path dir_;
  SeedOutcome& out_;
};

void RunSolve(const RunConfig& c, const HipMdpFamily& fam, ArtifactWriter& w, SeedOutcome& out) {
  Json members = Json::array();
  CsvWriter csv({"member", "theta", "state", "v", "action"});
  double total = 0.0;
  for (int i = 0; i < fam.size(); ++i) {
    const TabularMdp& m = fam.member(i);
    const OptimalSolution opt = solve_optimal(m);
    const double ret = expected_return(m, opt.policy);
    total += ret;
    Json mj;
    mj["member"] = i;
    mj["theta"] = fam.theta_label(i);
    mj["expected_return"] = ret;
    mj["values"] = detail::ValueTableJson(opt.values, m.n_actions());
    mj["policy"] = detail::PolicyJson(opt.policy);
    members.push_back(std::move(mj));
    for (int s = 0; s < m.n_states(); ++s) {
      csv.Row({std::to_string(i), fam.theta_label(i), std::to_string(s),
               FormatDouble(opt.values.v[s]),
               std::to_string(opt.policy.deterministic_action(s))});
    }
  }
  out.metrics[kReturnMetric] = total / fam.size();
  if (c.format == OutputFormat::kJson) {
    w.Write("solve.json", Json{{"members", std::move(members)}}.dump() + "\n");
  } else {
    w.Write("solve.csv", csv.str());
  }
}

void RunOccupancy(const RunConfig& c, const HipMdpFamily& fam, ArtifactWriter& w) {
  Json members = Json::array();
  CsvWriter csv({"member", "theta", "state", "d"});
  for (int i = 0; i < fam.size(); ++i) {
    const TabularMdp& m = fam.member(i);
    const OccupancyVector d = occupancy(m, solve_optimal(m).policy);
    Json mj;
    mj["member"] = i;
    mj["theta"] = fam.theta_label(i);
    mj["occupancy"] = detail::OccupancyJson(d);
    members.push_back(std::move(mj));
    for (int s = 0; s < d.size(); ++s) {
      csv.Row({std::to_string(i), fam.theta_label(i), std::to_string(s), FormatDouble(d[s])});
    }
  }
  if (c.format == OutputFormat::kJson) {
    w.Write("occupancy.json", Json{{"members", std::move(members)}}.dump() + "\n");
  } else {
    w.Write("occupancy.csv", csv.str());
  }
}

void RunTrain(const RunConfig& c, const HipMdpFamily& fam, std::uint64_t seed,
              ArtifactWriter& w, SeedOutcome& out) {
  TrainingResult result;
  switch (c.experiment) {
    case Experiment::kTrainSrpo:
      result = srpo_train(fam, c.srpo, c.learner, seed);
      break;
    case Experiment::kTrainBaseline:
      result = baseline_train(fam, c.srpo, c.learner, seed);
      break;
    default:
      result = behavior_regularized_train(fam, c.srpo, c.learner, seed);
      break;
  }
  if (c.format == OutputFormat::kJson) {
    Json rows = Json::array();
    for (const TrainingLogRow& row : result.log) {
      rows.push_back({{"epoch", row.epoch},
                      {"theta_idx", row.theta_idx},
                      {"mean_return", row.mean_return},
                      {"disc_loss", row.disc_loss},
                      {"lambda", row.lambda},
                      {"rho", row.rho},
                      {"seed", row.seed}});
    }
    w.Write("training_log.json", rows.dump() + "\n");
  } else {
    w.Write("training_log.csv", TrainingLogCsv(result.log));
  }
  Json members = Json::array();
  for (int i = 0; i < fam.size(); ++i) {
    Json mj;
    mj["member"] = i;
    mj["theta"] = fam.theta_label(i);
    mj["final_return"] = result.final_returns[i];
    mj["policy"] = detail::PolicyJson(result.policies[i]);
    members.push_back(std::move(mj));
  }
  w.Write("policies.json", Json{{"members", std::move(members)}}.dump() + "\n");
  out.metrics[kReturnMetric] = result.final_mean_return;
}

void RunVerify(const RunConfig& c, const HipMdpFamily& fam, std::uint64_t seed,
               ArtifactWriter& w, SeedOutcome& out) {
  SuiteOptions opt = c.theory;
  opt.seed = seed;
  const std::vector<TheoryReport> reports = generate_report_suite(fam, opt);
  if (c.format == OutputFormat::kJson) {
    w.Write("theory_reports.jsonl", TheoryReportsJsonl(reports));
  } else {
    w.Write("theory_summary.csv", TheoryReportsCsv(reports));
  }
  bool all_pass = true;
  for (const TheoremTally& t : TallyReports(reports)) {
    out.metrics[t.theorem + ".premise_holding"] = t.premise_holding;
    out.metrics[t.theorem + ".pass_rate"] = t.pass_rate();
    all_pass &= t.satisfied == t.premise_holding;
  }
  out.metrics["all_pass"] = all_pass ? 1.0 : 0.0;
}

Json GridJson(const DensityGrid& g) {
  Json axes = Json::array();
  for (const GridAxis& a : g.axes) {
    axes.push_back({{"name", a.name}, {"min", a.min}, {"max", a.max}, {"n_bins", a.n_bins}});
  }
  return {{"axes", std::move(axes)},
          {"bandwidths", g.bandwidths},
          {"normalization", g.normalization},
          {"values", g.values}};
}

void RunDensity(const RunConfig& c, const HipMdpFamily& fam, std::uint64_t seed,
                ArtifactWriter& w, SeedOutcome& out) {
  const MotivatingResult r = motivating_example(fam, c.density, seed);
  CsvWriter csv({"member_a", "member_b", "state_l1", "state_js", "action_l1", "action_js"});
  Json comparisons = Json::array();
  for (const PairComparison& p : r.comparisons) {
    csv.Row({std::to_string(p.member_a), std::to_string(p.member_b),
             FormatDouble(p.state.l1_distance), FormatDouble(p.state.js_divergence),
             FormatDouble(p.action.l1_distance), FormatDouble(p.action.js_divergence)});
    comparisons.push_back({{"member_a", p.member_a},
                           {"member_b", p.member_b},
                           {"state_l1", p.state.l1_distance},
                           {"state_js", p.state.js_divergence},
                           {"action_l1", p.action.l1_distance},
                           {"action_js", p.action.js_divergence}});
  }
  if (c.format == OutputFormat::kJson) {
    Json states = Json::array(), actions = Json::array();
    for (const DensityGrid& g : r.state_grids) states.push_back(GridJson(g));
    for (const DensityGrid& g : r.action_grids) actions.push_back(GridJson(g));
    w.Write("density.json", Json{{"comparisons", std::move(comparisons)},
                                 {"state_grids", std::move(states)},
                                 {"action_grids", std::move(actions)}}
                                    .dump() +
                                "\n");
  } else {
    w.Write("density_comparisons.csv", csv.str());
    for (int i = 0; i < fam.size(); ++i) {
      w.Write(MemberName("state_density", i, "csv"), DensityGridCsv(r.state_grids[i]));
      w.Write(MemberName("action_density", i, "csv"), DensityGridCsv(r.action_grids[i]));
    }
  }
  if (!r.comparisons.empty()) {
    out.metrics["state_js"] = r.comparisons.front().state.js_divergence;
    out.metrics["action_js"] = r.comparisons.front().action.js_divergence;
  }
}

// Mean and sample standard deviation, shifted by the first value so that
// constant inputs give their value and zero exactly.
std::pair<double, double> MeanStd(const std::vector<double>& x) {
  if (x.empty()) return {kNaN, kNaN};
  const double shift = x.front();
  double sum = 0.0;
  for (double v : x) sum += v - shift;
  const double mean_shifted = sum / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - shift - mean_shifted) * (v - shift - mean_shifted);
  const double sd = x.size() > 1 ? std::sqrt(ss / static_cast<double>(x.size() - 1)) : 0.0;
  return {shift + mean_shifted, sd};
}

std::optional<double> ReturnOf(const SeedOutcome& s) {
  if (!s.ok) return std::nullopt;
  const auto it = s.metrics.find(kReturnMetric);
  if (it == s.metrics.end()) return std::nullopt;
  return it->second;
}

}  // namespace

std::string ToString(Experiment e) {
  switch (e) {
    case Experiment::kSolve:
      return "solve";
    case Experiment::kOccupancy:
      return "occupancy";
    case Experiment::kTrainSrpo:
      return "train-srpo";
    case Experiment::kTrainBaseline:
      return "train-baseline";
    case Experiment::kTrainBehaviorReg:
      return "train-behavior-reg";
    case Experiment::kVerifyTheory:
      return "verify-theory";
    case Experiment::kDensity:
      return "density";
  }
  return "unknown";
}

Experiment ParseExperiment(const std::string& name) {
  for (Experiment e : {Experiment::kSolve, Experiment::kOccupancy, Experiment::kTrainSrpo,
                       Experiment::kTrainBaseline, Experiment::kTrainBehaviorReg,
                       Experiment::kVerifyTheory, Experiment::kDensity}) {
    if (ToString(e) == name) return e;
  }
  Fail(ErrorCode::kConfig,
       "unknown experiment '" + name +
           "' (solve | occupancy | train-srpo | train-baseline | train-behavior-reg | "
           "verify-theory | density)");
}

void RunConfig::Validate() const {
  auto wrap = [](const std::string& section, auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      Fail(ErrorCode::kConfig, "config: " + section + ": " + e.what());
    }
  };
  wrap("env", [&] { make_family(env); });
  wrap("srpo", [&] { srpo.Validate(); });
  wrap("learner", [&] { learner.Validate(); });
  Require(theory.n_pairs > 0 && theory.n_random_policies >= 0, ErrorCode::kConfig,
          "config: theory: n_pairs must be positive and n_random_policies >= 0");
  Require(density.n_rollouts > 0 && density.horizon > 0 && density.n_bins >= 2,
          ErrorCode::kConfig,
          "config: density: n_rollouts and horizon must be positive, n_bins >= 2");
  Require(density.bandwidth.rule == Bandwidth::Rule::kScott || density.bandwidth.value > 0.0,
          ErrorCode::kConfig, "config: density: fixed bandwidth must be positive");
  Require(!seeds.empty(), ErrorCode::kConfig, "config: seeds must not be empty");
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  Require(unique.size() == seeds.size(), ErrorCode::kConfig, "config: seeds must be distinct");
  Require(parallel >= 1, ErrorCode::kConfig, "config: parallel must be >= 1");
  Require(!output_dir.empty(), ErrorCode::kConfig, "config: output_dir must not be empty");
}

RunConfig ParseRunConfig(std::string_view text_view) {
  const std::string text(text_view);
  Json root;
  try {
    root = detail::ParseJson(text, "config");
  } catch (const Error& e) {
    Fail(ErrorCode::kConfig, e.what());
  }
  RunConfig c;
  Reader r(root, {}, text);
  Enum(r, "experiment", [&](const std::string& n) { c.experiment = ParseExperiment(n); });
  r.Section("env", [&](Reader& s) { ReadEnv(s, c.env); });
  r.Section("srpo", [&](Reader& s) { ReadSrpo(s, c.srpo); });
  r.Section("learner", [&](Reader& s) { ReadLearner(s, c.learner); });
  r.Section("theory", [&](Reader& s) {
    s.Int("n_pairs", c.theory.n_pairs);
    s.Int("n_random_policies", c.theory.n_random_policies);
  });
  r.Section("density", [&](Reader& s) { ReadDensity(s, c.density); });
  if (r.Has("seeds")) {
    const Json& v = r.At("seeds");
    if (!v.is_array()) r.Error({"seeds"}, "expected an array of nonnegative integers");
    c.seeds.clear();
    for (const Json& x : v) {
      if (!x.is_number_unsigned()) r.Error({"seeds"}, "expected an array of nonnegative integers");
      c.seeds.push_back(x.get<std::uint64_t>());
    }
  }
  std::string out_dir = c.output_dir.string();
  r.String("output_dir", out_dir);
  c.output_dir = out_dir;
  Enum(r, "format", [&](const std::string& n) {
    if (n == "csv") {
      c.format = OutputFormat::kCsv;
    } else if (n == "json") {
      c.format = OutputFormat::kJson;
    } else {
      Fail(ErrorCode::kConfig, "unknown format '" + n + "' (csv | json)");
    }
  });
  r.Int("parallel", c.parallel);
  r.Finish();
  c.Validate();
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::string text;
  try {
    text = ReadTextFile(path);
  } catch (const Error& e) {
    Fail(ErrorCode::kConfig, e.what());
  }
  return ParseRunConfig(text);
}

std::string CanonicalConfigJson(const RunConfig& config) { return ConfigJson(config).dump(); }

std::string ConfigHash(const RunConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(Fnv1a64(CanonicalConfigJson(config))));
  return buf;
}

bool RunManifest::all_ok() const {
  return std::all_of(seeds.begin(), seeds.end(), [](const SeedOutcome& s) { return s.ok; });
}

SeedOutcome RunSeed(const RunConfig& config, std::uint64_t seed,
                    const std::filesystem::path& dir) {
  SeedOutcome out;
  out.seed = seed;
  try {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    Require(!ec && std::filesystem::is_directory(dir), ErrorCode::kIo,
            "cannot create '" + dir.string() + "'");
    const HipMdpFamily fam = make_family(config.env);
    ArtifactWriter w(dir, out);
    switch (config.experiment) {
      case Experiment::kSolve:
        RunSolve(config, fam, w, out);
        break;
      case Experiment::kOccupancy:
        RunOccupancy(config, fam, w);
        break;
      case Experiment::kTrainSrpo:
      case Experiment::kTrainBaseline:
      case Experiment::kTrainBehaviorReg:
        RunTrain(config, fam, seed, w, out);
        break;
      case Experiment::kVerifyTheory:
        RunVerify(config, fam, seed, w, out);
        break;
      case Experiment::kDensity:
        RunDensity(config, fam, seed, w, out);
        break;
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
    out.metrics.clear();
    LogError("seed " + std::to_string(seed) + " failed: " + out.error);
  }
  return out;
}

RunManifest run(const RunConfig& config) {
  config.Validate();
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  Require(!ec && std::filesystem::is_directory(config.output_dir), ErrorCode::kConfig,
          "config: output_dir '" + config.output_dir.string() + "' is not writable");

  RunManifest manifest;
  manifest.config_hash = ConfigHash(config);
  manifest.experiment = ToString(config.experiment);
  manifest.env_signature = EnvSignature(config.env);
  manifest.started_at = Timestamp();
  manifest.seeds.resize(config.seeds.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < config.seeds.size(); i = next++) {
      const std::uint64_t seed = config.seeds[i];
      const std::string sub = "seed_" + std::to_string(seed);
      SeedOutcome o = RunSeed(config, seed, config.output_dir / sub);
      for (std::string& f : o.files) f = sub + "/" + f;
      manifest.seeds[i] = std::move(o);
      LogInfo(manifest.experiment + ": seed " + std::to_string(seed) + " done");
    }
  };
  const int n_threads =
      std::min<int>(config.parallel, static_cast<int>(config.seeds.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  manifest.finished_at = Timestamp();
  Json j = detail::ParseJson(ManifestToJson(manifest), "manifest");
  j["config"] = ConfigJson(config);
  WriteTextFile(config.output_dir / "manifest.json", j.dump(2) + "\n");
  return manifest;
}

std::string ManifestToJson(const RunManifest& m) {
  Json j;
  j["config_hash"] = m.config_hash;
  j["toolkit_version"] = m.toolkit_version;
  j["experiment"] = m.experiment;
  j["env_signature"] = m.env_signature;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["all_ok"] = m.all_ok();
  Json seeds = Json::array();
  for (const SeedOutcome& s : m.seeds) {
    Json sj;
    sj["seed"] = s.seed;
    sj["status"] = s.ok ? "ok" : "failed";
    if (!s.ok) sj["error"] = s.error;
    sj["files"] = s.files;
    Json metrics = Json::object();
    for (const auto& [k, v] : s.metrics) metrics[k] = detail::NumberJson(v);
    sj["metrics"] = std::move(metrics);
    seeds.push_back(std::move(sj));
  }
  j["seeds"] = std::move(seeds);
  return j.dump(2) + "\n";
}

RunManifest ManifestFromJson(std::string_view text) {
  const Json j = detail::ParseJson(text, "manifest");
  auto str = [&](const char* key) {
    Require(j.contains(key) && j[key].is_string(), ErrorCode::kIo,
            std::string("manifest field '") + key + "' is missing or not a string");
    return j[key].get<std::string>();
  };
  RunManifest m;
  m.config_hash = str("config_hash");
  m.toolkit_version = str("toolkit_version");
  m.experiment = str("experiment");
  m.env_signature = str("env_signature");
  m.started_at = str("started_at");
  m.finished_at = str("finished_at");
  Require(j.contains("seeds") && j["seeds"].is_array(), ErrorCode::kIo,
          "manifest field 'seeds' is missing");
  for (const Json& sj : j["seeds"]) {
    SeedOutcome s;
    Require(sj.is_object() && sj.contains("seed") && sj["seed"].is_number_unsigned() &&
                sj.contains("status") && sj["status"].is_string(),
            ErrorCode::kIo, "manifest seed entry needs 'seed' and 'status'");
    s.seed = sj["seed"].get<std::uint64_t>();
    s.ok = sj["status"].get<std::string>() == "ok";
    if (sj.contains("error") && sj["error"].is_string()) s.error = sj["error"].get<std::string>();
    if (sj.contains("files")) {
      for (const Json& f : sj["files"]) s.files.push_back(f.get<std::string>());
    }
    if (sj.contains("metrics")) {
      for (const auto& [k, v] : sj["metrics"].items()) {
        s.metrics[k] = detail::NumberFrom(v, "metrics." + k);
      }
    }
    m.seeds.push_back(std::move(s));
  }
  return m;
}

Summary summarize(const std::vector<RunManifest>& manifests) {
  Require(!manifests.empty(), ErrorCode::kConfig, "summarize needs at least one manifest");
  Summary out;
  out.env_signature = manifests.front().env_signature;
  for (const RunManifest& m : manifests) {
    Require(m.env_signature == out.env_signature, ErrorCode::kConfig,
            "summarize: manifests come from different environments ('" + out.env_signature +
                "' vs '" + m.env_signature + "')");
  }
  std::vector<std::vector<double>> samples;
  for (const RunManifest& m : manifests) {
    auto it = std::find_if(out.configs.begin(), out.configs.end(), [&](const ConfigSummary& c) {
      return c.experiment == m.experiment && c.config_hash == m.config_hash;
    });
    if (it == out.configs.end()) {
      out.configs.push_back({m.experiment, m.config_hash, 0, kNaN, kNaN});
      samples.emplace_back();
      it = out.configs.end() - 1;
    }
    auto& x = samples[it - out.configs.begin()];
    for (const SeedOutcome& s : m.seeds) {
      if (auto r = ReturnOf(s)) x.push_back(*r);
    }
  }
  for (std::size_t i = 0; i < out.configs.size(); ++i) {
    out.configs[i].n_seeds = static_cast<int>(samples[i].size());
    std::tie(out.configs[i].mean, out.configs[i].stddev) = MeanStd(samples[i]);
  }

  std::map<std::uint64_t, double> srpo, baseline;
  std::set<std::string> srpo_cfgs, baseline_cfgs;
  for (const RunManifest& m : manifests) {
    const bool is_srpo = m.experiment == ToString(Experiment::kTrainSrpo);
    const bool is_base = m.experiment == ToString(Experiment::kTrainBaseline);
    if (!is_srpo && !is_base) continue;
    (is_srpo ? srpo_cfgs : baseline_cfgs).insert(m.config_hash);
    auto& arm = is_srpo ? srpo : baseline;
    for (const SeedOutcome& s : m.seeds) {
      if (auto r = ReturnOf(s)) {
        Require(!arm.contains(s.seed), ErrorCode::kConfig,
                "summarize: seed " + std::to_string(s.seed) + " appears twice in the " +
                    m.experiment + " arm");
        arm[s.seed] = *r;
      }
    }
  }
  Require(srpo_cfgs.size() <= 1 && baseline_cfgs.size() <= 1, ErrorCode::kConfig,
          "summarize: paired comparison needs one configuration per arm");
  std::vector<double> diffs;
  for (const auto& [seed, value] : srpo) {
    const auto it = baseline.find(seed);
    if (it == baseline.end()) continue;
    out.paired.push_back({seed, value, it->second, value - it->second});
    diffs.push_back(value - it->second);
    if (value > it->second) ++out.srpo_wins;
  }
  out.paired_mean_difference = diffs.empty() ? kNaN : MeanStd(diffs).first;
  return out;
}

Summary summarize_files(const std::vector<std::filesystem::path>& paths) {
  std::vector<RunManifest> manifests;
  for (const auto& p : paths) {
    try {
      manifests.push_back(ManifestFromJson(ReadTextFile(p)));
    } catch (const Error& e) {
      throw Error(e.code(), p.string() + ": " + e.what());
    }
  }
  return summarize(manifests);
}

std::string Summary::ConfigsCsv() const {
  CsvWriter csv({"experiment", "config_hash", "n_seeds", "mean", "std"});
  for (const ConfigSummary& c : configs) {
    csv.Row({c.experiment, c.config_hash, std::to_string(c.n_seeds), FormatDouble(c.mean),
             FormatDouble(c.stddev)});
  }
  return csv.str();
}

std::string Summary::PairedCsv() const {
  CsvWriter csv({"seed", "srpo", "baseline", "difference"});
  for (const PairedRow& r : paired) {
    csv.Row({std::to_string(r.seed), FormatDouble(r.srpo), FormatDouble(r.baseline),
             FormatDouble(r.difference)});
  }
  return csv.str();
}

std::string Summary::ToText() const {
  std::ostringstream os;
  os << "environment: " << env_signature << "\n";
  for (const ConfigSummary& c : configs) {
    os << c.experiment << " [" << c.config_hash << "] seeds=" << c.n_seeds << " "
       << kReturnMetric << "=" << FormatDouble(c.mean) << " +/- " << FormatDouble(c.stddev)
       << "\n";
  }
  if (!paired.empty()) {
    os << "paired srpo - baseline over " << paired.size()
       << " seeds: mean=" << FormatDouble(paired_mean_difference) << " srpo_ahead=" << srpo_wins
       << "/" << paired.size() << "\n";
    for (const PairedRow& r : paired) {
      os << "  seed " << r.seed << ": " << FormatDouble(r.srpo) << " vs "
         << FormatDouble(r.baseline) << " (" << FormatDouble(r.difference) << ")\n";
    }
  }
  return os.str();
}

}  // namespace srpo
