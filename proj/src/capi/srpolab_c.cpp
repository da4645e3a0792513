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


#include "srpolab/srpolab.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "srpolab/error.hpp"
#include "srpolab/experiments.hpp"
#include "srpolab/io.hpp"
#include "srpolab/learner.hpp"
#include "srpolab/log.hpp"
#include "srpolab/solvers.hpp"
#include "srpolab/theory.hpp"

struct srpo_family {
  srpo::HipMdpFamily family;
};

struct srpo_training {
  srpo::TrainingResult result;
};

namespace {

thread_local std::string g_last_error;

srpo_status SetError(srpo_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
srpo_status Guard(Fn fn) {
  try {
    g_last_error.clear();
    fn();
    return SRPO_OK;
  } catch (const srpo::Error& e) {
    return SetError(static_cast<srpo_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return SetError(SRPO_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return SetError(SRPO_ERR_INTERNAL, e.what());
  } catch (...) {
    return SetError(SRPO_ERR_INTERNAL, "unknown error");
  }
}

void NotNull(const void* p, const char* name) {
  srpo::Require(p != nullptr, srpo::ErrorCode::kInvalidArgument,
                std::string(name) + " must not be NULL");
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void SetString(char** out, const std::string& s) {
  if (out != nullptr) *out = CopyString(s);
}

const srpo::TabularMdp& Member(const srpo_family* f, int member) {
  NotNull(f, "family");
  srpo::Require(member >= 0 && member < f->family.size(), srpo::ErrorCode::kInvalidArgument,
                "member index " + std::to_string(member) + " is out of range");
  return f->family.member(member);
}

std::vector<std::uint64_t> ParseSeeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, comma - start);
    char* end = nullptr;
    const bool digits = !item.empty() && item.find_first_not_of("0123456789") == std::string::npos;
    const unsigned long long v = digits ? std::strtoull(item.c_str(), &end, 10) : 0;
    srpo::Require(digits && end != nullptr && *end == '\0', srpo::ErrorCode::kConfig,
                  "--seeds: '" + item + "' is not a nonnegative integer");
    seeds.push_back(v);
    start = comma + 1;
  }
  return seeds;
}

}  // namespace

extern "C" {

const char* srpo_version(void) { return srpo::kToolkitVersion; }

const char* srpo_last_error(void) { return g_last_error.c_str(); }

void srpo_string_free(char* s) { std::free(s); }

srpo_status srpo_set_log_level(const char* level) {
  return Guard([&] {
    NotNull(level, "level");
    const std::string v(level);
    if (v == "error") {
      srpo::SetLogLevel(srpo::LogLevel::kError);
    } else if (v == "info") {
      srpo::SetLogLevel(srpo::LogLevel::kInfo);
    } else if (v == "debug") {
      srpo::SetLogLevel(srpo::LogLevel::kDebug);
    } else {
      srpo::Fail(srpo::ErrorCode::kInvalidArgument, "unknown log level '" + v + "'");
    }
  });
}

srpo_status srpo_family_from_config(const char* config_json, srpo_family** out) {
  return Guard([&] {
    NotNull(config_json, "config_json");
    NotNull(out, "out");
    const srpo::RunConfig cfg = srpo::ParseRunConfig(config_json);
    *out = new srpo_family{srpo::make_family(cfg.env)};
  });
}

srpo_status srpo_family_from_json(const char* family_json, srpo_family** out) {
  return Guard([&] {
    NotNull(family_json, "family_json");
    NotNull(out, "out");
    *out = new srpo_family{srpo::FamilyFromJson(family_json)};
  });
}

srpo_status srpo_family_to_json(const srpo_family* family, char** out) {
  return Guard([&] {
    NotNull(family, "family");
    NotNull(out, "out");
    *out = CopyString(srpo::FamilyToJson(family->family));
  });
}

void srpo_family_free(srpo_family* family) { delete family; }

srpo_status srpo_family_shape(const srpo_family* family, int* n_members, int* n_states,
                              int* n_actions) {
  return Guard([&] {
    NotNull(family, "family");
    if (n_members != nullptr) *n_members = family->family.size();
    if (n_states != nullptr) *n_states = family->family.member(0).n_states();
    if (n_actions != nullptr) *n_actions = family->family.member(0).n_actions();
  });
}

srpo_status srpo_solve_member(const srpo_family* family, int member, double* values,
                              int* actions, double* expected_return) {
  return Guard([&] {
    const srpo::TabularMdp& m = Member(family, member);
    const srpo::OptimalSolution opt = srpo::solve_optimal(m);
    for (int s = 0; s < m.n_states(); ++s) {
      if (values != nullptr) values[s] = opt.values.v[s];
      if (actions != nullptr) actions[s] = opt.policy.deterministic_action(s);
    }
    if (expected_return != nullptr) *expected_return = srpo::expected_return(m, opt.policy);
  });
}

srpo_status srpo_occupancy_member(const srpo_family* family, int member, double* occupancy) {
  return Guard([&] {
    const srpo::TabularMdp& m = Member(family, member);
    NotNull(occupancy, "occupancy");
    const srpo::OccupancyVector d = srpo::occupancy(m, srpo::solve_optimal(m).policy);
    for (int s = 0; s < d.size(); ++s) occupancy[s] = d[s];
  });
}

srpo_status srpo_verify_theory(const srpo_family* family, int n_pairs, int n_random_policies,
                               uint64_t seed, char** reports_jsonl, int* all_pass) {
  return Guard([&] {
    NotNull(family, "family");
    srpo::Require(n_pairs > 0 && n_random_policies >= 0, srpo::ErrorCode::kInvalidArgument,
                  "n_pairs must be positive and n_random_policies >= 0");
    srpo::SuiteOptions opt;
    opt.n_pairs = n_pairs;
    opt.n_random_policies = n_random_policies;
    opt.seed = seed;
    const auto reports = srpo::generate_report_suite(family->family, opt);
    if (all_pass != nullptr) {
      *all_pass = 1;
      for (const auto& t : srpo::TallyReports(reports)) {
        if (t.satisfied != t.premise_holding) *all_pass = 0;
      }
    }
    SetString(reports_jsonl, srpo::TheoryReportsJsonl(reports));
  });
}

srpo_status srpo_train(const srpo_family* family, srpo_algorithm algorithm,
                       const char* config_json, uint64_t seed, srpo_training** out) {
  return Guard([&] {
    NotNull(family, "family");
    NotNull(out, "out");
    srpo::RunConfig cfg;
    if (config_json != nullptr) cfg = srpo::ParseRunConfig(config_json);
    auto t = std::make_unique<srpo_training>();
    switch (algorithm) {
      case SRPO_ALGO_SRPO:
        t->result = srpo::srpo_train(family->family, cfg.srpo, cfg.learner, seed);
        break;
      case SRPO_ALGO_BASELINE:
        t->result = srpo::baseline_train(family->family, cfg.srpo, cfg.learner, seed);
        break;
      case SRPO_ALGO_BEHAVIOR_REG:
        t->result =
            srpo::behavior_regularized_train(family->family, cfg.srpo, cfg.learner, seed);
        break;
      default:
        srpo::Fail(srpo::ErrorCode::kInvalidArgument, "unknown algorithm");
    }
    *out = t.release();
  });
}

srpo_status srpo_training_final_returns(const srpo_training* training, double* returns,
                                        double* mean) {
  return Guard([&] {
    NotNull(training, "training");
    if (returns != nullptr) {
      for (std::size_t i = 0; i < training->result.final_returns.size(); ++i) {
        returns[i] = training->result.final_returns[i];
      }
    }
    if (mean != nullptr) *mean = training->result.final_mean_return;
  });
}

srpo_status srpo_training_log_csv(const srpo_training* training, char** out) {
  return Guard([&] {
    NotNull(training, "training");
    NotNull(out, "out");
    *out = CopyString(srpo::TrainingLogCsv(training->result.log));
  });
}

srpo_status srpo_training_policies_json(const srpo_training* training, char** out) {
  return Guard([&] {
    NotNull(training, "training");
    NotNull(out, "out");
    std::string json = "[";
    for (std::size_t i = 0; i < training->result.policies.size(); ++i) {
      if (i > 0) json += ",";
      json += srpo::PolicyToJson(training->result.policies[i]);
    }
    *out = CopyString(json + "]");
  });
}

void srpo_training_free(srpo_training* training) { delete training; }

srpo_status srpo_run(const char* config_path, const char* experiment, const char* seeds,
                     const char* output_dir, int parallel, int* exit_code,
                     char** manifest_json) {
  if (exit_code != nullptr) *exit_code = srpo::kExitConfigError;
  return Guard([&] {
    NotNull(config_path, "config_path");
    srpo::RunConfig cfg = srpo::LoadRunConfig(config_path);
    if (experiment != nullptr) cfg.experiment = srpo::ParseExperiment(experiment);
    if (seeds != nullptr) cfg.seeds = ParseSeeds(seeds);
    if (output_dir != nullptr) cfg.output_dir = output_dir;
    if (parallel != 0) cfg.parallel = parallel;
    cfg.Validate();
    const srpo::RunManifest manifest = srpo::run(cfg);
    if (exit_code != nullptr) {
      *exit_code = manifest.all_ok() ? srpo::kExitOk : srpo::kExitPartial;
    }
    SetString(manifest_json, srpo::ManifestToJson(manifest));
  });
}

srpo_status srpo_summarize(const char* const* manifest_paths, size_t n_paths, char** text,
                           char** configs_csv, char** paired_csv) {
  return Guard([&] {
    srpo::Require(n_paths == 0 || manifest_paths != nullptr,
                  srpo::ErrorCode::kInvalidArgument, "manifest_paths must not be NULL");
    std::vector<std::filesystem::path> paths;
    for (size_t i = 0; i < n_paths; ++i) {
      NotNull(manifest_paths[i], "manifest path");
      paths.emplace_back(manifest_paths[i]);
    }
    const srpo::Summary summary = srpo::summarize_files(paths);
    SetString(text, summary.ToText());
    SetString(configs_csv, summary.ConfigsCsv());
    SetString(paired_csv, summary.PairedCsv());
  });
}

}  // extern "C"
