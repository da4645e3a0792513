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


// Seeded experiment orchestration: config parsing, per-seed execution,
// artifacts, run manifests and cross-run summaries.

#ifndef SRPOLAB_EXPERIMENTS_HPP_
#define SRPOLAB_EXPERIMENTS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srpolab/density.hpp"
#include "srpolab/envs.hpp"
#include "srpolab/learner.hpp"
#include "srpolab/theory.hpp"

namespace srpo {

inline constexpr const char* kToolkitVersion = "0.1.0";

enum class Experiment {
  kSolve,
  kOccupancy,
  kTrainSrpo,
  kTrainBaseline,
  kTrainBehaviorReg,
  kVerifyTheory,
  kDensity,
};
std::string ToString(Experiment e);
Experiment ParseExperiment(const std::string& name);

enum class OutputFormat { kCsv, kJson };

struct RunConfig {
  Experiment experiment = Experiment::kSolve;
  EnvSpec env;
  SrpoConfig srpo;
  LearnerConfig learner;
  SuiteOptions theory;  // seed is replaced by the run seed
  MotivatingOptions density;
  std::vector<std::uint64_t> seeds = {0};
  std::filesystem::path output_dir = "runs";
  OutputFormat format = OutputFormat::kCsv;
  int parallel = 1;

  // Throws kConfig naming the offending field.
  void Validate() const;
};

// Parses a JSON config document. Unknown keys, wrong types and invalid
// values raise kConfig with the field path and, where it can be located,
// the line of the field in the source text.
RunConfig ParseRunConfig(std::string_view text);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Fully resolved config as JSON text with sorted keys. Seeds and execution
// settings (output_dir, parallel) are excluded, so runs of one
// configuration over different seed batches share a hash.
std::string CanonicalConfigJson(const RunConfig& config);
// 16 hex digits of FNV-1a over the canonical JSON.
std::string ConfigHash(const RunConfig& config);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::vector<std::string> files;  // relative to the run output directory
  // Scalar results, e.g. "final_mean_return" or "<theorem>.pass_rate".
  std::map<std::string, double> metrics;
};

struct RunManifest {
  std::string config_hash;
  std::string toolkit_version = kToolkitVersion;
  std::string experiment;
  std::string env_signature;
  std::string started_at;
  std::string finished_at;
  std::vector<SeedOutcome> seeds;

  bool all_ok() const;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitPartial = 2;

// Runs every seed (up to config.parallel at once), writes per-seed
// artifacts under output_dir/seed_<k>/ and output_dir/manifest.json. A
// failing seed is recorded in the manifest and never touches the other
// seeds' files.
RunManifest run(const RunConfig& config);
// Runs one seed into dir. File names in the outcome are relative to dir.
SeedOutcome RunSeed(const RunConfig& config, std::uint64_t seed,
                    const std::filesystem::path& dir);

std::string ManifestToJson(const RunManifest& manifest);
RunManifest ManifestFromJson(std::string_view text);

inline constexpr const char* kReturnMetric = "final_mean_return";

// Statistics of kReturnMetric over the successful seeds of one config.
struct ConfigSummary {
  std::string experiment;
  std::string config_hash;
  int n_seeds = 0;  // NaN mean and stddev when 0
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for one seed
};

struct PairedRow {
  std::uint64_t seed;
  double srpo;
  double baseline;
  double difference;  // srpo - baseline
};

struct Summary {
  std::string env_signature;
  std::vector<ConfigSummary> configs;
  std::vector<PairedRow> paired;  // empty unless both arms are present
  double paired_mean_difference = 0.0;
  int srpo_wins = 0;

  std::string ToText() const;
  std::string ConfigsCsv() const;
  std::string PairedCsv() const;
};

// Refuses (kConfig) manifests from different environments.
Summary summarize(const std::vector<RunManifest>& manifests);
Summary summarize_files(const std::vector<std::filesystem::path>& paths);

}  // namespace srpo

#endif  // SRPOLAB_EXPERIMENTS_HPP_
