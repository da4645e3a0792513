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


// srpolab command-line tool:
//   srpolab <experiment> --config <path> [--seeds 0,1,2] [--out <dir>] [--parallel N]
//   srpolab run --config <path> ...        (experiment taken from the config)
//   srpolab summarize <manifest.json>... [--out <dir>]

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "srpolab/srpolab.h"

namespace {

constexpr const char* kExperiments[] = {"solve",          "occupancy",          "train-srpo",
                                        "train-baseline", "train-behavior-reg", "verify-theory",
                                        "density"};

struct RunArgs {
  std::string config;
  std::string seeds;
  std::string out;
  int parallel = 0;
};

// Takes ownership of a string returned by the library.
std::string Take(char* s) {
  std::string out = s != nullptr ? s : "";
  srpo_string_free(s);
  return out;
}

int Run(const RunArgs& args, const char* experiment) {
  int exit_code = 1;
  char* manifest = nullptr;
  const srpo_status st =
      srpo_run(args.config.c_str(), experiment, args.seeds.empty() ? nullptr : args.seeds.c_str(),
               args.out.empty() ? nullptr : args.out.c_str(), args.parallel, &exit_code, &manifest);
  if (st != SRPO_OK) {
    std::cerr << "srpolab: " << srpo_last_error() << "\n";
    return exit_code == 0 ? 1 : exit_code;
  }
  const std::string text = Take(manifest);
  std::cout << text;
  if (exit_code != 0) std::cerr << "srpolab: some seeds failed; see the manifest\n";
  return exit_code;
}

bool WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  return out.good();
}

int Summarize(const std::vector<std::string>& manifests, const std::string& out_dir) {
  std::vector<const char*> paths;
  for (const std::string& m : manifests) paths.push_back(m.c_str());
  char* text = nullptr;
  char* configs = nullptr;
  char* paired = nullptr;
  if (srpo_summarize(paths.data(), paths.size(), &text, &configs, &paired) != SRPO_OK) {
    std::cerr << "srpolab: " << srpo_last_error() << "\n";
    return 1;
  }
  const std::string t = Take(text), c = Take(configs), p = Take(paired);
  std::cout << t;
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !WriteFile(std::filesystem::path(out_dir) / "summary.csv", c) ||
        !WriteFile(std::filesystem::path(out_dir) / "paired.csv", p)) {
      std::cerr << "srpolab: cannot write summary files to '" << out_dir << "'\n";
      return 1;
    }
  }
  return 0;
}

void AddRunOptions(CLI::App* cmd, RunArgs& args) {
  cmd->add_option("--config", args.config, "Experiment config (JSON)")->required();
  cmd->add_option("--seeds", args.seeds, "Comma-separated seeds overriding the config");
  cmd->add_option("--out", args.out, "Output directory overriding the config");
  cmd->add_option("--parallel", args.parallel, "Seeds run concurrently")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SRPO toolkit: exact solvers, theory checks and seeded experiments"};
  app.set_version_flag("--version", std::string(srpo_version()));
  app.require_subcommand(1);

  RunArgs args;
  std::vector<std::pair<CLI::App*, const char*>> experiment_cmds;
  for (const char* name : kExperiments) {
    CLI::App* cmd = app.add_subcommand(name, std::string("Run the ") + name + " experiment");
    AddRunOptions(cmd, args);
    experiment_cmds.emplace_back(cmd, name);
  }
  CLI::App* run_cmd = app.add_subcommand("run", "Run the experiment named in the config");
  AddRunOptions(run_cmd, args);

  std::vector<std::string> manifests;
  std::string summary_out;
  CLI::App* sum_cmd = app.add_subcommand("summarize", "Summarize run manifests");
  sum_cmd->add_option("manifests", manifests, "manifest.json files")->required();
  sum_cmd->add_option("--out", summary_out, "Directory for summary.csv and paired.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (sum_cmd->parsed()) return Summarize(manifests, summary_out);
  if (run_cmd->parsed()) return Run(args, nullptr);
  for (const auto& [cmd, name] : experiment_cmds) {
    if (cmd->parsed()) return Run(args, name);
  }
  return 1;
}
