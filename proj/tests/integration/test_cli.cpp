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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
};

// Runs the tool with stdout and stderr captured together.
Result Tool(const std::string& args) {
  const std::string cmd = std::string("\"") + SRPOLAB_CLI + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::fgets(buf, sizeof(buf), pipe) != nullptr) out += buf;
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path Scratch() {
  const fs::path dir = fs::temp_directory_path() / "srpolab_test_cli";
  static bool once = [&] {
    fs::remove_all(dir);
    fs::create_directories(dir);
    return true;
  }();
  (void)once;
  return dir;
}

fs::path WriteConfig(const std::string& name, const std::string& text) {
  const fs::path p = Scratch() / name;
  std::ofstream(p) << text;
  return p;
}

const char* kTrain = R"({
  "env": {"kind": "gridworld", "width": 3, "height": 3, "dynamics_params": [0.0, 0.1]},
  "learner": {"epochs": 8, "updates_per_epoch": 40},
  "seeds": [0, 1]
})";

TEST_CASE("help and usage errors") {
  CHECK(Tool("--help").code == 0);
  CHECK(Tool("").code == 1);
  CHECK(Tool("train-srpo").code == 1);
  CHECK(Tool("--version").out.find("0.1.0") != std::string::npos);
}

TEST_CASE("train subcommands write per-seed artifacts and summarize pairs them") {
  const fs::path cfg = WriteConfig("train.json", kTrain);
  const fs::path srpo = Scratch() / "srpo";
  const fs::path base = Scratch() / "base";
  const Result a = Tool("train-srpo --config " + cfg.string() + " --out " + srpo.string() +
                        " --parallel 2");
  CHECK(a.code == 0);
  CHECK(a.out.find("\"all_ok\": true") != std::string::npos);
  for (const char* f : {"seed_0/training_log.csv", "seed_1/training_log.csv",
                        "seed_0/policies.json", "seed_1/policies.json", "manifest.json"}) {
    CHECK_MESSAGE(fs::exists(srpo / f), f);
  }
  CHECK(Tool("train-baseline --config " + cfg.string() + " --out " + base.string()).code == 0);
  const Result s = Tool("summarize " + (srpo / "manifest.json").string() + " " +
                        (base / "manifest.json").string() + " --out " +
                        (Scratch() / "summary").string());
  CHECK(s.code == 0);
  CHECK(s.out.find("paired srpo - baseline over 2 seeds") != std::string::npos);
  CHECK(fs::exists(Scratch() / "summary/paired.csv"));
  CHECK(Slurp(Scratch() / "summary/paired.csv").rfind("seed,srpo,baseline,difference\n", 0) == 0);
}

TEST_CASE("seeds override and reruns are byte identical") {
  const fs::path cfg = WriteConfig("rerun.json", kTrain);
  const fs::path d1 = Scratch() / "r1";
  const fs::path d2 = Scratch() / "r2";
  CHECK(Tool("train-behavior-reg --config " + cfg.string() + " --seeds 5 --out " + d1.string())
            .code == 0);
  CHECK(Tool("train-behavior-reg --config " + cfg.string() + " --seeds 5 --out " + d2.string())
            .code == 0);
  CHECK(fs::exists(d1 / "seed_5/training_log.csv"));
  CHECK_FALSE(fs::exists(d1 / "seed_0"));
  CHECK(Slurp(d1 / "seed_5/training_log.csv") == Slurp(d2 / "seed_5/training_log.csv"));
  CHECK(Slurp(d1 / "seed_5/policies.json") == Slurp(d2 / "seed_5/policies.json"));
}

TEST_CASE("config errors exit with 1 and a located diagnostic") {
  const fs::path cfg = WriteConfig("bad.json", "{\n  \"env\": {\n    \"kind\": \"maze\"\n  }\n}\n");
  const Result r = Tool("solve --config " + cfg.string());
  CHECK(r.code == 1);
  CHECK(r.out.find("line 3") != std::string::npos);
  CHECK(r.out.find("env.kind") != std::string::npos);
  CHECK(Tool("solve --config " + (Scratch() / "missing.json").string()).code == 1);
  const fs::path ok = WriteConfig("ok.json", "{}");
  CHECK(Tool("solve --config " + ok.string() + " --seeds 1,,2").code == 1);
  CHECK(Tool("solve --config " + ok.string() + " --parallel 0").code == 1);
}

TEST_CASE("partial failure exits with 2 and keeps the good seeds") {
  const fs::path cfg = WriteConfig("partial.json", R"({"experiment": "occupancy"})");
  const fs::path out = Scratch() / "partial";
  fs::create_directories(out);
  std::ofstream(out / "seed_1") << "in the way";
  const Result r = Tool("run --config " + cfg.string() + " --seeds 0,1,2 --out " + out.string());
  CHECK(r.code == 2);
  CHECK(fs::exists(out / "seed_0/occupancy.csv"));
  CHECK(fs::exists(out / "seed_2/occupancy.csv"));
  const std::string manifest = Slurp(out / "manifest.json");
  CHECK(manifest.find("\"status\": \"failed\"") != std::string::npos);
  CHECK(manifest.find("\"all_ok\": false") != std::string::npos);
}

TEST_CASE("verify-theory and density subcommands") {
  const fs::path cfg = WriteConfig("pend.json", R"({
    "env": {"kind": "pendulum", "angle_bins": 7, "velocity_bins": 7,
            "dynamics_params": [0.5, 1.0], "action_cost_coeff": 0.1},
    "theory": {"n_pairs": 2, "n_random_policies": 1},
    "density": {"n_rollouts": 20},
    "format": "json"
  })");
  CHECK(Tool("verify-theory --config " + cfg.string() + " --out " +
             (Scratch() / "theory").string())
            .code == 0);
  CHECK(fs::exists(Scratch() / "theory/seed_0/theory_reports.jsonl"));
  CHECK(Tool("density --config " + cfg.string() + " --out " + (Scratch() / "density").string())
            .code == 0);
  CHECK(fs::exists(Scratch() / "density/seed_0/density.json"));
  const Result mixed = Tool("summarize " + (Scratch() / "theory/manifest.json").string() + " " +
                            (Scratch() / "srpo/manifest.json").string());
  CHECK(mixed.code == 1);
  CHECK(mixed.out.find("different environments") != std::string::npos);
}

}  // namespace
