// Copyright 2026 The KCL Workbench Authors
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

#include <cstdio>
#include <fstream>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "kcl/cli.hpp"
#include "kcl/worlds.hpp"

using namespace kcl;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("bounds all on a builtin world exits 0") {
  int code = run_cli({"bounds", "all", "--world",
                      "builtin:disjoint-balls:k=4,resolution=2", "--kernel",
                      "linear", "--lambda", "1", "--delta", "auto", "--trials",
                      "10", "--proxy-class", "30", "--rademacher-draws", "20",
                      "--train-steps", "150", "--seed", "1"});
  CHECK(code == 0);
}

TEST_CASE("malformed world file exits 1 with a schema diagnostic") {
  TempFile tmp("cli_bad_world.json");
  {
    std::ofstream out(tmp.path);
    out << "{ not json";
  }
  CHECK(run_cli({"world", "validate", tmp.path}) == 1);
  CHECK(run_cli({"bounds", "decomposition", "--world", tmp.path}) == 1);
}

TEST_CASE("a violated condition (B) exits 2 and the report names it") {
  TempFile report("cli_sim_report.json");
  int code = run_cli({"sim", "check", "--world",
                      "builtin:disjoint-balls:k=3,resolution=2", "--lambda",
                      "1", "--delta", "2.5", "--out", report.path});
  CHECK(code == 2);
  json j = json::parse(slurp(report.path));
  CHECK_FALSE(j.at("pass").get<bool>());
  CHECK_FALSE(j.at("condition_b").at("pass").get<bool>());
  CHECK(j.at("condition_a").at("pass").get<bool>());
}

TEST_CASE("identical config and seed give byte-identical reports") {
  TempFile a("cli_rep_a.json"), b("cli_rep_b.json");
  std::vector<std::string> args = {
      "bounds",  "decomposition",
      "--world", "builtin:overlap-balls:resolution=2",
      "--kernel", "gaussian",
      "--sigma2", "1.0",
      "--lambda", "1",
      "--delta",  "auto",
      "--seed",   "7"};
  auto with_report = [&](const std::string& path) {
    std::vector<std::string> full = args;
    full.push_back("--report");
    full.push_back(path);
    return run_cli(full);
  };
  CHECK(with_report(a.path) == 0);
  CHECK(with_report(b.path) == 0);
  CHECK(slurp(a.path) == slurp(b.path));
}

TEST_CASE("reports embed the resolved config") {
  TempFile report("cli_rep_cfg.json");
  REQUIRE(run_cli({"bounds", "decomposition", "--world",
                   "builtin:disjoint-balls:k=2,resolution=2", "--kernel",
                   "quadratic", "--lambda", "0.5", "--delta", "auto", "--seed",
                   "3", "--report", report.path}) == 0);
  json j = json::parse(slurp(report.path));
  CHECK(j.at("config").at("kernel").at("name") == "quadratic");
  CHECK(j.at("config").at("lambda") == 0.5);
  CHECK(j.at("config").at("seed") == 3);
  CHECK(j.at("config").at("resolved_delta") == 1.5);
  CHECK(j.at("reports").size() == 1);
  CHECK(j.at("reports")[0].at("pass").get<bool>());
}

TEST_CASE("world build then validate round trips") {
  TempFile world("cli_world.json");
  CHECK(run_cli({"world", "build", "--kind", "overlap-balls", "--resolution",
                 "3", "--out", world.path}) == 0);
  CHECK(run_cli({"world", "validate", world.path}) == 0);
  FiniteWorld w = load_world(world.path);
  CHECK(w.size() == 9);
}

TEST_CASE("relations check writes the CSV contract") {
  TempFile csv("cli_relations.csv");
  CHECK(run_cli({"relations", "check", "--world",
                 "builtin:disjoint-balls:k=2,resolution=2", "--tau", "0.2",
                 "--negatives", "4", "--lambda", "1", "--seed", "5", "--out",
                 csv.path}) == 0);
  std::string text = slurp(csv.path);
  CHECK(text.rfind("relation,lhs,rhs,slack,estimator\n", 0) == 0);
  CHECK(text.find("lin_kcl_vs_info_nce") != std::string::npos);
  CHECK(text.find("quad_kcl_vs_spectral") != std::string::npos);
}

TEST_CASE("train writes a trace and a loadable checkpoint") {
  TempFile trace("cli_trace.csv"), ckpt("cli_encoder.json");
  CHECK(run_cli({"train", "--world", "builtin:disjoint-balls:k=3,resolution=2",
                 "--kernel", "linear", "--lambda", "1", "--steps", "200",
                 "--seed", "0", "--out", trace.path, "--encoder-out",
                 ckpt.path}) == 0);
  CHECK(slurp(trace.path).rfind("step,", 0) == 0);

  // The checkpoint is consumable by other subcommands.
  CHECK(run_cli({"loss", "eval", "--loss", "kcl", "--world",
                 "builtin:disjoint-balls:k=3,resolution=2", "--encoder",
                 ckpt.path, "--kernel", "linear", "--out",
                 "cli_loss_out.json"}) == 0);
  std::remove("cli_loss_out.json");
}

TEST_CASE("sweep lambda emits the CSV") {
  TempFile csv("cli_sweep.csv");
  CHECK(run_cli({"sweep", "lambda", "--values", "1,2", "--world",
                 "builtin:disjoint-balls:k=3,resolution=1", "--steps", "60",
                 "--jobs", "2", "--seed", "4", "--out", csv.path}) == 0);
  CHECK(slurp(csv.path).rfind("lambda,", 0) == 0);
}

TEST_CASE("usage errors exit 1") {
  CHECK(run_cli({"bounds", "decomposition"}) == 1);          // missing --world
  CHECK(run_cli({"frobnicate"}) == 1);                       // unknown command
  CHECK(run_cli({"world", "build", "--kind", "torus", "--out",
                 "cli_unused.json"}) == 1);                  // unknown kind
}

TEST_CASE("KCL_SEED environment variable overrides the default seed") {
  TempFile report("cli_env_seed.json");
  ::setenv("KCL_SEED", "123", 1);
  REQUIRE(run_cli({"bounds", "decomposition", "--world",
                   "builtin:disjoint-balls:k=2,resolution=1", "--report",
                   report.path}) == 0);
  ::unsetenv("KCL_SEED");
  json j = json::parse(slurp(report.path));
  CHECK(j.at("config").at("seed") == 123);
}

}  // TEST_SUITE
