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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include <doctest.h>
#include <json.hpp>

#include "kcl/errors.hpp"
#include "kcl/similarity.hpp"
#include "kcl/worlds.hpp"

using namespace kcl;
using nlohmann::json;

namespace {

BallWorldSpec disjoint_spec(int k, int res) {
  BallWorldSpec s;
  s.K = k;
  s.resolution = res;
  s.mode = OverlapMode::Disjoint;
  return s;
}

BallWorldSpec overlap_spec(int res) {
  BallWorldSpec s;
  s.K = 2;
  s.resolution = res;
  s.mode = OverlapMode::TwoBallOverlap;
  return s;
}

// A hand-written valid 4-point world file.
json four_point_json() {
  json j;
  j["points"] = json::array();
  for (int i = 0; i < 4; ++i)
    j["points"].push_back({{"id", i}, {"coords", {0.1 * i}}, {"nu", 1.0}});
  // Block-diagonal joint over {0,1} and {2,3}; total mass 1.
  j["joint"] = {{0.125, 0.125, 0.0, 0.0},
                {0.125, 0.125, 0.0, 0.0},
                {0.0, 0.0, 0.125, 0.125},
                {0.0, 0.0, 0.125, 0.125}};
  j["clusters"] = {{0, 1}, {2, 3}};
  j["labels"] = {0, 0, 1, 1};
  return j;
}

}  // namespace

TEST_SUITE("worlds") {

TEST_CASE("three disjoint balls at resolution 1") {
  FiniteWorld w = build_disjoint_balls(disjoint_spec(3, 1));
  REQUIRE(w.size() == 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j)
        CHECK(w.joint(i, j) ==
              doctest::Approx(3.0 * w.marginal(i) * w.marginal(j))
                  .epsilon(1e-15));
      else
        CHECK(w.joint(i, j) == 0.0);
    }
  }
  // sim(same ball) = K - lambda, bit-exact.
  CHECK(sim(w, 0, 0, 0.5) == 3.0 - 0.5);
  CHECK(sim(w, 1, 1, 1.0) == 2.0);
}

TEST_CASE("single ball degenerates to sim = 1 - lambda") {
  FiniteWorld w = build_disjoint_balls(disjoint_spec(1, 4));
  for (int a = 0; a < w.size(); ++a)
    for (int b = 0; b < w.size(); ++b) CHECK(sim(w, a, b, 0.25) == 1.0 - 0.25);
}

TEST_CASE("two balls, lambda = 1") {
  FiniteWorld w = build_disjoint_balls(disjoint_spec(2, 2));
  CHECK(sim(w, 0, 1, 1.0) == 1.0);   // same ball: 2 - 1
  CHECK(sim(w, 0, 2, 1.0) == -1.0);  // cross ball
}

TEST_CASE("sim is bit-exact K * [same ball] - lambda") {
  for (int k : {2, 3, 4, 5, 7, 8}) {
    for (int res : {1, 3, 4}) {
      FiniteWorld w = build_disjoint_balls(disjoint_spec(k, res));
      for (int a = 0; a < w.size(); ++a) {
        for (int b = 0; b < w.size(); ++b) {
          bool same = a / res == b / res;
          CHECK(sim(w, a, b, 1.5) == (same ? k - 1.5 : -1.5));
        }
      }
    }
  }
}

TEST_CASE("cluster masses are 1/K") {
  for (int k : {2, 3, 8}) {
    FiniteWorld w = build_disjoint_balls(disjoint_spec(k, 4));
    for (double mass : w.cluster_mass)
      CHECK(std::abs(mass - 1.0 / k) <= 1e-12);
  }
}

TEST_CASE("disjoint builder rejects bad specs") {
  BallWorldSpec s = disjoint_spec(2, 1);
  s.centers = {Eigen::Vector2d(0, 0), Eigen::Vector2d(1.0, 0)};
  s.radius = 1.0;  // distance 1 <= 2r
  CHECK_THROWS_AS(build_disjoint_balls(s), ConstructionError);
  CHECK_THROWS_AS(build_disjoint_balls(disjoint_spec(2, 0)), ConstructionError);
}

TEST_CASE("overlap world sim values") {
  FiniteWorld w = build_overlap_balls(overlap_spec(2));
  REQUIRE(w.size() == 6);  // E1 {0,1}, I {2,3}, E2 {4,5}
  // lambda = 1: {1, -1, 0} over the three cases.
  CHECK(sim(w, 0, 1, 1.0) == 1.0);   // same exclusive
  CHECK(sim(w, 4, 5, 1.0) == 1.0);
  CHECK(sim(w, 0, 4, 1.0) == -1.0);  // opposite exclusives
  CHECK(sim(w, 2, 3, 1.0) == 0.0);   // both intersection
  CHECK(sim(w, 2, 0, 1.0) == 0.0);   // intersection x exclusive
  // lambda = 0: {2, 0, 1}.
  CHECK(sim(w, 0, 1, 0.0) == 2.0);
  CHECK(sim(w, 0, 4, 0.0) == 0.0);
  CHECK(sim(w, 2, 3, 0.0) == 1.0);

  // Region masses 3/8, 1/4, 3/8 and overlapping clusters of mass 5/8.
  CHECK(w.cluster_mass[0] == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(w.cluster_mass[1] == doctest::Approx(0.625).epsilon(1e-14));
  // Intersection points carry label 0 (cluster 1 in paper counting).
  CHECK(w.labels[2] == 0);
  CHECK(w.labels[3] == 0);
  CHECK(w.labels[4] == 1);
}

TEST_CASE("overlap max admissible delta is 1 - lambda") {
  FiniteWorld w = build_overlap_balls(overlap_spec(3));
  for (double lambda : {0.0, 0.5, 1.0, 2.0}) {
    std::vector<int> ids = {0, 1};
    CHECK(max_admissible_delta(w, ids, lambda) == 1.0 - lambda);
  }
  CHECK_THROWS_AS(build_overlap_balls([] {
                    auto s = overlap_spec(1);
                    s.radius = 0.0;
                    return s;
                  }()),
                  ConstructionError);
}

TEST_CASE("world JSON round trip and file IO") {
  FiniteWorld w = build_overlap_balls(overlap_spec(2));
  std::string path = "kcl_test_world.json";
  save_world(w, path);
  FiniteWorld loaded = load_world(path);
  CHECK(loaded.size() == w.size());
  CHECK(loaded.joint == w.joint);
  CHECK(loaded.clusters == w.clusters);
  CHECK(loaded.labels == w.labels);
  for (int i = 0; i < w.size(); ++i)
    CHECK(loaded.marginal(i) == doctest::Approx(w.marginal(i)).epsilon(1e-14));
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_world("does_not_exist.json"), SchemaError);
}

TEST_CASE("well-formed four point file loads with unit mass") {
  FiniteWorld w = world_from_json(four_point_json());
  double total = 0.0;
  for (int i = 0; i < w.size(); ++i) total += w.point_mass(i);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("asymmetric joint raises SymmetryError naming the pair") {
  json j = four_point_json();
  j["joint"][0][1] = 0.13;  // breaks symmetry at (0, 1)
  CHECK_THROWS_WITH_AS(world_from_json(j), doctest::Contains("(0, 1)"),
                       SymmetryError);
}

TEST_CASE("distinct diagnostics for the other invariants") {
  {
    json j = four_point_json();
    for (auto& row : j["joint"])
      for (auto& v : row) v = v.get<double>() * 2.0;
    CHECK_THROWS_AS(world_from_json(j), NormalizationError);
  }
  {
    // A zero row forces a zero marginal (and breaks normalization; rescale
    // the rest so only the marginal check can fire).
    json j = four_point_json();
    j["joint"] = {{0.0, 0.0, 0.0, 0.0},
                  {0.0, 0.25, 0.0, 0.0},
                  {0.0, 0.0, 0.375, 0.125},
                  {0.0, 0.0, 0.125, 0.125}};
    CHECK_THROWS_AS(world_from_json(j), ZeroMarginalError);
  }
  {
    json j = four_point_json();
    j["clusters"] = {{0, 1}, {2}};  // point 3 uncovered
    j.erase("labels");
    CHECK_THROWS_AS(world_from_json(j), CoverageError);
  }
  {
    json j = four_point_json();
    j["labels"] = {0, 0, 1, 0};  // point 3 labeled with a foreign cluster
    CHECK_THROWS_AS(world_from_json(j), LabelError);
  }
}

TEST_CASE("omitted clusters load as incomplete structure") {
  json j = four_point_json();
  j.erase("clusters");
  j.erase("labels");
  FiniteWorld w = world_from_json(j);
  CHECK(w.clusters.empty());
  ClusterStructure s = structure_from_world(w, 1.0, 0.0);
  AssumptionReport rep = verify_assumption(w, s);
  CHECK(rep.structure_incomplete);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("positive pair sampler determinism and parity checks") {
  FiniteWorld w = build_disjoint_balls(disjoint_spec(3, 2));
  auto a = sample_positive_pairs(w, 8, 42);
  auto b = sample_positive_pairs(w, 8, 42);
  CHECK(a == b);
  auto c = sample_positive_pairs(w, 8, 43);
  CHECK(a != c);

  CHECK_THROWS_WITH_AS(sample_positive_pairs(w, 7, 1),
                       doctest::Contains("even"), PreconditionError);
  CHECK_THROWS_AS(sample_positive_pairs(w, 0, 1), PreconditionError);
}

TEST_CASE("sampled pairs never cross balls") {
  FiniteWorld w = build_disjoint_balls(disjoint_spec(3, 2));
  auto pairs = sample_positive_pairs(w, 10000, 7);
  for (const auto& [x, xp] : pairs) CHECK(x / 2 == xp / 2);
}

TEST_CASE("empirical pair frequencies match the joint table") {
  // Multinomial concentration oracle: total-variation distance <= 3/sqrt(n).
  FiniteWorld w = build_disjoint_balls(disjoint_spec(3, 1));
  const int n = 100000;
  auto pairs = sample_positive_pairs(w, n, 2024);
  std::map<std::pair<int, int>, double> freq;
  for (const auto& p : pairs) freq[p] += 1.0 / n;
  double tv = 0.0;
  for (int a = 0; a < w.size(); ++a)
    for (int b = 0; b < w.size(); ++b)
      tv += std::abs(freq[{a, b}] - w.pair_mass(a, b));
  tv /= 2.0;
  CHECK(tv <= 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("random worlds validate and keep labels consistent") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    FiniteWorld w = random_world(10, 3, 0.3, seed);
    CHECK(w.size() == 10);
    CHECK(w.cluster_count() == 3);
    for (int x = 0; x < w.size(); ++x) {
      const auto& cluster =
          w.clusters[static_cast<size_t>(w.labels[static_cast<size_t>(x)])];
      CHECK(std::find(cluster.begin(), cluster.end(), x) != cluster.end());
    }
  }
}

}  // TEST_SUITE
