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

#include <algorithm>
#include <cmath>
#include <numeric>

#include <doctest.h>

#include "kcl/encoders.hpp"
#include "kcl/errors.hpp"
#include "kcl/objectives.hpp"
#include "kcl/random.hpp"
#include "kcl/worlds.hpp"

using namespace kcl;

namespace {

FiniteWorld disjoint(int k, int res) {
  BallWorldSpec s;
  s.K = k;
  s.resolution = res;
  return build_disjoint_balls(s);
}

Eigen::MatrixXd constant_features(const FiniteWorld& w, int d = 2) {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(w.size(), d);
  f.col(0).setOnes();
  return f;
}

Eigen::MatrixXd per_cluster_features(const FiniteWorld& w,
                                     const std::vector<Eigen::VectorXd>& dirs) {
  Eigen::MatrixXd f(w.size(), dirs.front().size());
  for (int x = 0; x < w.size(); ++x)
    f.row(x) = dirs[static_cast<size_t>(w.labels[static_cast<size_t>(x)])]
                   .transpose();
  return f;
}

Eigen::MatrixXd random_features(const FiniteWorld& w, int d,
                                std::uint64_t seed) {
  return encode_all(TableEncoder::random(w.size(), d, seed), w);
}

}  // namespace

TEST_SUITE("objectives") {

TEST_CASE("population loss on hand-checked encoders") {
  FiniteWorld w = disjoint(2, 2);
  Kernel lin = linear_kernel();

  LossValue constant = population_kcl(w, constant_features(w), lin, 1.0);
  CHECK(constant.positive_term == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(constant.negative_term == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(constant.value == doctest::Approx(0.0).epsilon(1e-14));

  Eigen::MatrixXd antipodal = per_cluster_features(
      w, {Eigen::Vector2d(1, 0), Eigen::Vector2d(-1, 0)});
  LossValue anti = population_kcl(w, antipodal, lin, 1.0);
  CHECK(anti.positive_term == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(anti.negative_term == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(anti.value == doctest::Approx(-1.0).epsilon(1e-14));

  LossValue no_negatives = population_kcl(w, random_features(w, 3, 1), lin, 0.0);
  CHECK(no_negatives.value == -no_negatives.positive_term);
}

TEST_CASE("loss reconstructs from its terms") {
  FiniteWorld w = random_world(8, 3, 0.4, 3);
  for (const Kernel& k : {quadratic_kernel(), gaussian_kernel(0.5)}) {
    for (double lambda : {0.0, 0.5, 2.0}) {
      LossValue v = population_kcl(w, random_features(w, 4, 9), k, lambda);
      CHECK(v.value == doctest::Approx(-v.positive_term +
                                       lambda * v.negative_term)
                           .epsilon(1e-12));
    }
  }
}

TEST_CASE("empirical loss on identical encodings is -1 + lambda") {
  FiniteWorld w = disjoint(2, 2);
  auto pairs = sample_positive_pairs(w, 16, 3);
  for (double lambda : {0.0, 1.0, 2.5}) {
    LossValue v =
        empirical_kcl(pairs, constant_features(w), linear_kernel(), lambda);
    CHECK(v.value == doctest::Approx(-1.0 + lambda).epsilon(1e-14));
  }
}

TEST_CASE("empirical loss with n=2 matches the three-term hand sum") {
  FiniteWorld w = disjoint(2, 2);
  Eigen::MatrixXd f = random_features(w, 3, 4);
  Kernel g = gaussian_kernel(1.0);
  std::vector<std::pair<int, int>> pairs = {{0, 1}, {2, 3}};
  // One positive term per pair; the cross term has exactly (i,j) in
  // {(0,1), (1,0)}.
  double pos = 0.5 * (psi_at(g, f.row(0).dot(f.row(1))) +
                      psi_at(g, f.row(2).dot(f.row(3))));
  double cross = 0.5 * (psi_at(g, f.row(0).dot(f.row(3))) +
                        psi_at(g, f.row(2).dot(f.row(1))));
  double lambda = 1.7;
  LossValue v = empirical_kcl(pairs, f, g, lambda);
  CHECK(v.value == doctest::Approx(-pos + lambda * cross).epsilon(1e-13));
  CHECK_THROWS_AS(empirical_kcl({{0, 1}}, f, g, 1.0), PreconditionError);
}

TEST_CASE("empirical loss concentrates around the population loss") {
  // Monte-Carlo concentration oracle: |emp - pop| <= 5 / sqrt(n).
  FiniteWorld w = disjoint(2, 2);
  Eigen::MatrixXd f = random_features(w, 3, 8);
  Kernel lin = linear_kernel();
  const int n = 10000;
  double pop = population_kcl(w, f, lin, 1.0).value;
  for (std::uint64_t seed : {101ULL, 102ULL, 103ULL}) {
    auto pairs = sample_positive_pairs(w, n, seed);
    double emp = empirical_kcl(pairs, f, lin, 1.0).value;
    CHECK(std::abs(emp - pop) <= 5.0 / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("InfoNCE on a constant encoder is log(M + 1)") {
  FiniteWorld w = disjoint(3, 1);
  Eigen::MatrixXd f = constant_features(w);
  for (int m : {1, 3, 7}) {
    InfoNceConfig cfg;
    cfg.tau = 0.2;
    cfg.negatives = m;
    NceValue v = info_nce(w, f, cfg, NceVariant::Standard);
    CHECK(v.exact);
    CHECK(v.value == doctest::Approx(std::log(m + 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("asymptotic variant on a constant encoder vanishes at lambda 1") {
  FiniteWorld w = disjoint(3, 1);
  InfoNceConfig cfg;
  cfg.tau = 0.37;
  cfg.lambda = 1.0;
  NceValue v = info_nce(w, constant_features(w), cfg,
                        NceVariant::DecoupledAsymptotic);
  CHECK(v.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("large temperature flattens the logits") {
  FiniteWorld w = disjoint(2, 2);
  Eigen::MatrixXd f = random_features(w, 3, 13);
  InfoNceConfig cfg;
  cfg.tau = 1000.0;
  cfg.negatives = 4;
  NceValue v = info_nce(w, f, cfg, NceVariant::Standard);
  CHECK(std::abs(v.value - std::log(5.0)) <= 1e-3);
}

TEST_CASE("estimator policy: product-space size decides exact vs Monte-Carlo") {
  FiniteWorld w = disjoint(3, 1);  // 3 points
  Eigen::MatrixXd f = random_features(w, 3, 2);
  InfoNceConfig cfg;
  cfg.negatives = 10;  // 3^10 = 59049 <= 1e5: exact
  CHECK(info_nce(w, f, cfg, NceVariant::Standard).exact);
  cfg.negatives = 11;  // 3^11 > 1e5: Monte-Carlo
  NceValue mc = info_nce(w, f, cfg, NceVariant::Standard);
  CHECK_FALSE(mc.exact);
  CHECK(mc.half_width > 0.0);
}

TEST_CASE("Monte-Carlo inner expectation is unbiased") {
  FiniteWorld w = disjoint(3, 1);
  Eigen::MatrixXd f = random_features(w, 3, 15);
  InfoNceConfig cfg;
  cfg.tau = 0.5;
  cfg.negatives = 2;
  NceValue exact = info_nce(w, f, cfg, NceVariant::Standard);
  REQUIRE(exact.exact);

  cfg.policy = EstimatorPolicy::MonteCarlo;
  cfg.mc_samples = 64;
  const int seeds = 200;
  std::vector<double> estimates;
  for (int s = 0; s < seeds; ++s) {
    cfg.seed = 1000 + static_cast<std::uint64_t>(s);
    estimates.push_back(info_nce(w, f, cfg, NceVariant::Standard).value);
  }
  double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / seeds;
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= (seeds - 1);
  double stderr_mean = std::sqrt(var / seeds);
  CHECK(std::abs(mean - exact.value) <= 3.0 * stderr_mean + 1e-12);
}

TEST_CASE("spectral contrastive loss hand values") {
  FiniteWorld w = disjoint(2, 2);
  CHECK(spectral_contrastive(w, constant_features(w)) ==
        doctest::Approx(-1.0).epsilon(1e-14));
  Eigen::MatrixXd antipodal = per_cluster_features(
      w, {Eigen::Vector2d(1, 0), Eigen::Vector2d(-1, 0)});
  CHECK(spectral_contrastive(w, antipodal) ==
        doctest::Approx(-1.0).epsilon(1e-14));
  Eigen::MatrixXd orthogonal = per_cluster_features(
      w, {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)});
  CHECK(spectral_contrastive(w, orthogonal) ==
        doctest::Approx(-1.5).epsilon(1e-14));
}

TEST_CASE("relation slacks on the constant encoder are the hand values") {
  FiniteWorld w = disjoint(3, 1);
  InfoNceConfig cfg;
  cfg.tau = 0.1;
  cfg.negatives = 8;  // 3^8 <= 1e5, all terms exact
  cfg.lambda = 1.0;
  auto reports = check_loss_relations(w, constant_features(w), cfg);
  REQUIRE(reports.size() == 5);

  // Eq: tau^-1 L_LinKCL(f;1) = 0 vs log(M+1) + log(1/M).
  CHECK(reports[0].name == "lin_kcl_vs_info_nce");
  CHECK(reports[0].slack == doctest::Approx(std::log(9.0 / 8.0)).epsilon(1e-12));

  // Quadratic vs spectral: lhs -1/2, rhs -1/4.
  CHECK(reports[4].name == "quad_kcl_vs_spectral");
  CHECK(reports[4].lhs == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(reports[4].rhs == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(reports[4].slack == doctest::Approx(0.25).epsilon(1e-13));

  for (const auto& r : reports) CHECK(r.pass);
}

TEST_CASE("relations hold for random encoders") {
  FiniteWorld w = disjoint(2, 2);
  for (int trial = 0; trial < 100; ++trial) {
    InfoNceConfig cfg;
    cfg.tau = 0.2;
    cfg.negatives = 4;
    cfg.lambda = trial % 3 == 0 ? 0.5 : (trial % 3 == 1 ? 1.0 : 2.0);
    cfg.seed = 500 + static_cast<std::uint64_t>(trial);
    auto reports = check_loss_relations(
        w, random_features(w, 3, 90 + static_cast<std::uint64_t>(trial)), cfg);
    for (const auto& r : reports) {
      CAPTURE(trial);
      CAPTURE(r.name);
      CHECK(r.pass);
    }
  }
}

TEST_CASE("population loss is invariant under point relabeling") {
  FiniteWorld w = random_world(7, 2, 0.3, 31);
  Eigen::MatrixXd f = random_features(w, 3, 32);
  Kernel g = gaussian_kernel(2.0);
  double base = population_kcl(w, f, g, 1.4).value;

  std::vector<int> perm(static_cast<size_t>(w.size()));
  std::iota(perm.begin(), perm.end(), 0);
  auto rng = make_rng(33);
  std::shuffle(perm.begin(), perm.end(), rng);

  FiniteWorld p = w;
  Eigen::MatrixXd pf(f.rows(), f.cols());
  for (int i = 0; i < w.size(); ++i) {
    int pi = perm[static_cast<size_t>(i)];
    p.points[static_cast<size_t>(pi)] = w.points[static_cast<size_t>(i)];
    p.points[static_cast<size_t>(pi)].id = pi;
    p.marginal(pi) = w.marginal(i);
    pf.row(pi) = f.row(i);
    for (int j = 0; j < w.size(); ++j)
      p.joint(pi, perm[static_cast<size_t>(j)]) = w.joint(i, j);
  }
  for (auto& cluster : p.clusters)
    for (int& x : cluster) x = perm[static_cast<size_t>(x)];
  std::vector<int> labels(p.labels.size());
  for (int i = 0; i < w.size(); ++i)
    labels[static_cast<size_t>(perm[static_cast<size_t>(i)])] =
        w.labels[static_cast<size_t>(i)];
  p.labels = labels;
  finalize_world(p);

  CHECK(population_kcl(p, pf, g, 1.4).value ==
        doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("linear negative term equals the squared feature mean") {
  // E_-[f^T f-] = || sum_x w(x) nu(x) f(x) ||^2.
  FiniteWorld w = random_world(9, 3, 0.4, 41);
  Eigen::MatrixXd f = random_features(w, 4, 42);
  LossValue v = population_kcl(w, f, linear_kernel(), 1.0);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
  for (int x = 0; x < w.size(); ++x)
    mean += w.point_mass(x) * f.row(x).transpose();
  CHECK(v.negative_term == doctest::Approx(mean.squaredNorm()).epsilon(1e-12));
}

}  // TEST_SUITE
