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

#include <doctest.h>

#include "kcl/encoders.hpp"
#include "kcl/errors.hpp"
#include "kcl/geometry.hpp"
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

TableEncoder per_cluster_encoder(const FiniteWorld& world,
                                 const std::vector<Eigen::VectorXd>& dirs) {
  Eigen::MatrixXd v(world.size(), dirs.front().size());
  for (int x = 0; x < world.size(); ++x)
    v.row(x) = dirs[static_cast<size_t>(world.labels[static_cast<size_t>(x)])]
                   .transpose();
  return TableEncoder(v);
}

}  // namespace

TEST_SUITE("encoders") {

TEST_CASE("table encoder normalizes (3,4) to (0.6, 0.8)") {
  FiniteWorld w = disjoint(2, 1);
  Eigen::MatrixXd v(2, 2);
  v << 3.0, 4.0, 1.0, 0.0;
  TableEncoder enc(v);
  Eigen::VectorXd f = enc.encode(w, 0);
  CHECK(f(0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(f(1) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("zero parameter vector raises DegenerateEncoderError") {
  FiniteWorld w = disjoint(2, 1);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(2, 2);
  v(1, 0) = 1.0;
  TableEncoder enc(v);
  CHECK_THROWS_AS(enc.encode(w, 0), DegenerateEncoderError);
  CHECK_THROWS_AS(encode_all(enc, w), DegenerateEncoderError);
}

TEST_CASE("MLP forward matches a hand-propagated pass") {
  // 2-2-2 network with identity-like weights: raw = tanh(coords) + bias 0,
  // then an identity output layer, then normalization.
  FiniteWorld w = disjoint(2, 1);
  w.points[0].coords = Eigen::Vector2d(0.3, -0.2);
  std::vector<Eigen::MatrixXd> weights = {Eigen::MatrixXd::Identity(2, 2),
                                          Eigen::MatrixXd::Identity(2, 2)};
  std::vector<Eigen::VectorXd> biases = {Eigen::VectorXd::Zero(2),
                                         Eigen::VectorXd::Zero(2)};
  MlpEncoder enc(std::move(weights), std::move(biases));

  double h0 = std::tanh(0.3);
  double h1 = std::tanh(-0.2);
  double norm = std::sqrt(h0 * h0 + h1 * h1);
  Eigen::VectorXd f = enc.encode(w, 0);
  CHECK(f(0) == doctest::Approx(h0 / norm).epsilon(1e-14));
  CHECK(f(1) == doctest::Approx(h1 / norm).epsilon(1e-14));
}

TEST_CASE("encode is deterministic") {
  FiniteWorld w = disjoint(3, 2);
  TableEncoder enc = TableEncoder::random(w.size(), 4, 9);
  Eigen::MatrixXd a = encode_all(enc, w);
  Eigen::MatrixXd b = encode_all(enc, w);
  CHECK(a == b);
}

TEST_CASE("constant encoder is not meaningful; antipodal is, with gap 4") {
  FiniteWorld w = disjoint(2, 2);
  ClusterStructure s = structure_from_world(w, 1.0, 1.0);
  Kernel lin = linear_kernel();

  TableEncoder constant = per_cluster_encoder(
      w, {Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 0)});
  Meaningfulness mc = is_meaningful(constant, w, s, lin);
  CHECK_FALSE(mc.meaningful);
  CHECK(mc.delta_min == doctest::Approx(0.0).epsilon(1e-12));

  TableEncoder antipodal = per_cluster_encoder(
      w, {Eigen::Vector2d(1, 0), Eigen::Vector2d(-1, 0)});
  Meaningfulness ma = is_meaningful(antipodal, w, s, lin);
  CHECK(ma.meaningful);
  // ||h(e1) - h(-e1)||^2 = 2 - 2(-1) = 4.
  CHECK(ma.delta_min == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("meaningfulness needs at least two clusters") {
  FiniteWorld w = disjoint(1, 3);
  ClusterStructure s = structure_from_world(w, 1.0, 0.0);
  TableEncoder enc = TableEncoder::random(w.size(), 3, 1);
  CHECK_THROWS_AS(is_meaningful(enc, w, s, linear_kernel()),
                  PreconditionError);
}

TEST_CASE("delta_min matches a brute-force double sum") {
  // Oracle: ||mu_i - mu_j||^2 expanded with Lemma-style conditional double
  // sums over raw kernel evaluations, independent of cluster_geometry.
  FiniteWorld w = disjoint(3, 2);
  ClusterStructure s = structure_from_world(w, 1.0, 2.0);
  for (const Kernel& k : {linear_kernel(), gaussian_kernel(1.0)}) {
    TableEncoder enc = TableEncoder::random(w.size(), 3, 77);
    Eigen::MatrixXd f = encode_all(enc, w);

    auto pair_sum = [&](const std::vector<int>& mi, const std::vector<int>& mj,
                        double mass_i, double mass_j) {
      double acc = 0.0;
      for (int a : mi)
        for (int b : mj)
          acc += evaluate(k, f.row(a).transpose(), f.row(b).transpose()) *
                 w.point_mass(a) * w.point_mass(b);
      return acc / (mass_i * mass_j);
    };
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        double v = pair_sum(w.clusters[i], w.clusters[i], w.cluster_mass[i],
                            w.cluster_mass[i]) +
                   pair_sum(w.clusters[j], w.clusters[j], w.cluster_mass[j],
                            w.cluster_mass[j]) -
                   2.0 * pair_sum(w.clusters[i], w.clusters[j],
                                  w.cluster_mass[i], w.cluster_mass[j]);
        best = std::min(best, v);
      }
    }
    Meaningfulness m = is_meaningful(enc, w, s, k);
    CHECK(m.delta_min == doctest::Approx(best).epsilon(1e-10));
  }
}

TEST_CASE("MLP gradient of a linear functional matches finite differences") {
  FiniteWorld w = disjoint(2, 2);
  MlpEncoder enc = MlpEncoder::random({2, 4, 3}, 5);
  auto rng = make_rng(6);
  Eigen::VectorXd head = unit_vector(3, rng);
  const int point = 1;

  Eigen::VectorXd analytic = Eigen::VectorXd::Zero(enc.param_count());
  enc.accumulate_param_grad(w, point, head, analytic);

  Eigen::VectorXd params = enc.params();
  const double h = 1e-5;
  Eigen::VectorXd fd(enc.param_count());
  MlpEncoder probe = enc;
  for (int i = 0; i < enc.param_count(); ++i) {
    Eigen::VectorXd p = params;
    p(i) += h;
    probe.set_params(p);
    double up = head.dot(probe.encode(w, point));
    p(i) -= 2.0 * h;
    probe.set_params(p);
    double down = head.dot(probe.encode(w, point));
    fd(i) = (up - down) / (2.0 * h);
  }
  CHECK((analytic - fd).norm() / std::max(1e-12, analytic.norm()) <= 1e-5);
}

TEST_CASE("checkpoints round trip through JSON") {
  FiniteWorld w = disjoint(2, 2);
  TableEncoder table = TableEncoder::random(w.size(), 3, 21);
  auto table2 = encoder_from_json(table.to_json());
  CHECK(encode_all(table, w) == encode_all(*table2, w));

  MlpEncoder mlp = MlpEncoder::random({2, 4, 3}, 22);
  auto mlp2 = encoder_from_json(mlp.to_json());
  CHECK(encode_all(mlp, w) == encode_all(*mlp2, w));

  CHECK_THROWS_AS(encoder_from_json({{"kind", "resnet"}}), SchemaError);
}

}  // TEST_SUITE
