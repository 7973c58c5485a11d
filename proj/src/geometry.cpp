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

#include "kcl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "kcl/errors.hpp"

namespace kcl {

namespace {

// Relative tolerance for detecting classifier ties; last-bit noise between
// algebraically equal scores must not break the deterministic tie rule.
constexpr double kTieTol = 1e-12;

void check_features(const FiniteWorld& world, const Eigen::MatrixXd& features) {
  if (features.rows() != world.size())
    throw PreconditionError("feature row count does not match world size");
}

}  // namespace

Eigen::MatrixXd kernel_gram(const Kernel& kernel,
                            const Eigen::MatrixXd& features) {
  Eigen::MatrixXd dots = features * features.transpose();
  return psi_matrix(kernel, dots);
}

ClusterGeometry cluster_geometry(const FiniteWorld& world,
                                 const Eigen::MatrixXd& features,
                                 const Kernel& kernel,
                                 const ClusterStructure& structure) {
  check_features(world, features);
  const int k = structure.cluster_count();
  if (k == 0) throw PreconditionError("cluster_geometry: structure has no clusters");

  Eigen::MatrixXd gram = kernel_gram(kernel, features);

  ClusterGeometry geo;
  geo.masses.resize(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i)
    geo.masses[static_cast<size_t>(i)] = structure_mass(world, structure, i);

  geo.mu_gram.resize(k, k);
  for (int i = 0; i < k; ++i) {
    const auto& mi = structure_cluster(world, structure, i);
    for (int j = i; j < k; ++j) {
      const auto& mj = structure_cluster(world, structure, j);
      double acc = 0.0;
      for (int a : mi) {
        double inner = 0.0;
        for (int b : mj) inner += gram(a, b) * world.point_mass(b);
        acc += world.point_mass(a) * inner;
      }
      double value = acc / (geo.masses[static_cast<size_t>(i)] *
                            geo.masses[static_cast<size_t>(j)]);
      geo.mu_gram(i, j) = value;
      geo.mu_gram(j, i) = value;
    }
  }

  // a(f): restricted, un-normalized negative-pair expectation per cluster.
  // ||h - h'||^2 expands to 2 psi(1) - 2 k, so the cluster sum collapses to
  // masses and the diagonal of mu_gram.
  geo.a_value = 0.0;
  for (int i = 0; i < k; ++i) {
    double mass = geo.masses[static_cast<size_t>(i)];
    geo.a_value += 2.0 * mass * mass * (kernel.psi_one - geo.mu_gram(i, i));
  }

  geo.c_value = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j)
        geo.c_value += geo.masses[static_cast<size_t>(i)] *
                       geo.masses[static_cast<size_t>(j)] * geo.mu_gram(i, j);

  geo.delta_min = 0.0;
  if (k >= 2) {
    geo.delta_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        geo.delta_min = std::min(
            geo.delta_min,
            geo.mu_gram(i, i) + geo.mu_gram(j, j) - 2.0 * geo.mu_gram(i, j));
  }
  return geo;
}

namespace {

// Squared RKHS distance from h(f(x)) to each cluster mean, as an N x K score
// matrix: psi(1) + ||mu_i||^2 - 2 E[ k(f(x), f(x')) | M_i ].
Eigen::MatrixXd nearest_mean_scores(const FiniteWorld& world,
                                    const Eigen::MatrixXd& features,
                                    const Kernel& kernel,
                                    const ClusterStructure& structure,
                                    const ClusterGeometry& geo) {
  const int n = world.size();
  const int k = structure.cluster_count();
  Eigen::MatrixXd gram = kernel_gram(kernel, features);
  Eigen::MatrixXd scores(n, k);
  for (int i = 0; i < k; ++i) {
    const auto& mi = structure_cluster(world, structure, i);
    double mass = geo.masses[static_cast<size_t>(i)];
    for (int x = 0; x < n; ++x) {
      double cross = 0.0;
      for (int b : mi) cross += gram(x, b) * world.point_mass(b);
      scores(x, i) = kernel.psi_one + geo.mu_gram(i, i) - 2.0 * cross / mass;
    }
  }
  return scores;
}

int classify_point(const Eigen::MatrixXd& scores, int x, int truth) {
  const int k = static_cast<int>(scores.cols());
  double best = scores.row(x).minCoeff();
  double tol = kTieTol * std::max(1.0, std::abs(best));
  if (truth >= 0 && truth < k && scores(x, truth) <= best + tol) return truth;
  for (int i = 0; i < k; ++i)
    if (scores(x, i) <= best + tol) return i;
  return 0;  // unreachable
}

}  // namespace

double mean_classifier_error(const FiniteWorld& world,
                             const Eigen::MatrixXd& features,
                             const Kernel& kernel,
                             const ClusterStructure& structure) {
  check_features(world, features);
  const int k = structure.cluster_count();
  if (k < 2)
    throw PreconditionError("mean classifier needs at least two clusters");
  if (static_cast<int>(structure.labeling.size()) != world.size())
    throw PreconditionError("mean classifier needs a full labeling");

  ClusterGeometry geo = cluster_geometry(world, features, kernel, structure);
  Eigen::MatrixXd scores =
      nearest_mean_scores(world, features, kernel, structure, geo);

  double err = 0.0;
  for (int x = 0; x < world.size(); ++x) {
    int truth = structure.labeling[static_cast<size_t>(x)];
    if (classify_point(scores, x, truth) != truth) err += world.point_mass(x);
  }
  return err;
}

double custom_partition_error(const FiniteWorld& world,
                              const Eigen::MatrixXd& features,
                              const Kernel& kernel,
                              const ClusterStructure& structure,
                              const std::vector<std::vector<int>>& partition) {
  check_features(world, features);
  const int n = world.size();
  const int k = structure.cluster_count();
  if (static_cast<int>(partition.size()) != k)
    throw PreconditionError("partition must have one cell per cluster");

  std::vector<int> assigned(static_cast<size_t>(n), -1);
  for (int i = 0; i < k; ++i) {
    const auto& mi = structure_cluster(world, structure, i);
    std::set<int> mi_set(mi.begin(), mi.end());
    for (int x : partition[static_cast<size_t>(i)]) {
      if (x < 0 || x >= n)
        throw PreconditionError("partition references a point outside the world");
      if (!mi_set.count(x))
        throw PreconditionError("partition cell " + std::to_string(i) +
                                " is not nested in its cluster");
      if (assigned[static_cast<size_t>(x)] != -1)
        throw PreconditionError("partition cells are not disjoint at point " +
                                std::to_string(x));
      assigned[static_cast<size_t>(x)] = i;
    }
  }
  for (int x = 0; x < n; ++x)
    if (assigned[static_cast<size_t>(x)] == -1)
      throw PreconditionError("partition does not cover point " +
                              std::to_string(x));

  ClusterGeometry geo = cluster_geometry(world, features, kernel, structure);
  Eigen::MatrixXd scores =
      nearest_mean_scores(world, features, kernel, structure, geo);

  double err = 0.0;
  for (int x = 0; x < n; ++x) {
    int truth = assigned[static_cast<size_t>(x)];
    if (classify_point(scores, x, truth) != truth) err += world.point_mass(x);
  }
  return err;
}

QReport inner_cluster_connectivity(const FiniteWorld& world,
                                   const Eigen::MatrixXd& features,
                                   const ClusterStructure& structure,
                                   const Eigen::VectorXd& head, int cluster) {
  check_features(world, features);
  const int k = structure.cluster_count();
  if (cluster < 0 || cluster >= k)
    throw PreconditionError("cluster index out of range");
  if (head.size() != features.cols())
    throw PreconditionError("head dimension does not match encoder output");

  Eigen::VectorXd g = features * head;
  const auto& m = structure_cluster(world, structure, cluster);

  double pos_mass = positive_mass(world, m, m);
  double mass = structure_mass(world, structure, cluster);

  double num = 0.0;
  double den = 0.0;
  for (int a : m) {
    for (int b : m) {
      double diff = g(a) - g(b);
      double sq = diff * diff;
      num += sq * world.pair_mass(a, b);
      den += sq * world.point_mass(a) * world.point_mass(b);
    }
  }
  num /= pos_mass;
  den /= mass * mass;

  QReport rep;
  rep.numerator = num;
  rep.denominator = den;
  if (!(den > 0.0))
    throw DenominatorZeroError(
        "Q_M(g): g is constant on cluster " + std::to_string(cluster) +
        " so the negative-pair conditional variance is zero");
  rep.q = num / den;

  rep.c_exact = std::numeric_limits<double>::infinity();
  bool all_above_half = true;
  double fallback = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    const auto& mi = structure_cluster(world, structure, i);
    double pi = structure_mass(world, structure, i);
    double pp = positive_mass(world, mi, mi);
    rep.c_exact = std::min(rep.c_exact, pi * pi / pp);
    if (pi > 0.5)
      fallback = std::min(fallback, pi * (2.0 * pi - 1.0));
    else
      all_above_half = false;
  }
  rep.c_fallback =
      all_above_half ? fallback : std::numeric_limits<double>::quiet_NaN();
  rep.bound = rep.c_exact * (structure.delta + structure.lambda);
  return rep;
}

}  // namespace kcl
