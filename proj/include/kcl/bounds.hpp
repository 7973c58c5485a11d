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

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "kcl/encoders.hpp"
#include "kcl/geometry.hpp"
#include "kcl/kernels.hpp"
#include "kcl/report.hpp"
#include "kcl/similarity.hpp"
#include "kcl/worlds.hpp"

namespace kcl {

/// Decomposition inequality: (delta/2) a(f) + lambda c(f) <= L_KCL + R(lambda).
/// Refuses (HypothesisError) when the structure fails coverage or the
/// similarity threshold.
BoundReport check_decomposition(const FiniteWorld& world,
                                const Eigen::MatrixXd& features,
                                const Kernel& kernel,
                                const ClusterStructure& structure);

/// Equality case: under disjoint clusters, zero cross-cluster joint mass and
/// cluster-constant sim, the decomposition holds with equality for every
/// encoder. Refuses (HypothesisError) listing which hypothesis fails.
BoundReport check_equality_case(const FiniteWorld& world,
                                const Eigen::MatrixXd& features,
                                const Kernel& kernel,
                                const ClusterStructure& structure);

/// Classification error bound for meaningful encoders:
/// err <= 8 (K-1) a(f) / (Delta_min(f) min_i P(M_i)).
BoundReport check_classification_bound(const FiniteWorld& world,
                                       const Eigen::MatrixXd& features,
                                       const Kernel& kernel,
                                       const ClusterStructure& structure);

/// Generalized variant: same right-hand side, error measured against a
/// disjoint covering partition nested in the clusters.
BoundReport check_classification_bound_partition(
    const FiniteWorld& world, const Eigen::MatrixXd& features,
    const Kernel& kernel, const ClusterStructure& structure,
    const std::vector<std::vector<int>>& partition);

struct GenBoundConfig {
  int n = 64;              // sample count, must be even
  double epsilon = 0.1;    // confidence parameter in (0, 1/2)
  double lambda = 1.0;
  int rademacher_draws = 200;
  int permutation_samples = 16;  // random permutations beyond the identity
  int proxy_class_size = 1000;
  int encoder_dim = 4;
  std::uint64_t seed = 0;
};

struct RademacherEstimate {
  double r_plus = 0.0;
  double r_plus_stderr = 0.0;
  double r_minus_sampled = 0.0;  // max over sampled permutations: a lower
                                 // bound of the max over the full group
  double r_minus_finite_class = 0.0;  // Massart bound for the proxy class:
                                      // a valid upper bound for every s
  int draws = 0;
  int permutations = 0;
};

/// Monte-Carlo Rademacher complexities of the proxy encoder class
/// Q = { f(.)^T f(.) }. `proxy_features` holds encoded N x d matrices.
RademacherEstimate estimate_rademacher(
    const FiniteWorld& world, const std::vector<Eigen::MatrixXd>& proxy_features,
    const GenBoundConfig& cfg);

/// 2 rho (R+ + lambda R-) + sqrt(2 b^2 log(2/eps)/n)
///                        + lambda sqrt(10 b^2 log(2/eps)/n).
double gen_bound_value(const Kernel& kernel, const GenBoundConfig& cfg,
                       double r_plus, double r_minus);

/// Monte-Carlo experiment for the one-sided generalization bound: fraction of
/// trials where sup over the proxy class of |L_hat - L| exceeds the bound,
/// gated against epsilon plus a 99% binomial slack.
BoundReport check_generalization(const FiniteWorld& world, const Kernel& kernel,
                                 const GenBoundConfig& cfg, int trials,
                                 std::uint64_t seed);

/// Surrogate chain: mean-classifier error of the trained encoder against
/// coef * (L_KCL(f_ref) + (1 - delta/2) a(f^) - lambda c(f^) + R + 2 Gen).
/// A negative `gen_override` estimates Gen from a proxy class; zero gives the
/// population-only chain.
BoundReport check_surrogate(const FiniteWorld& world, const Kernel& kernel,
                            const ClusterStructure& structure,
                            const GenBoundConfig& cfg,
                            const Eigen::MatrixXd& features_ref,
                            const Eigen::MatrixXd& features_trained,
                            double gen_override = -1.0);

/// Two normalized-cut identities: (1) the sim-weighted double sum equals
/// -L_KCL for any encoder; (2) the combinatorial cut value of a partition
/// equals -Tr(U^t A U) + (1 - lambda) K computed from the operator matrices.
std::pair<BoundReport, BoundReport> check_normalized_cut(
    const FiniteWorld& world, const Eigen::MatrixXd& features,
    const Kernel& kernel, double lambda,
    const std::vector<std::vector<int>>& partition);

/// Random table-encoder proxy class, already encoded.
std::vector<Eigen::MatrixXd> random_table_feature_set(const FiniteWorld& world,
                                                      int count, int d,
                                                      std::uint64_t seed);

}  // namespace kcl
