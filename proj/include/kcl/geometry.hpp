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

#include <vector>

#include <Eigen/Core>

#include "kcl/kernels.hpp"
#include "kcl/similarity.hpp"
#include "kcl/worlds.hpp"

namespace kcl {

/// RKHS geometry of the cluster mean embeddings mu_i(f). Everything is
/// computed through the kernel trick (no explicit feature maps), so it works
/// unchanged for kernels with infinite-dimensional RKHS.
struct ClusterGeometry {
  Eigen::MatrixXd mu_gram;  // <mu_i(f), mu_j(f)>_H via conditional double sums
  double a_value = 0.0;     // sum_i E_-[ ||h(f(x)) - h(f(x'))||^2 ; M_i x M_i ]
  double c_value = 0.0;     // sum_{i != j} P(M_i) P(M_j) <mu_i, mu_j>
  double delta_min = 0.0;   // min_{i != j} ||mu_i - mu_j||^2 (0 when K = 1)
  std::vector<double> masses;
};

/// `features` holds one encoded unit vector per world point (rows).
ClusterGeometry cluster_geometry(const FiniteWorld& world,
                                 const Eigen::MatrixXd& features,
                                 const Kernel& kernel,
                                 const ClusterStructure& structure);

/// P_X-mass misclassified by the nearest-cluster-mean classifier
/// argmin_i ||h(f(x)) - mu_i(f)||_H against the structure labeling. Ties are
/// broken toward y(x) when it attains the minimum, else toward the lowest
/// index.
double mean_classifier_error(const FiniteWorld& world,
                             const Eigen::MatrixXd& features,
                             const Kernel& kernel,
                             const ClusterStructure& structure);

/// Same classifier, scored against the labeling y~(x) = i on a disjoint
/// covering partition with tilde_M_i subset of M_i. The cluster means still
/// come from the full M_i.
double custom_partition_error(const FiniteWorld& world,
                              const Eigen::MatrixXd& features,
                              const Kernel& kernel,
                              const ClusterStructure& structure,
                              const std::vector<std::vector<int>>& partition);

/// Inner-cluster connectivity ratio Q_M(g) for g(x) = head^T f(x), plus the
/// certified lower bound c (delta + lambda) with the tightest c satisfying
/// c P_+(M_i^2) <= P(M_i)^2 for all clusters, and the P > 1/2 fallback
/// c = min_i P(M_i)(2 P(M_i) - 1) when applicable (NaN otherwise).
struct QReport {
  double q = 0.0;
  double numerator = 0.0;    // E_+[(g - g')^2 | M x M]
  double denominator = 0.0;  // E_-[(g - g')^2 | M x M]
  double c_exact = 0.0;
  double c_fallback = 0.0;
  double bound = 0.0;        // c_exact * (delta + lambda)
};

QReport inner_cluster_connectivity(const FiniteWorld& world,
                                   const Eigen::MatrixXd& features,
                                   const ClusterStructure& structure,
                                   const Eigen::VectorXd& head, int cluster);

/// Gram matrix of kernel values psi(f(x)^T f(x')) over world points.
Eigen::MatrixXd kernel_gram(const Kernel& kernel,
                            const Eigen::MatrixXd& features);

}  // namespace kcl
