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

#include "kcl/kernels.hpp"
#include "kcl/report.hpp"
#include "kcl/worlds.hpp"

namespace kcl {

enum class EstimatorPolicy { Auto, Exact, MonteCarlo };

struct LossValue {
  double value = 0.0;
  double positive_term = 0.0;  // E_+[k] (resp. empirical mean)
  double negative_term = 0.0;  // E_-[k] (resp. empirical U-statistic)
  bool exact = true;
  int mc_samples = 0;
  std::uint64_t mc_seed = 0;
  double mc_half_width = 0.0;  // 99%-level normal approximation
};

/// L_KCL(f; lambda) = -E_+[k(f,f)] + lambda E_-[k(f,f)], by exact double sums.
LossValue population_kcl(const FiniteWorld& world,
                         const Eigen::MatrixXd& features, const Kernel& kernel,
                         double lambda);

/// Empirical loss over sampled positive pairs: -(1/n) sum_i k(f(X_i), f(X_i'))
/// + (lambda / (n(n-1))) sum_{i != j} k(f(X_i), f(X_j')). Needs n >= 2.
LossValue empirical_kcl(const std::vector<std::pair<int, int>>& pairs,
                        const Eigen::MatrixXd& features, const Kernel& kernel,
                        double lambda);

struct InfoNceConfig {
  double tau = 0.1;   // temperature, > 0
  int negatives = 8;  // M, >= 1
  double lambda = 1.0;
  EstimatorPolicy policy = EstimatorPolicy::Auto;
  int mc_samples = 128;
  std::uint64_t seed = 0;
};

enum class NceVariant {
  Standard,             // L_NCE(f; tau)
  Asymptotic,           // L_inf-NCE(f; tau), always exact
  Decoupled,            // weighted log-term including the positive logit
  DecoupledAsymptotic,  // weighted asymptotic log-term, always exact
  DecoupledNegOnly,     // weighted log over negatives only
};

struct NceValue {
  double value = 0.0;
  bool exact = true;
  int mc_samples = 0;
  std::uint64_t mc_seed = 0;
  double half_width = 0.0;
};

/// InfoNCE losses on the finite world. The outer (x, x+) expectation is
/// always an exact sum; the inner expectation over the M i.i.d. negatives is
/// summed exactly only when |X|^M <= 1e5, otherwise Monte-Carlo with a
/// recorded seed and a 99% half-width.
NceValue info_nce(const FiniteWorld& world, const Eigen::MatrixXd& features,
                  const InfoNceConfig& cfg, NceVariant variant);

/// L_SCL(f) = -2 E_+[f^T f+] + E_-[(f^T f-)^2].
double spectral_contrastive(const FiniteWorld& world,
                            const Eigen::MatrixXd& features);

/// Evaluates the between-loss inequalities (the linear-KCL vs InfoNCE-family
/// relations and the quadratic-KCL vs spectral bound). Noise-adjusted: each
/// report's gate subtracts the recorded Monte-Carlo half-width.
std::vector<BoundReport> check_loss_relations(const FiniteWorld& world,
                                              const Eigen::MatrixXd& features,
                                              const InfoNceConfig& cfg);

}  // namespace kcl
