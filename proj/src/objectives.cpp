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

#include "kcl/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "kcl/errors.hpp"
#include "kcl/geometry.hpp"
#include "kcl/random.hpp"

namespace kcl {

namespace {

constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile
constexpr double kExactProductSpaceLimit = 1e5;

double clamped_dot(const Eigen::MatrixXd& features, int a, int b) {
  return std::clamp(features.row(a).dot(features.row(b)), -1.0, 1.0);
}

}  // namespace

LossValue population_kcl(const FiniteWorld& world,
                         const Eigen::MatrixXd& features, const Kernel& kernel,
                         double lambda) {
  const int n = world.size();
  Eigen::MatrixXd gram = kernel_gram(kernel, features);
  double pos = 0.0;
  double neg = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      pos += world.pair_mass(a, b) * gram(a, b);
      neg += world.point_mass(a) * world.point_mass(b) * gram(a, b);
    }
  }
  LossValue v;
  v.positive_term = pos;
  v.negative_term = neg;
  v.value = -pos + lambda * neg;
  return v;
}

LossValue empirical_kcl(const std::vector<std::pair<int, int>>& pairs,
                        const Eigen::MatrixXd& features, const Kernel& kernel,
                        double lambda) {
  const int n = static_cast<int>(pairs.size());
  if (n < 2)
    throw PreconditionError(
        "empirical loss needs n >= 2 (the cross term is empty otherwise)");
  double pos = 0.0;
  for (const auto& [a, b] : pairs)
    pos += psi_at(kernel, clamped_dot(features, a, b));
  pos /= n;

  double cross = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      cross += psi_at(kernel,
                      clamped_dot(features, pairs[static_cast<size_t>(i)].first,
                                  pairs[static_cast<size_t>(j)].second));
    }
  }
  cross /= static_cast<double>(n) * (n - 1);

  LossValue v;
  v.positive_term = pos;
  v.negative_term = cross;
  v.value = -pos + lambda * cross;
  return v;
}

namespace {

double log_sum_exp_terms(double anchor_logit, bool include_anchor,
                         const Eigen::VectorXd& logits,
                         const Eigen::VectorXd& counts) {
  double shift = include_anchor ? anchor_logit
                                : -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < logits.size(); ++j)
    if (counts(j) > 0.0) shift = std::max(shift, logits(j));
  double acc = include_anchor ? std::exp(anchor_logit - shift) : 0.0;
  for (Eigen::Index j = 0; j < logits.size(); ++j)
    if (counts(j) > 0.0) acc += counts(j) * std::exp(logits(j) - shift);
  return shift + std::log(acc);
}

// Exact expectation over M i.i.d. negatives of log(e^{anchor} + sum e^{s_i})
// (or without the anchor term), via the multinomial law of the negative
// counts. Only called when the M-fold product space is small.
double exact_negative_expectation(const Eigen::VectorXd& logits,
                                  const Eigen::VectorXd& probs, int M,
                                  double anchor_logit, bool include_anchor) {
  const int n = static_cast<int>(logits.size());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(n);
  double total = 0.0;

  // Depth-first over count vectors; `weight` carries the running multinomial
  // probability M! / prod(c_j!) * prod p_j^{c_j} built from binomials.
  std::function<void(int, int, double)> recurse = [&](int j, int remaining,
                                                      double weight) {
    if (j == n - 1) {
      counts(j) = remaining;
      double w = weight;
      for (int t = 0; t < remaining; ++t) w *= probs(j);
      if (w > 0.0)
        total += w * log_sum_exp_terms(anchor_logit, include_anchor, logits,
                                       counts);
      counts(j) = 0;
      return;
    }
    double choose = 1.0;  // C(remaining, c) * p_j^c, updated incrementally
    for (int c = 0; c <= remaining; ++c) {
      counts(j) = c;
      if (weight * choose > 0.0) recurse(j + 1, remaining - c, weight * choose);
      choose *= probs(j) * (remaining - c) / (c + 1);
    }
    counts(j) = 0;
  };
  recurse(0, M, 1.0);
  return total;
}

struct InnerEstimate {
  double mean = 0.0;
  double variance = 0.0;  // variance of the sample mean
};

InnerEstimate mc_negative_expectation(const Eigen::VectorXd& logits,
                                      const std::vector<double>& cum_marginal,
                                      int M, double anchor_logit,
                                      bool include_anchor, int samples,
                                      std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = static_cast<int>(logits.size());
  Eigen::VectorXd counts(n);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int t = 0; t < samples; ++t) {
    counts.setZero();
    for (int m = 0; m < M; ++m) {
      double u = unif(rng) * cum_marginal.back();
      int idx = static_cast<int>(
          std::lower_bound(cum_marginal.begin(), cum_marginal.end(), u) -
          cum_marginal.begin());
      if (idx >= n) idx = n - 1;
      counts(idx) += 1.0;
    }
    double v = log_sum_exp_terms(anchor_logit, include_anchor, logits, counts);
    sum += v;
    sum_sq += v * v;
  }
  InnerEstimate e;
  e.mean = sum / samples;
  double var = std::max(0.0, sum_sq / samples - e.mean * e.mean);
  e.variance = samples > 1 ? var / (samples - 1) : var;
  return e;
}

}  // namespace

NceValue info_nce(const FiniteWorld& world, const Eigen::MatrixXd& features,
                  const InfoNceConfig& cfg, NceVariant variant) {
  if (!(cfg.tau > 0.0)) throw PreconditionError("temperature must be positive");
  if (cfg.negatives < 1) throw PreconditionError("need at least one negative");
  const int n = world.size();
  Eigen::MatrixXd logits = (features * features.transpose()) / cfg.tau;

  // Alignment term -E_+[f^T f+ / tau], common to every variant; exact.
  double align = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) align += world.pair_mass(a, b) * logits(a, b);

  NceValue out;

  if (variant == NceVariant::Asymptotic ||
      variant == NceVariant::DecoupledAsymptotic) {
    // E_x[ log E_{x'}[ e^{s(x,x')} ] ]: a single exact sum.
    double uniformity = 0.0;
    for (int a = 0; a < n; ++a) {
      double shift = logits.row(a).maxCoeff();
      double acc = 0.0;
      for (int b = 0; b < n; ++b)
        acc += world.point_mass(b) * std::exp(logits(a, b) - shift);
      uniformity += world.point_mass(a) * (shift + std::log(acc));
    }
    double weight =
        variant == NceVariant::DecoupledAsymptotic ? cfg.lambda : 1.0;
    out.value = -align + weight * uniformity;
    out.exact = true;
    return out;
  }

  const bool include_anchor = variant != NceVariant::DecoupledNegOnly;
  double product_space = std::pow(static_cast<double>(n), cfg.negatives);
  bool exact = product_space <= kExactProductSpaceLimit;
  if (cfg.policy == EstimatorPolicy::Exact) exact = true;
  if (cfg.policy == EstimatorPolicy::MonteCarlo) exact = false;

  Eigen::VectorXd probs = world.point_mass;
  std::vector<double> cum;
  cum.reserve(static_cast<size_t>(n));
  double acc = 0.0;
  for (int b = 0; b < n; ++b) {
    acc += probs(b);
    cum.push_back(acc);
  }

  auto rng = make_rng(cfg.seed);
  double log_term = 0.0;
  double variance = 0.0;

  if (include_anchor) {
    // Outer expectation over the (x, x+) joint.
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        double w = world.pair_mass(a, b);
        if (w == 0.0) continue;
        if (exact) {
          log_term += w * exact_negative_expectation(
                              logits.row(a).transpose(), probs,
                              cfg.negatives, logits(a, b), true);
        } else {
          InnerEstimate e =
              mc_negative_expectation(logits.row(a).transpose(), cum,
                                      cfg.negatives, logits(a, b), true,
                                      cfg.mc_samples, rng);
          log_term += w * e.mean;
          variance += w * w * e.variance;
        }
      }
    }
  } else {
    // Outer expectation over the marginal only.
    for (int a = 0; a < n; ++a) {
      double w = world.point_mass(a);
      if (exact) {
        log_term += w * exact_negative_expectation(logits.row(a).transpose(),
                                                   probs, cfg.negatives, 0.0,
                                                   false);
      } else {
        InnerEstimate e =
            mc_negative_expectation(logits.row(a).transpose(), cum,
                                    cfg.negatives, 0.0, false, cfg.mc_samples,
                                    rng);
        log_term += w * e.mean;
        variance += w * w * e.variance;
      }
    }
  }

  double weight = variant == NceVariant::Standard ? 1.0 : cfg.lambda;
  out.value = -align + weight * log_term;
  out.exact = exact;
  if (!exact) {
    out.mc_samples = cfg.mc_samples;
    out.mc_seed = cfg.seed;
    out.half_width = weight * kZ99 * std::sqrt(variance);
  }
  return out;
}

double spectral_contrastive(const FiniteWorld& world,
                            const Eigen::MatrixXd& features) {
  const int n = world.size();
  double pos = 0.0;
  double neg = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      double dot = features.row(a).dot(features.row(b));
      pos += world.pair_mass(a, b) * dot;
      neg += world.point_mass(a) * world.point_mass(b) * dot * dot;
    }
  }
  return -2.0 * pos + neg;
}

std::vector<BoundReport> check_loss_relations(const FiniteWorld& world,
                                              const Eigen::MatrixXd& features,
                                              const InfoNceConfig& cfg) {
  std::vector<BoundReport> reports;
  Kernel lin = linear_kernel();
  Kernel quad = quadratic_kernel();
  const double log_inv_m = std::log(1.0 / cfg.negatives);

  auto estimator_note = [](const NceValue& v) {
    if (v.exact) return std::string("exact");
    return "monte-carlo(n=" + std::to_string(v.mc_samples) +
           ",seed=" + std::to_string(v.mc_seed) + ")";
  };

  // tau^-1 L_LinKCL(f; 1) <= L_NCE(f; tau) + log(1/M).
  {
    InfoNceConfig c = cfg;
    c.lambda = 1.0;
    NceValue nce = info_nce(world, features, c, NceVariant::Standard);
    LossValue lin_loss = population_kcl(world, features, lin, 1.0);
    BoundReport r;
    r.name = "lin_kcl_vs_info_nce";
    r.lhs = lin_loss.value / cfg.tau;
    r.rhs = nce.value + log_inv_m;
    r.estimator_noise = nce.half_width;
    r.components = {{"lin_kcl", lin_loss.value},
                    {"nce", nce.value},
                    {"log_inv_m", log_inv_m},
                    {"tau", cfg.tau},
                    {"negatives", static_cast<double>(cfg.negatives)}};
    r.notes["estimator"] = estimator_note(nce);
    r.finalize();
    reports.push_back(std::move(r));
  }

  LossValue lin_loss = population_kcl(world, features, lin, cfg.lambda);

  // tau^-1 L_LinKCL(f; lambda) <= decoupled InfoNCE + lambda log(1/M).
  {
    NceValue nce = info_nce(world, features, cfg, NceVariant::Decoupled);
    BoundReport r;
    r.name = "lin_kcl_vs_decoupled_nce";
    r.lhs = lin_loss.value / cfg.tau;
    r.rhs = nce.value + cfg.lambda * log_inv_m;
    r.estimator_noise = nce.half_width;
    r.components = {{"lin_kcl", lin_loss.value},
                    {"decoupled_nce", nce.value},
                    {"lambda", cfg.lambda}};
    r.notes["estimator"] = estimator_note(nce);
    r.finalize();
    reports.push_back(std::move(r));
  }

  // tau^-1 L_LinKCL(f; lambda) <= decoupled asymptotic loss.
  {
    NceValue nce =
        info_nce(world, features, cfg, NceVariant::DecoupledAsymptotic);
    BoundReport r;
    r.name = "lin_kcl_vs_decoupled_asymptotic_nce";
    r.lhs = lin_loss.value / cfg.tau;
    r.rhs = nce.value;
    r.components = {{"lin_kcl", lin_loss.value},
                    {"decoupled_asymptotic_nce", nce.value}};
    r.notes["estimator"] = "exact";
    r.finalize();
    reports.push_back(std::move(r));
  }

  // tau^-1 L_LinKCL(f; lambda) <= negatives-only decoupled variant
  // + lambda log(1/M).
  {
    NceValue nce = info_nce(world, features, cfg, NceVariant::DecoupledNegOnly);
    BoundReport r;
    r.name = "lin_kcl_vs_dcl_nce";
    r.lhs = lin_loss.value / cfg.tau;
    r.rhs = nce.value + cfg.lambda * log_inv_m;
    r.estimator_noise = nce.half_width;
    r.components = {{"lin_kcl", lin_loss.value},
                    {"dcl_nce", nce.value},
                    {"lambda", cfg.lambda}};
    r.notes["estimator"] = estimator_note(nce);
    r.finalize();
    reports.push_back(std::move(r));
  }

  // L_QKCL(f; 1/2) <= L_SCL(f)/2 + 1/4.
  {
    LossValue quad_loss = population_kcl(world, features, quad, 0.5);
    double scl = spectral_contrastive(world, features);
    BoundReport r;
    r.name = "quad_kcl_vs_spectral";
    r.lhs = quad_loss.value;
    r.rhs = 0.5 * scl + 0.25;
    r.components = {{"quad_kcl", quad_loss.value}, {"scl", scl}};
    r.notes["estimator"] = "exact";
    r.finalize();
    reports.push_back(std::move(r));
  }

  return reports;
}

}  // namespace kcl
