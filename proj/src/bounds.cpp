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

#include "kcl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "kcl/errors.hpp"
#include "kcl/objectives.hpp"
#include "kcl/random.hpp"

namespace kcl {

namespace {

void require_assumption(const FiniteWorld& world,
                        const ClusterStructure& structure, bool need_labels) {
  AssumptionReport rep = verify_assumption(world, structure);
  std::vector<std::string> failed;
  if (!rep.coverage.pass) failed.push_back("(A) " + rep.coverage.detail);
  if (!rep.similarity.pass) failed.push_back("(B) " + rep.similarity.detail);
  if (need_labels && !rep.labeling.pass)
    failed.push_back("(C) " + rep.labeling.detail);
  if (!failed.empty()) {
    std::string msg = "cluster structure violates the mixture assumption:";
    for (const auto& f : failed) msg += " " + f + ";";
    throw HypothesisError(msg, failed);
  }
}

double min_mass(const FiniteWorld& world, const ClusterStructure& structure) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < structure.cluster_count(); ++i)
    m = std::min(m, structure_mass(world, structure, i));
  return m;
}

}  // namespace

BoundReport check_decomposition(const FiniteWorld& world,
                                const Eigen::MatrixXd& features,
                                const Kernel& kernel,
                                const ClusterStructure& structure) {
  require_assumption(world, structure, /*need_labels=*/false);

  ClusterGeometry geo = cluster_geometry(world, features, kernel, structure);
  LossValue loss = population_kcl(world, features, kernel, structure.lambda);
  RLambdaBreakdown r = r_lambda(world, structure, kernel);

  BoundReport rep;
  rep.name = "decomposition";
  rep.lhs = 0.5 * structure.delta * geo.a_value + structure.lambda * geo.c_value;
  rep.rhs = loss.value + r.total;
  rep.components = {{"a", geo.a_value},
                    {"c", geo.c_value},
                    {"delta", structure.delta},
                    {"lambda", structure.lambda},
                    {"kcl_loss", loss.value},
                    {"r_overlap", r.overlap_term},
                    {"r_mass", r.mass_term},
                    {"r_const", r.const_term},
                    {"r_total", r.total}};
  rep.finalize();
  return rep;
}

BoundReport check_equality_case(const FiniteWorld& world,
                                const Eigen::MatrixXd& features,
                                const Kernel& kernel,
                                const ClusterStructure& structure) {
  const int k = structure.cluster_count();
  std::vector<std::string> failed;

  // Hypothesis 1: pairwise disjoint clusters.
  {
    std::vector<int> membership(static_cast<size_t>(world.size()), 0);
    bool disjoint = true;
    for (int i = 0; i < k && disjoint; ++i)
      for (int idx : structure_cluster(world, structure, i))
        if (++membership[static_cast<size_t>(idx)] > 1) disjoint = false;
    if (!disjoint) failed.push_back("clusters overlap");
  }

  // Hypothesis 2: zero joint mass across distinct clusters.
  {
    bool zero_cross = true;
    for (int i = 0; i < k && zero_cross; ++i) {
      const auto& mi = structure_cluster(world, structure, i);
      for (int j = 0; j < k && zero_cross; ++j) {
        if (i == j) continue;
        for (int a : mi) {
          for (int b : structure_cluster(world, structure, j)) {
            if (world.joint(a, b) != 0.0) {
              zero_cross = false;
              break;
            }
          }
          if (!zero_cross) break;
        }
      }
    }
    if (!zero_cross) failed.push_back("cross-cluster joint mass is nonzero");
  }

  // Hypothesis 3: sim is constantly delta on every cluster.
  {
    bool constant = true;
    for (int i = 0; i < k && constant; ++i) {
      const auto& mi = structure_cluster(world, structure, i);
      for (int a : mi) {
        for (int b : mi) {
          if (std::abs(sim(world, a, b, structure.lambda) - structure.delta) >
              1e-12) {
            constant = false;
            break;
          }
        }
        if (!constant) break;
      }
    }
    if (!constant)
      failed.push_back("sim is not constantly delta within clusters");
  }

  if (!failed.empty()) {
    std::string msg = "equality-case hypotheses fail:";
    for (const auto& f : failed) msg += " " + f + ";";
    throw HypothesisError(msg, failed);
  }

  BoundReport rep = check_decomposition(world, features, kernel, structure);
  rep.name = "equality_case";
  rep.two_sided = true;
  rep.finalize();
  return rep;
}

namespace {

BoundReport classification_bound_impl(const FiniteWorld& world,
                                      const Eigen::MatrixXd& features,
                                      const Kernel& kernel,
                                      const ClusterStructure& structure,
                                      double error, const char* name) {
  ClusterGeometry geo = cluster_geometry(world, features, kernel, structure);
  if (!(geo.delta_min > kMeaningfulTol))
    throw PreconditionError(
        "encoder is not meaningful (cluster means collapse; Delta_min = " +
        std::to_string(geo.delta_min) + ")");
  const int k = structure.cluster_count();
  double mmin = min_mass(world, structure);

  BoundReport rep;
  rep.name = name;
  rep.lhs = error;
  rep.rhs = 8.0 * (k - 1) * geo.a_value / (geo.delta_min * mmin);
  rep.components = {{"error", error},
                    {"a", geo.a_value},
                    {"delta_min", geo.delta_min},
                    {"min_mass", mmin},
                    {"k", static_cast<double>(k)}};
  rep.finalize();
  return rep;
}

}  // namespace

BoundReport check_classification_bound(const FiniteWorld& world,
                                       const Eigen::MatrixXd& features,
                                       const Kernel& kernel,
                                       const ClusterStructure& structure) {
  require_assumption(world, structure, /*need_labels=*/true);
  double err = mean_classifier_error(world, features, kernel, structure);
  return classification_bound_impl(world, features, kernel, structure, err,
                                   "classification_bound");
}

BoundReport check_classification_bound_partition(
    const FiniteWorld& world, const Eigen::MatrixXd& features,
    const Kernel& kernel, const ClusterStructure& structure,
    const std::vector<std::vector<int>>& partition) {
  require_assumption(world, structure, /*need_labels=*/false);
  double err =
      custom_partition_error(world, features, kernel, structure, partition);
  return classification_bound_impl(world, features, kernel, structure, err,
                                   "classification_bound_partition");
}

// ---------------------------------------------------------------------------
// Rademacher complexity and the generalization experiment

namespace {

std::vector<int> sampled_permutation(int n, std::mt19937_64& rng) {
  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

}  // namespace

std::vector<Eigen::MatrixXd> random_table_feature_set(const FiniteWorld& world,
                                                      int count, int d,
                                                      std::uint64_t seed) {
  std::vector<Eigen::MatrixXd> set;
  set.reserve(static_cast<size_t>(count));
  for (int e = 0; e < count; ++e) {
    TableEncoder enc =
        TableEncoder::random(world.size(), d, split_seed(seed, e));
    set.push_back(encode_all(enc, world));
  }
  return set;
}

RademacherEstimate estimate_rademacher(
    const FiniteWorld& world, const std::vector<Eigen::MatrixXd>& proxy_features,
    const GenBoundConfig& cfg) {
  if (cfg.n < 2 || cfg.n % 2 != 0)
    throw PreconditionError("sample count must be even and >= 2");
  if (proxy_features.empty())
    throw PreconditionError("need at least one encoder in the proxy class");

  const int n = cfg.n;
  const int m = n / 2;
  const int num_enc = static_cast<int>(proxy_features.size());

  // Dot-product tables q_e(x, x') = f_e(x)^T f_e(x') per proxy encoder.
  std::vector<Eigen::MatrixXd> q;
  q.reserve(proxy_features.size());
  for (const auto& f : proxy_features) q.push_back(f * f.transpose());

  // Fixed permutation list: identity first, then seed-derived samples. The
  // list is prefix-stable in permutation_samples so enlarging it can only
  // increase the reported max.
  std::vector<std::vector<int>> perms;
  {
    std::vector<int> identity(static_cast<size_t>(n));
    std::iota(identity.begin(), identity.end(), 0);
    perms.push_back(identity);
    for (int p = 0; p < cfg.permutation_samples; ++p) {
      auto rng = make_rng(split_seed(cfg.seed, 7000 + p));
      perms.push_back(sampled_permutation(n, rng));
    }
  }

  auto rng = make_rng(split_seed(cfg.seed, 1));
  std::bernoulli_distribution coin(0.5);

  double plus_sum = 0.0;
  double plus_sum_sq = 0.0;
  std::vector<double> minus_sums(perms.size(), 0.0);

  for (int draw = 0; draw < cfg.rademacher_draws; ++draw) {
    auto pairs =
        sample_positive_pairs(world, n, split_seed(cfg.seed, 100000 + draw));
    std::vector<double> sigma(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) sigma[static_cast<size_t>(i)] = coin(rng) ? 1.0 : -1.0;

    double sup_plus = -std::numeric_limits<double>::infinity();
    for (int e = 0; e < num_enc; ++e) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        acc += sigma[static_cast<size_t>(i)] *
               q[static_cast<size_t>(e)](pairs[static_cast<size_t>(i)].first,
                                         pairs[static_cast<size_t>(i)].second);
      sup_plus = std::max(sup_plus, acc / n);
    }
    plus_sum += sup_plus;
    plus_sum_sq += sup_plus * sup_plus;

    for (size_t p = 0; p < perms.size(); ++p) {
      const auto& s = perms[p];
      double sup_minus = -std::numeric_limits<double>::infinity();
      for (int e = 0; e < num_enc; ++e) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i) {
          int a = pairs[static_cast<size_t>(s[static_cast<size_t>(2 * i)])].first;
          int b =
              pairs[static_cast<size_t>(s[static_cast<size_t>(2 * i + 1)])].second;
          acc += sigma[static_cast<size_t>(i)] * q[static_cast<size_t>(e)](a, b);
        }
        sup_minus = std::max(sup_minus, 2.0 * acc / n);
      }
      minus_sums[p] += sup_minus;
    }
  }

  RademacherEstimate est;
  est.draws = cfg.rademacher_draws;
  est.permutations = static_cast<int>(perms.size());
  est.r_plus = plus_sum / cfg.rademacher_draws;
  double var = std::max(
      0.0, plus_sum_sq / cfg.rademacher_draws - est.r_plus * est.r_plus);
  est.r_plus_stderr = cfg.rademacher_draws > 1
                          ? std::sqrt(var / (cfg.rademacher_draws - 1))
                          : 0.0;
  est.r_minus_sampled = -std::numeric_limits<double>::infinity();
  for (double s : minus_sums)
    est.r_minus_sampled = std::max(est.r_minus_sampled, s / cfg.rademacher_draws);
  // Massart's finite-class bound with |q| <= 1: valid for every permutation,
  // hence for the unsampled ones too.
  est.r_minus_finite_class =
      std::sqrt(2.0 * std::log(std::max(2, num_enc)) / m);
  return est;
}

double gen_bound_value(const Kernel& kernel, const GenBoundConfig& cfg,
                       double r_plus, double r_minus) {
  double rn = r_plus + cfg.lambda * r_minus;
  double log_term = std::log(2.0 / cfg.epsilon);
  double b2 = kernel.b * kernel.b;
  return 2.0 * kernel.rho * rn + std::sqrt(2.0 * b2 * log_term / cfg.n) +
         cfg.lambda * std::sqrt(10.0 * b2 * log_term / cfg.n);
}

BoundReport check_generalization(const FiniteWorld& world, const Kernel& kernel,
                                 const GenBoundConfig& cfg, int trials,
                                 std::uint64_t seed) {
  if (cfg.n % 2 != 0) throw PreconditionError("n must be even");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 0.5))
    throw PreconditionError("epsilon must lie in (0, 1/2)");

  const int n = cfg.n;
  const int num_points = world.size();
  auto proxy = random_table_feature_set(world, cfg.proxy_class_size,
                                        cfg.encoder_dim, split_seed(seed, 11));

  // Per-encoder kernel tables and population losses.
  std::vector<Eigen::MatrixXd> kmats;
  std::vector<double> pop_loss;
  kmats.reserve(proxy.size());
  for (const auto& f : proxy) {
    kmats.push_back(kernel_gram(kernel, f));
    pop_loss.push_back(
        population_kcl(world, f, kernel, cfg.lambda).value);
  }

  RademacherEstimate rad = estimate_rademacher(world, proxy, cfg);
  double bound = gen_bound_value(kernel, cfg, rad.r_plus, rad.r_minus_sampled);
  double bound_conservative =
      gen_bound_value(kernel, cfg, rad.r_plus, rad.r_minus_finite_class);

  int violations = 0;
  Eigen::MatrixXd pos_counts(num_points, num_points);
  Eigen::VectorXd count_a(num_points), count_b(num_points);
  for (int t = 0; t < trials; ++t) {
    auto pairs = sample_positive_pairs(world, n, split_seed(seed, 500000 + t));
    pos_counts.setZero();
    count_a.setZero();
    count_b.setZero();
    for (const auto& [a, b] : pairs) {
      pos_counts(a, b) += 1.0;
      count_a(a) += 1.0;
      count_b(b) += 1.0;
    }
    double worst = 0.0;
    for (size_t e = 0; e < proxy.size(); ++e) {
      const Eigen::MatrixXd& km = kmats[e];
      double diag = pos_counts.cwiseProduct(km).sum();
      double full = count_a.dot(km * count_b);
      double emp = -diag / n +
                   cfg.lambda * (full - diag) / (static_cast<double>(n) * (n - 1));
      worst = std::max(worst, std::abs(emp - pop_loss[e]));
    }
    if (worst > bound) ++violations;
  }

  double rate = static_cast<double>(violations) / trials;
  // One-sided 99% binomial slack around epsilon.
  double slack99 =
      2.3263478740408408 * std::sqrt(cfg.epsilon * (1.0 - cfg.epsilon) / trials);

  BoundReport rep;
  rep.name = "generalization";
  rep.lhs = rate;
  rep.rhs = cfg.epsilon + slack99;
  rep.tol = 0.0;
  rep.components = {{"violations", static_cast<double>(violations)},
                    {"trials", static_cast<double>(trials)},
                    {"n", static_cast<double>(n)},
                    {"epsilon", cfg.epsilon},
                    {"lambda", cfg.lambda},
                    {"gen_bound", bound},
                    {"gen_bound_conservative", bound_conservative},
                    {"r_plus", rad.r_plus},
                    {"r_minus_sampled", rad.r_minus_sampled},
                    {"r_minus_finite_class", rad.r_minus_finite_class},
                    {"proxy_class_size", static_cast<double>(proxy.size())}};
  rep.notes["r_minus"] =
      "sampled permutation max; a lower bound of the max over the full "
      "symmetric group. gen_bound_conservative uses the finite-class upper "
      "bound instead.";
  rep.notes["class"] = "finite random proxy for the abstract encoder class";
  rep.finalize();
  return rep;
}

BoundReport check_surrogate(const FiniteWorld& world, const Kernel& kernel,
                            const ClusterStructure& structure,
                            const GenBoundConfig& cfg,
                            const Eigen::MatrixXd& features_ref,
                            const Eigen::MatrixXd& features_trained,
                            double gen_override) {
  require_assumption(world, structure, /*need_labels=*/true);

  ClusterGeometry geo =
      cluster_geometry(world, features_trained, kernel, structure);
  if (!(geo.delta_min > kMeaningfulTol))
    throw PreconditionError(
        "trained encoder is not meaningful; the surrogate coefficient is "
        "undefined");

  double gen = gen_override;
  if (gen < 0.0) {
    auto proxy = random_table_feature_set(world, cfg.proxy_class_size,
                                          cfg.encoder_dim, split_seed(cfg.seed, 3));
    RademacherEstimate rad = estimate_rademacher(world, proxy, cfg);
    gen = gen_bound_value(kernel, cfg, rad.r_plus, rad.r_minus_sampled);
  }

  double err =
      mean_classifier_error(world, features_trained, kernel, structure);
  LossValue ref_loss =
      population_kcl(world, features_ref, kernel, structure.lambda);
  RLambdaBreakdown r = r_lambda(world, structure, kernel);
  const int k = structure.cluster_count();
  double mmin = min_mass(world, structure);
  double coef = 8.0 * (k - 1) / (geo.delta_min * mmin);

  BoundReport rep;
  rep.name = "surrogate";
  rep.lhs = err;
  rep.rhs = coef * (ref_loss.value + (1.0 - 0.5 * structure.delta) * geo.a_value -
                    structure.lambda * geo.c_value + r.total + 2.0 * gen);
  rep.components = {{"error", err},
                    {"coef", coef},
                    {"ref_kcl_loss", ref_loss.value},
                    {"a_hat", geo.a_value},
                    {"c_hat", geo.c_value},
                    {"delta", structure.delta},
                    {"lambda", structure.lambda},
                    {"r_total", r.total},
                    {"gen", gen},
                    {"delta_min", geo.delta_min}};
  rep.finalize();
  return rep;
}

std::pair<BoundReport, BoundReport> check_normalized_cut(
    const FiniteWorld& world, const Eigen::MatrixXd& features,
    const Kernel& kernel, double lambda,
    const std::vector<std::vector<int>>& partition) {
  const int n = world.size();
  const int k = static_cast<int>(partition.size());
  if (k == 0) throw PreconditionError("partition must be nonempty");
  std::vector<int> cell(static_cast<size_t>(n), -1);
  for (int i = 0; i < k; ++i) {
    if (partition[static_cast<size_t>(i)].empty())
      throw PreconditionError("partition cell " + std::to_string(i) +
                              " is empty");
    for (int x : partition[static_cast<size_t>(i)]) {
      if (x < 0 || x >= n)
        throw PreconditionError("partition references a point outside the world");
      if (cell[static_cast<size_t>(x)] != -1)
        throw PreconditionError("partition cells overlap at point " +
                                std::to_string(x));
      cell[static_cast<size_t>(x)] = i;
    }
  }
  for (int x = 0; x < n; ++x)
    if (cell[static_cast<size_t>(x)] == -1)
      throw PreconditionError("partition does not cover point " +
                              std::to_string(x));

  Eigen::MatrixXd simmat(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) simmat(a, b) = sim(world, a, b, lambda);

  // Identity 1: sum_{x,x'} P(x) P(x') sim(x,x') k(f(x), f(x')) = -L_KCL.
  Eigen::MatrixXd gram = kernel_gram(kernel, features);
  double weighted = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      weighted +=
          world.point_mass(a) * world.point_mass(b) * simmat(a, b) * gram(a, b);
  LossValue loss = population_kcl(world, features, kernel, lambda);

  BoundReport relax;
  relax.name = "ncut_relaxation";
  relax.two_sided = true;
  relax.lhs = weighted;
  relax.rhs = -loss.value;
  relax.components = {{"kcl_loss", loss.value}, {"lambda", lambda}};
  relax.finalize();

  // Identity 2: sum_i W(V_i, V_i^c) / vol(V_i) = -Tr(U^t A U) + (1 - lambda) K,
  // with the trace side as an honest operator-matrix computation in
  // L^2(X, P_X): A acts as S D_w and U embeds R^K.
  std::vector<double> vol(static_cast<size_t>(k), 0.0);
  for (int x = 0; x < n; ++x)
    vol[static_cast<size_t>(cell[static_cast<size_t>(x)])] +=
        world.point_mass(x);
  for (int i = 0; i < k; ++i)
    if (!(vol[static_cast<size_t>(i)] > 0.0))
      throw PreconditionError("partition cell " + std::to_string(i) +
                              " has zero volume");

  double cut = 0.0;
  for (int a = 0; a < n; ++a) {
    int ca = cell[static_cast<size_t>(a)];
    for (int b = 0; b < n; ++b) {
      if (cell[static_cast<size_t>(b)] == ca) continue;
      cut += simmat(a, b) * world.point_mass(a) * world.point_mass(b) /
             vol[static_cast<size_t>(ca)];
    }
  }

  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, k);
  for (int x = 0; x < n; ++x)
    u(x, cell[static_cast<size_t>(x)]) =
        1.0 / std::sqrt(vol[static_cast<size_t>(cell[static_cast<size_t>(x)])]);
  Eigen::MatrixXd dw = world.point_mass.asDiagonal();
  double trace = (u.transpose() * dw * simmat * dw * u).trace();

  BoundReport comb;
  comb.name = "ncut_combinatorial";
  comb.two_sided = true;
  comb.lhs = cut;
  comb.rhs = -trace + (1.0 - lambda) * k;
  comb.components = {{"trace", trace},
                     {"lambda", lambda},
                     {"cells", static_cast<double>(k)}};
  comb.finalize();

  return {std::move(relax), std::move(comb)};
}

}  // namespace kcl
