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

#include "kcl/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "kcl/errors.hpp"
#include "kcl/geometry.hpp"
#include "kcl/objectives.hpp"
#include "kcl/random.hpp"

namespace kcl {

Eigen::VectorXd batch_gradient(const FiniteWorld& world, const Encoder& encoder,
                               const Kernel& kernel,
                               const std::vector<std::pair<int, int>>& pairs,
                               double lambda) {
  const int n = static_cast<int>(pairs.size());
  if (n < 2) throw PreconditionError("batch gradient needs n >= 2 pairs");

  // Encode only the points the batch touches.
  std::map<int, Eigen::VectorXd> f;
  for (const auto& [a, b] : pairs) {
    if (!f.count(a)) f[a] = encoder.encode(world, a);
    if (!f.count(b)) f[b] = encoder.encode(world, b);
  }

  std::map<int, Eigen::VectorXd> df;  // d(loss)/d f(point)
  auto bump = [&](int point, const Eigen::VectorXd& v) {
    auto it = df.find(point);
    if (it == df.end())
      df.emplace(point, v);
    else
      it->second += v;
  };

  // Positive term: -(1/n) sum_i psi(f(a_i)^T f(b_i)).
  for (const auto& [a, b] : pairs) {
    double dpsi = kernel.psi_prime(std::clamp(f[a].dot(f[b]), -1.0, 1.0));
    bump(a, (-dpsi / n) * f[b]);
    bump(b, (-dpsi / n) * f[a]);
  }

  // Cross term: lambda / (n(n-1)) sum_{i != j} psi(f(a_i)^T f(b_j)).
  double cross_coef = lambda / (static_cast<double>(n) * (n - 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      int a = pairs[static_cast<size_t>(i)].first;
      int b = pairs[static_cast<size_t>(j)].second;
      double dpsi = kernel.psi_prime(std::clamp(f[a].dot(f[b]), -1.0, 1.0));
      bump(a, cross_coef * dpsi * f[b]);
      bump(b, cross_coef * dpsi * f[a]);
    }
  }

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(encoder.param_count());
  for (const auto& [point, g] : df)
    encoder.accumulate_param_grad(world, point, g, grad);
  return grad;
}

TrainResult train(const FiniteWorld& world, const Encoder& init,
                  const Kernel& kernel, const ClusterStructure& structure,
                  const TrainConfig& cfg) {
  if (cfg.batch_n < 2 || cfg.batch_n % 2 != 0)
    throw PreconditionError("batch_n must be even and >= 2");
  if (!(cfg.lr > 0.0)) throw PreconditionError("lr must be positive");

  TrainResult result;
  result.encoder = init.clone();

  // Appends a row only when every entry is finite, so a divergent run leaves
  // the last finite state in the trace.
  auto track = [&](int step, double emp) {
    TraceRow row;
    row.step = step;
    row.empirical_loss = emp;
    row.lambda = cfg.lambda;
    Eigen::MatrixXd feats = encode_all(*result.encoder, world);
    row.population_loss = population_kcl(world, feats, kernel, cfg.lambda).value;
    bool finite = std::isfinite(emp) && std::isfinite(row.population_loss);
    if (structure.cluster_count() >= 2) {
      ClusterGeometry geo = cluster_geometry(world, feats, kernel, structure);
      row.a_value = geo.a_value;
      row.c_value = geo.c_value;
      row.delta_min = geo.delta_min;
      finite = finite && std::isfinite(row.a_value) &&
               std::isfinite(row.c_value) && std::isfinite(row.delta_min);
      if (!structure.labeling.empty()) {
        row.mean_error = mean_classifier_error(world, feats, kernel, structure);
        finite = finite && std::isfinite(row.mean_error);
      }
    }
    if (finite) result.trace.push_back(row);
    return finite;
  };

  {
    // Step-0 row: initial encoder scored on a held-out-style batch.
    auto pairs =
        sample_positive_pairs(world, cfg.batch_n, split_seed(cfg.seed, 0));
    Eigen::MatrixXd feats = encode_all(*result.encoder, world);
    double emp = empirical_kcl(pairs, feats, kernel, cfg.lambda).value;
    if (!track(0, emp)) {
      result.diverged = true;
      return result;
    }
  }

  for (int step = 1; step <= cfg.steps; ++step) {
    auto pairs = sample_positive_pairs(world, cfg.batch_n,
                                       split_seed(cfg.seed, step));
    Eigen::MatrixXd feats = encode_all(*result.encoder, world);
    double emp = empirical_kcl(pairs, feats, kernel, cfg.lambda).value;
    if (!std::isfinite(emp)) {
      result.diverged = true;
      break;
    }

    Eigen::VectorXd grad =
        batch_gradient(world, *result.encoder, kernel, pairs, cfg.lambda);
    Eigen::VectorXd params = result.encoder->params();
    params -= cfg.lr * grad;
    result.encoder->set_params(params);
    if (auto* table = dynamic_cast<TableEncoder*>(result.encoder.get()))
      table->renormalize_rows();

    if (step % cfg.track_every == 0 || step == cfg.steps) {
      if (!track(step, emp)) {
        result.diverged = true;
        break;
      }
    }
  }
  return result;
}

std::vector<LambdaSweepRow> lambda_sweep(const FiniteWorld& world,
                                         const Kernel& kernel,
                                         const std::vector<double>& lambdas,
                                         const TrainConfig& cfg, int jobs) {
  std::vector<LambdaSweepRow> rows(lambdas.size());
  if (jobs < 1)
    jobs = std::max(1u, std::thread::hardware_concurrency());

  auto run_one = [&](size_t idx) {
    TrainConfig local = cfg;
    local.lambda = lambdas[idx];
    local.seed = split_seed(cfg.seed, idx);

    ClusterStructure structure = structure_from_world(
        world, local.lambda, std::numeric_limits<double>::quiet_NaN());
    TableEncoder init = TableEncoder::random(
        world.size(), std::max(2, world.cluster_count()),
        split_seed(local.seed, 9999));
    TrainResult res = train(world, init, kernel, structure, local);

    Eigen::MatrixXd feats = encode_all(*res.encoder, world);
    LambdaSweepRow row;
    row.lambda = local.lambda;
    row.seed = local.seed;
    row.final_population_loss =
        population_kcl(world, feats, kernel, local.lambda).value;
    if (structure.cluster_count() >= 2) {
      ClusterGeometry geo = cluster_geometry(world, feats, kernel, structure);
      row.a_value = geo.a_value;
      row.c_value = geo.c_value;
      row.delta_min = geo.delta_min;
      row.collapsed = !(geo.delta_min > kMeaningfulTol);
      row.mean_error =
          structure.labeling.empty()
              ? std::numeric_limits<double>::quiet_NaN()
              : mean_classifier_error(world, feats, kernel, structure);
    }
    rows[idx] = row;
  };

  if (jobs == 1 || lambdas.size() <= 1) {
    for (size_t i = 0; i < lambdas.size(); ++i) run_one(i);
  } else {
    std::vector<std::thread> workers;
    std::atomic<size_t> next{0};
    for (int t = 0; t < jobs; ++t) {
      workers.emplace_back([&]() {
        for (size_t i = next.fetch_add(1); i < lambdas.size();
             i = next.fetch_add(1))
          run_one(i);
      });
    }
    for (auto& w : workers) w.join();
  }
  return rows;
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream out;
  out.precision(17);
  out << "step,empirical_loss,population_loss,a,c,delta_min,mean_error,lambda\n";
  for (const auto& r : trace)
    out << r.step << ',' << r.empirical_loss << ',' << r.population_loss << ','
        << r.a_value << ',' << r.c_value << ',' << r.delta_min << ','
        << r.mean_error << ',' << r.lambda << '\n';
  return out.str();
}

std::string sweep_to_csv(const std::vector<LambdaSweepRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "lambda,final_population_loss,a,c,delta_min,mean_error,collapsed,seed\n";
  for (const auto& r : rows)
    out << r.lambda << ',' << r.final_population_loss << ',' << r.a_value << ','
        << r.c_value << ',' << r.delta_min << ',' << r.mean_error << ','
        << (r.collapsed ? 1 : 0) << ',' << r.seed << '\n';
  return out.str();
}

std::vector<LambdaSweepRow> sweep_from_csv(const std::string& text) {
  std::vector<LambdaSweepRow> rows;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty sweep CSV");
  if (line.rfind("lambda,", 0) != 0)
    throw SchemaError("sweep CSV has an unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    LambdaSweepRow r;
    auto next = [&]() {
      if (!std::getline(ls, field, ','))
        throw SchemaError("sweep CSV row is too short");
      return field;
    };
    r.lambda = std::stod(next());
    r.final_population_loss = std::stod(next());
    r.a_value = std::stod(next());
    r.c_value = std::stod(next());
    r.delta_min = std::stod(next());
    r.mean_error = std::stod(next());
    r.collapsed = std::stoi(next()) != 0;
    r.seed = std::stoull(next());
    rows.push_back(r);
  }
  return rows;
}

}  // namespace kcl
