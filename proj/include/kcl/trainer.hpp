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
#include <memory>
#include <string>
#include <vector>

#include "kcl/encoders.hpp"
#include "kcl/kernels.hpp"
#include "kcl/similarity.hpp"
#include "kcl/worlds.hpp"

namespace kcl {

struct TrainConfig {
  int steps = 2000;
  double lr = 0.1;
  int batch_n = 64;  // positive pairs per step; must be even
  double lambda = 1.0;
  std::uint64_t seed = 0;
  int track_every = 100;
};

struct TraceRow {
  int step = 0;
  double empirical_loss = 0.0;
  double population_loss = 0.0;
  double a_value = 0.0;
  double c_value = 0.0;
  double delta_min = 0.0;
  double mean_error = 0.0;  // NaN when the structure cannot classify
  double lambda = 0.0;
};

struct TrainResult {
  std::unique_ptr<Encoder> encoder;
  std::vector<TraceRow> trace;
  bool diverged = false;
};

/// Analytic gradient of the empirical loss over `pairs` w.r.t. the encoder
/// parameters, through psi' and the sphere normalization.
Eigen::VectorXd batch_gradient(const FiniteWorld& world, const Encoder& encoder,
                               const Kernel& kernel,
                               const std::vector<std::pair<int, int>>& pairs,
                               double lambda);

/// Stochastic projected gradient descent on the empirical loss: one fresh
/// batch per step, gradient step, then table rows are renormalized onto the
/// sphere. Deterministic per seed. On a non-finite loss the run aborts and
/// returns the last finite state with `diverged` set.
TrainResult train(const FiniteWorld& world, const Encoder& init,
                  const Kernel& kernel, const ClusterStructure& structure,
                  const TrainConfig& cfg);

struct LambdaSweepRow {
  double lambda = 0.0;
  double final_population_loss = 0.0;
  double a_value = 0.0;
  double c_value = 0.0;
  double delta_min = 0.0;
  double mean_error = 0.0;
  bool collapsed = false;  // Delta_min fell below the meaningfulness threshold
  std::uint64_t seed = 0;
};

/// One training run per lambda with a fresh seed-derived initialization;
/// runs parallelize across lambda values.
std::vector<LambdaSweepRow> lambda_sweep(const FiniteWorld& world,
                                         const Kernel& kernel,
                                         const std::vector<double>& lambdas,
                                         const TrainConfig& cfg, int jobs);

std::string trace_to_csv(const std::vector<TraceRow>& trace);
std::string sweep_to_csv(const std::vector<LambdaSweepRow>& rows);
std::vector<LambdaSweepRow> sweep_from_csv(const std::string& text);

}  // namespace kcl
