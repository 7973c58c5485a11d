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

#include <string>
#include <vector>

#include <json.hpp>

#include "kcl/kernels.hpp"
#include "kcl/worlds.hpp"

namespace kcl {

/// A candidate (lambda, delta, clusters, labeling) instantiating the
/// mixture-of-clusters condition. cluster_ids index into world.clusters;
/// labeling maps each point to a position in cluster_ids.
struct ClusterStructure {
  double lambda = 1.0;
  double delta = 0.0;
  std::vector<int> cluster_ids;
  std::vector<int> labeling;

  int cluster_count() const { return static_cast<int>(cluster_ids.size()); }
};

/// Structure using all world clusters and the world labeling. A NaN delta
/// resolves to the tightest admissible value.
ClusterStructure structure_from_world(const FiniteWorld& world, double lambda,
                                      double delta);

const std::vector<int>& structure_cluster(const FiniteWorld& world,
                                          const ClusterStructure& s, int i);
double structure_mass(const FiniteWorld& world, const ClusterStructure& s, int i);

/// sim(x, x'; lambda) = w(x,x') / (w(x) w(x')) - lambda.
double sim(const FiniteWorld& world, int x, int xp, double lambda);

struct ConditionReport {
  bool pass = false;
  std::string detail;
  double worst_slack = 0.0;  // condition (B): min over pairs of sim - delta
  int worst_x = -1;
  int worst_xp = -1;
};

struct AssumptionReport {
  ConditionReport coverage;     // (A)
  ConditionReport similarity;   // (B)
  ConditionReport labeling;     // (C)
  bool pass = false;
  bool structure_incomplete = false;  // no clusters / no labeling supplied
  nlohmann::json to_json() const;
};

/// Checks (A) coverage, (B) sim >= delta on same-cluster pairs (reporting the
/// worst violating pair), and (C) label consistency. Failures are report
/// entries, never exceptions.
AssumptionReport verify_assumption(const FiniteWorld& world,
                                   const ClusterStructure& structure);

/// min over clusters and same-cluster pairs of sim(x, x'; lambda): the
/// largest delta for which condition (B) holds.
double max_admissible_delta(const FiniteWorld& world,
                            const std::vector<int>& cluster_ids, double lambda);
double max_admissible_delta(const FiniteWorld& world,
                            const ClusterStructure& structure);

/// The remainder term of the decomposition bound, split into its three parts.
struct RLambdaBreakdown {
  double overlap_term = 0.0;  // (M_k / 2) sum_{i != j} P_+((M_i n M_j)^2)
  double mass_term = 0.0;     // lambda psi(1) sum_i P(M_i)(1 - P(M_i))
  double const_term = 0.0;    // (1 - lambda) psi(1)
  double total = 0.0;
};

RLambdaBreakdown r_lambda(const FiniteWorld& world,
                          const ClusterStructure& structure,
                          const Kernel& kernel);

}  // namespace kcl
