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
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace kcl {

struct WorldPoint {
  int id = 0;
  Eigen::VectorXd coords;
  double nu = 1.0;  // base-measure weight of the cell
};

/// A finite augmentation world: every population expectation in this project
/// is an exact sum over these points. `joint` and `marginal` hold density
/// values w.r.t. nu (x) nu; probability masses are density * nu weights.
struct FiniteWorld {
  std::vector<WorldPoint> points;
  Eigen::MatrixXd joint;     // w(x, x') density values, symmetric
  Eigen::VectorXd marginal;  // w(x) density values, positive
  std::vector<std::vector<int>> clusters;  // M_1..M_K as point-index sets
  std::vector<int> labels;  // y(x) as an index into `clusters`; empty if absent

  // Derived on finalize.
  Eigen::VectorXd point_mass;        // P_X({x}) = w(x) nu(x)
  std::vector<double> cluster_mass;  // P_X(M_i)

  int size() const { return static_cast<int>(points.size()); }
  int cluster_count() const { return static_cast<int>(clusters.size()); }
  double nu_of(int i) const { return points[static_cast<size_t>(i)].nu; }
  /// P_+({(x, x')}) = w(x, x') nu(x) nu(x').
  double pair_mass(int i, int j) const {
    return joint(i, j) * nu_of(i) * nu_of(j);
  }
};

enum class OverlapMode { Disjoint, TwoBallOverlap };

struct BallWorldSpec {
  int K = 2;
  int dim = 2;           // ambient dimension of the point coordinates
  double radius = 1.0;
  std::vector<Eigen::VectorXd> centers;  // auto-placed when empty
  OverlapMode mode = OverlapMode::Disjoint;
  int resolution = 1;    // cells per ball (per region in overlap mode)
};

/// Disjoint equal-radius balls with the uniform same-ball augmentation law;
/// each ball is split into `resolution` cells of equal nu-weight, so every
/// expectation of cell-constant functions is exact. Produces
/// sim(x, x'; lambda) = K * 1[same ball] - lambda bit-exactly.
FiniteWorld build_disjoint_balls(const BallWorldSpec& spec);

/// The two-ball overlap construction with center distance 3r and augmentation
/// radius 2r, realized on the line so the three region measures (3 : 1 : 3)
/// are exact. sim takes the values 2 - lambda / -lambda / 1 - lambda on the
/// same-exclusive / cross-exclusive / intersection-touching cases.
FiniteWorld build_overlap_balls(const BallWorldSpec& spec);

/// A randomized valid world: positive symmetric joint, normalized, with K
/// possibly-overlapping covering clusters and a consistent labeling.
FiniteWorld random_world(int n_points, int k_clusters, double extra_membership,
                         std::uint64_t seed);

/// Recompute the derived fields and run all invariant checks; throws one of
/// the SchemaError subclasses on failure.
void finalize_world(FiniteWorld& world);
void validate_world(const FiniteWorld& world);

nlohmann::json world_to_json(const FiniteWorld& world);
FiniteWorld world_from_json(const nlohmann::json& j);
FiniteWorld load_world(const std::string& path);
void save_world(const FiniteWorld& world, const std::string& path);

/// n i.i.d. draws from the joint, by cumulative-table inversion over the N^2
/// pair masses. Deterministic per seed. n must be even and >= 2.
std::vector<std::pair<int, int>> sample_positive_pairs(const FiniteWorld& world,
                                                       int n,
                                                       std::uint64_t seed);

/// P_+(M x M') for point-index sets.
double positive_mass(const FiniteWorld& world, const std::vector<int>& m,
                     const std::vector<int>& mp);

}  // namespace kcl
