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

#include "kcl/worlds.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "kcl/errors.hpp"
#include "kcl/random.hpp"

namespace kcl {

namespace {

constexpr double kMassTol = 1e-12;

std::vector<Eigen::VectorXd> default_centers(const BallWorldSpec& spec) {
  // Centers spaced 3r apart along the first axis; > 2r, so balls are disjoint.
  std::vector<Eigen::VectorXd> centers;
  for (int i = 0; i < spec.K; ++i) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(spec.dim);
    c(0) = 3.0 * spec.radius * i;
    centers.push_back(c);
  }
  return centers;
}

}  // namespace

void validate_world(const FiniteWorld& world) {
  const int n = world.size();
  if (n == 0) throw SchemaError("world has no points");
  if (world.joint.rows() != n || world.joint.cols() != n)
    throw SchemaError("joint matrix shape does not match point count");
  if (world.marginal.size() != n)
    throw SchemaError("marginal length does not match point count");
  for (int i = 0; i < n; ++i) {
    if (world.nu_of(i) < 0.0)
      throw SchemaError("nu must be nonnegative at point " + std::to_string(i));
  }

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (world.joint(i, j) != world.joint(j, i)) {
        std::ostringstream msg;
        msg << "joint is asymmetric at pair (" << i << ", " << j << "): "
            << world.joint(i, j) << " vs " << world.joint(j, i);
        throw SymmetryError(msg.str());
      }
      if (world.joint(i, j) < 0.0)
        throw SchemaError("joint density negative at pair (" + std::to_string(i) +
                          ", " + std::to_string(j) + ")");
    }
  }

  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) total += world.pair_mass(i, j);
  if (std::abs(total - 1.0) > kMassTol) {
    std::ostringstream msg;
    msg << "joint does not integrate to 1: total mass " << total;
    throw NormalizationError(msg.str());
  }

  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += world.joint(i, j) * world.nu_of(j);
    if (std::abs(row - world.marginal(i)) > kMassTol) {
      std::ostringstream msg;
      msg << "marginal inconsistent with joint at point " << i << ": stored "
          << world.marginal(i) << ", summed " << row;
      throw NormalizationError(msg.str());
    }
    if (!(world.marginal(i) > 0.0))
      throw ZeroMarginalError("marginal is not positive at point " +
                              std::to_string(i));
  }

  if (!world.clusters.empty()) {
    std::vector<char> covered(static_cast<size_t>(n), 0);
    for (const auto& cluster : world.clusters) {
      if (cluster.empty()) throw CoverageError("empty cluster in world");
      for (int idx : cluster) {
        if (idx < 0 || idx >= n)
          throw SchemaError("cluster references point " + std::to_string(idx) +
                            " outside the world");
        covered[static_cast<size_t>(idx)] = 1;
      }
    }
    for (int i = 0; i < n; ++i) {
      if (!covered[static_cast<size_t>(i)])
        throw CoverageError("clusters do not cover point " + std::to_string(i));
    }
  }

  if (!world.labels.empty()) {
    if (world.clusters.empty())
      throw LabelError("labels present but clusters absent");
    if (static_cast<int>(world.labels.size()) != n)
      throw LabelError("label count does not match point count");
    for (int i = 0; i < n; ++i) {
      int y = world.labels[static_cast<size_t>(i)];
      if (y < 0 || y >= world.cluster_count())
        throw LabelError("label out of range at point " + std::to_string(i));
      const auto& cluster = world.clusters[static_cast<size_t>(y)];
      if (std::find(cluster.begin(), cluster.end(), i) == cluster.end())
        throw LabelError("point " + std::to_string(i) +
                         " labeled with a cluster it does not belong to");
    }
  }
}

void finalize_world(FiniteWorld& world) {
  const int n = world.size();
  world.point_mass.resize(n);
  for (int i = 0; i < n; ++i)
    world.point_mass(i) = world.marginal(i) * world.nu_of(i);
  world.cluster_mass.clear();
  for (const auto& cluster : world.clusters) {
    double mass = 0.0;
    for (int idx : cluster) mass += world.point_mass(idx);
    world.cluster_mass.push_back(mass);
  }
  validate_world(world);
}

FiniteWorld build_disjoint_balls(const BallWorldSpec& spec) {
  if (spec.mode != OverlapMode::Disjoint)
    throw ConstructionError("build_disjoint_balls requires disjoint mode");
  if (spec.K < 1) throw ConstructionError("need at least one ball");
  if (spec.resolution < 1) throw ConstructionError("resolution must be >= 1");
  if (!(spec.radius > 0.0)) throw ConstructionError("radius must be positive");

  auto centers = spec.centers.empty() ? default_centers(spec) : spec.centers;
  if (static_cast<int>(centers.size()) != spec.K)
    throw ConstructionError("center count does not match K");
  for (size_t i = 0; i < centers.size(); ++i) {
    for (size_t j = i + 1; j < centers.size(); ++j) {
      if ((centers[i] - centers[j]).norm() <= 2.0 * spec.radius)
        throw ConstructionError("overlapping centers in disjoint mode (balls " +
                                std::to_string(i) + " and " + std::to_string(j) +
                                ")");
    }
  }

  const int res = spec.resolution;
  const int n = spec.K * res;
  FiniteWorld world;
  world.points.reserve(static_cast<size_t>(n));

  // Each ball carries nu-mass 1 split into `res` equal cells. With these
  // units the same-ball joint density and the marginal density are the same
  // number 1/K, which makes the density ratio w(x,x')/(w(x)w(x')) evaluate to
  // exactly K in floating point.
  const double cell_nu = 1.0 / res;
  const double density = 1.0 / spec.K;
  for (int ball = 0; ball < spec.K; ++ball) {
    for (int cell = 0; cell < res; ++cell) {
      WorldPoint p;
      p.id = ball * res + cell;
      p.coords = centers[static_cast<size_t>(ball)];
      // Cells spread along the first axis inside the ball.
      p.coords(0) += spec.radius * 0.9 * (2.0 * (cell + 0.5) / res - 1.0);
      p.nu = cell_nu;
      world.points.push_back(std::move(p));
    }
  }

  world.joint = Eigen::MatrixXd::Zero(n, n);
  world.marginal = Eigen::VectorXd::Constant(n, density);
  for (int ball = 0; ball < spec.K; ++ball) {
    for (int a = 0; a < res; ++a)
      for (int b = 0; b < res; ++b)
        world.joint(ball * res + a, ball * res + b) = density;
  }

  world.clusters.resize(static_cast<size_t>(spec.K));
  world.labels.resize(static_cast<size_t>(n));
  for (int ball = 0; ball < spec.K; ++ball) {
    for (int cell = 0; cell < res; ++cell) {
      world.clusters[static_cast<size_t>(ball)].push_back(ball * res + cell);
      world.labels[static_cast<size_t>(ball * res + cell)] = ball;
    }
  }

  finalize_world(world);
  return world;
}

FiniteWorld build_overlap_balls(const BallWorldSpec& spec) {
  if (spec.mode != OverlapMode::TwoBallOverlap)
    throw ConstructionError("build_overlap_balls requires overlap mode");
  if (!(spec.radius > 0.0)) throw ConstructionError("radius must be positive");
  if (spec.resolution < 1) throw ConstructionError("resolution must be >= 1");
  if (!spec.centers.empty()) {
    if (spec.centers.size() != 2)
      throw ConstructionError("overlap mode requires exactly 2 centers");
    double dist = (spec.centers[0] - spec.centers[1]).norm();
    if (std::abs(dist - 3.0 * spec.radius) > 1e-9 * spec.radius)
      throw ConstructionError("overlap mode requires center distance 3r");
  }

  const double r = spec.radius;
  const int res = spec.resolution;
  // On the line with v1 = 0, v2 = 3r: B(v1; 2r) = (-2r, 2r),
  // B(v2; 2r) = (r, 5r). Regions and their Lebesgue measures in units of r:
  //   E1 = (-2r, r)  measure 3,  I = (r, 2r) measure 1,  E2 = (2r, 5r) measure 3.
  struct Region {
    double lo, hi, measure, density;
  };
  const std::vector<Region> regions = {
      {-2.0 * r, 1.0 * r, 3.0, 1.0 / 8.0},
      {1.0 * r, 2.0 * r, 1.0, 1.0 / 4.0},
      {2.0 * r, 5.0 * r, 3.0, 1.0 / 8.0},
  };
  // Joint densities per region pair (E1, I, E2) x (E1, I, E2).
  const double J[3][3] = {
      {1.0 / 32.0, 1.0 / 32.0, 0.0},
      {1.0 / 32.0, 1.0 / 16.0, 1.0 / 32.0},
      {0.0, 1.0 / 32.0, 1.0 / 32.0},
  };

  const int n = 3 * res;
  FiniteWorld world;
  world.joint = Eigen::MatrixXd::Zero(n, n);
  world.marginal.resize(n);
  for (int reg = 0; reg < 3; ++reg) {
    const Region& region = regions[static_cast<size_t>(reg)];
    for (int cell = 0; cell < res; ++cell) {
      const int id = reg * res + cell;
      WorldPoint p;
      p.id = id;
      p.coords = Eigen::VectorXd::Zero(std::max(1, spec.dim));
      p.coords(0) = region.lo + (region.hi - region.lo) * (cell + 0.5) / res;
      p.nu = region.measure / res;
      world.points.push_back(std::move(p));
      world.marginal(id) = region.density;
    }
  }
  for (int ra = 0; ra < 3; ++ra)
    for (int rb = 0; rb < 3; ++rb)
      for (int a = 0; a < res; ++a)
        for (int b = 0; b < res; ++b)
          world.joint(ra * res + a, rb * res + b) = J[ra][rb];

  // M1 = E1 u I, M2 = I u E2; the intersection is labeled cluster 1 (index 0).
  world.clusters.assign(2, {});
  world.labels.assign(static_cast<size_t>(n), 0);
  for (int i = 0; i < 2 * res; ++i) world.clusters[0].push_back(i);
  for (int i = res; i < 3 * res; ++i) world.clusters[1].push_back(i);
  for (int i = 2 * res; i < 3 * res; ++i) world.labels[static_cast<size_t>(i)] = 1;

  finalize_world(world);
  return world;
}

FiniteWorld random_world(int n_points, int k_clusters, double extra_membership,
                         std::uint64_t seed) {
  if (n_points < k_clusters || k_clusters < 1)
    throw ConstructionError("random_world needs n_points >= k_clusters >= 1");
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  FiniteWorld world;
  world.points.resize(static_cast<size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    world.points[static_cast<size_t>(i)].id = i;
    world.points[static_cast<size_t>(i)].coords = normal_vector(2, rng);
    world.points[static_cast<size_t>(i)].nu = 0.5 + unif(rng);
  }

  // Strictly positive symmetric joint, then normalize to total mass 1.
  Eigen::MatrixXd j(n_points, n_points);
  for (int a = 0; a < n_points; ++a) {
    for (int b = a; b < n_points; ++b) {
      double v = 0.1 + unif(rng);
      j(a, b) = v;
      j(b, a) = v;
    }
  }
  double total = 0.0;
  for (int a = 0; a < n_points; ++a)
    for (int b = 0; b < n_points; ++b)
      total += j(a, b) * world.nu_of(a) * world.nu_of(b);
  world.joint = j / total;
  world.marginal.resize(n_points);
  for (int a = 0; a < n_points; ++a) {
    double row = 0.0;
    for (int b = 0; b < n_points; ++b) row += world.joint(a, b) * world.nu_of(b);
    world.marginal(a) = row;
  }

  // Base assignment guarantees coverage and nonempty clusters; extra
  // memberships create overlaps.
  world.clusters.assign(static_cast<size_t>(k_clusters), {});
  world.labels.assign(static_cast<size_t>(n_points), 0);
  for (int i = 0; i < n_points; ++i) {
    int base = i % k_clusters;
    world.labels[static_cast<size_t>(i)] = base;
    for (int c = 0; c < k_clusters; ++c) {
      if (c == base || unif(rng) < extra_membership)
        world.clusters[static_cast<size_t>(c)].push_back(i);
    }
  }

  finalize_world(world);
  return world;
}

nlohmann::json world_to_json(const FiniteWorld& world) {
  nlohmann::json j;
  j["points"] = nlohmann::json::array();
  for (const auto& p : world.points) {
    nlohmann::json pj;
    pj["id"] = p.id;
    pj["coords"] = std::vector<double>(p.coords.data(),
                                       p.coords.data() + p.coords.size());
    pj["nu"] = p.nu;
    j["points"].push_back(pj);
  }
  j["joint"] = nlohmann::json::array();
  for (int a = 0; a < world.size(); ++a) {
    std::vector<double> row(static_cast<size_t>(world.size()));
    for (int b = 0; b < world.size(); ++b)
      row[static_cast<size_t>(b)] = world.joint(a, b);
    j["joint"].push_back(row);
  }
  if (!world.clusters.empty()) j["clusters"] = world.clusters;
  if (!world.labels.empty()) j["labels"] = world.labels;
  return j;
}

FiniteWorld world_from_json(const nlohmann::json& j) {
  FiniteWorld world;
  if (!j.contains("points") || !j.contains("joint"))
    throw SchemaError("world file must contain 'points' and 'joint'");
  for (const auto& pj : j.at("points")) {
    WorldPoint p;
    p.id = pj.value("id", static_cast<int>(world.points.size()));
    auto coords = pj.value("coords", std::vector<double>{0.0});
    p.coords = Eigen::Map<Eigen::VectorXd>(coords.data(),
                                           static_cast<Eigen::Index>(coords.size()));
    p.nu = pj.value("nu", 1.0);
    world.points.push_back(std::move(p));
  }
  const int n = world.size();
  const auto& joint = j.at("joint");
  if (static_cast<int>(joint.size()) != n)
    throw SchemaError("joint row count does not match point count");
  world.joint.resize(n, n);
  for (int a = 0; a < n; ++a) {
    const auto& row = joint.at(static_cast<size_t>(a));
    if (static_cast<int>(row.size()) != n)
      throw SchemaError("joint row " + std::to_string(a) + " has wrong length");
    for (int b = 0; b < n; ++b) world.joint(a, b) = row.at(static_cast<size_t>(b));
  }
  world.marginal.resize(n);
  for (int a = 0; a < n; ++a) {
    double row = 0.0;
    for (int b = 0; b < n; ++b) row += world.joint(a, b) * world.nu_of(b);
    world.marginal(a) = row;
  }
  if (j.contains("clusters"))
    world.clusters = j.at("clusters").get<std::vector<std::vector<int>>>();
  if (j.contains("labels")) world.labels = j.at("labels").get<std::vector<int>>();
  finalize_world(world);
  return world;
}

FiniteWorld load_world(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open world file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("world file is not valid JSON: " + std::string(e.what()));
  }
  return world_from_json(j);
}

void save_world(const FiniteWorld& world, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write world file: " + path);
  out << world_to_json(world).dump(2) << "\n";
}

std::vector<std::pair<int, int>> sample_positive_pairs(const FiniteWorld& world,
                                                       int n,
                                                       std::uint64_t seed) {
  if (n < 2) throw PreconditionError("need at least 2 positive pairs");
  if (n % 2 != 0)
    throw PreconditionError(
        "pair count must be even (the generalization bound splits the sample "
        "into n/2 blocks)");
  const int m = world.size();
  std::vector<double> cumulative;
  cumulative.reserve(static_cast<size_t>(m) * m);
  double acc = 0.0;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      acc += world.pair_mass(a, b);
      cumulative.push_back(acc);
    }
  }
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double u = unif(rng) * acc;
    auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
    int flat = static_cast<int>(it - cumulative.begin());
    if (flat >= m * m) flat = m * m - 1;
    pairs.emplace_back(flat / m, flat % m);
  }
  return pairs;
}

double positive_mass(const FiniteWorld& world, const std::vector<int>& m,
                     const std::vector<int>& mp) {
  double total = 0.0;
  for (int a : m)
    for (int b : mp) total += world.pair_mass(a, b);
  return total;
}

}  // namespace kcl
