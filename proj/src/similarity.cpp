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

#include "kcl/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "kcl/errors.hpp"

namespace kcl {

namespace {
constexpr double kSlackTol = 1e-12;
}

double sim(const FiniteWorld& world, int x, int xp, double lambda) {
  // Two sequential divisions keep the density ratio bit-exact on the built-in
  // worlds (where joint and marginal share the same stored value).
  double ratio = world.joint(x, xp);
  ratio /= world.marginal(x);
  ratio /= world.marginal(xp);
  return ratio - lambda;
}

ClusterStructure structure_from_world(const FiniteWorld& world, double lambda,
                                      double delta) {
  ClusterStructure s;
  s.lambda = lambda;
  for (int i = 0; i < world.cluster_count(); ++i) s.cluster_ids.push_back(i);
  s.labeling = world.labels;
  s.delta = std::isnan(delta) ? max_admissible_delta(world, s.cluster_ids, lambda)
                              : delta;
  return s;
}

const std::vector<int>& structure_cluster(const FiniteWorld& world,
                                          const ClusterStructure& s, int i) {
  int idx = s.cluster_ids[static_cast<size_t>(i)];
  if (idx < 0 || idx >= world.cluster_count())
    throw PreconditionError("structure references cluster " + std::to_string(idx) +
                            " that the world does not have");
  return world.clusters[static_cast<size_t>(idx)];
}

double structure_mass(const FiniteWorld& world, const ClusterStructure& s,
                      int i) {
  double mass = 0.0;
  for (int idx : structure_cluster(world, s, i)) mass += world.point_mass(idx);
  return mass;
}

AssumptionReport verify_assumption(const FiniteWorld& world,
                                   const ClusterStructure& structure) {
  AssumptionReport report;
  const int n = world.size();
  const int k = structure.cluster_count();

  if (k == 0) {
    report.structure_incomplete = true;
    report.coverage.pass = false;
    report.coverage.detail = "no clusters supplied; structure is incomplete";
    report.similarity.pass = false;
    report.similarity.detail = "no clusters to check";
    report.labeling.pass = false;
    report.labeling.detail = "no labeling to check";
    report.pass = false;
    return report;
  }

  // (A) coverage.
  std::vector<char> covered(static_cast<size_t>(n), 0);
  for (int i = 0; i < k; ++i)
    for (int idx : structure_cluster(world, structure, i))
      covered[static_cast<size_t>(idx)] = 1;
  report.coverage.pass = true;
  for (int i = 0; i < n; ++i) {
    if (!covered[static_cast<size_t>(i)]) {
      report.coverage.pass = false;
      report.coverage.detail = "point " + std::to_string(i) + " is uncovered";
      break;
    }
  }
  if (report.coverage.pass) report.coverage.detail = "clusters cover the world";

  // (B) sim >= delta on same-cluster pairs, including x = x'.
  report.similarity.worst_slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    const auto& cluster = structure_cluster(world, structure, i);
    for (int a : cluster) {
      for (int b : cluster) {
        double slack = sim(world, a, b, structure.lambda) - structure.delta;
        if (slack < report.similarity.worst_slack) {
          report.similarity.worst_slack = slack;
          report.similarity.worst_x = a;
          report.similarity.worst_xp = b;
        }
      }
    }
  }
  report.similarity.pass = report.similarity.worst_slack >= -kSlackTol;
  {
    std::ostringstream msg;
    msg << "worst pair (" << report.similarity.worst_x << ", "
        << report.similarity.worst_xp << ") with slack "
        << report.similarity.worst_slack;
    report.similarity.detail = msg.str();
  }

  // (C) y(x) in J_x; measurability is automatic on a finite world.
  if (structure.labeling.empty()) {
    report.structure_incomplete = true;
    report.labeling.pass = false;
    report.labeling.detail = "no labeling supplied; structure is incomplete";
  } else if (static_cast<int>(structure.labeling.size()) != n) {
    report.labeling.pass = false;
    report.labeling.detail = "labeling length does not match world size";
  } else {
    report.labeling.pass = true;
    for (int x = 0; x < n; ++x) {
      int y = structure.labeling[static_cast<size_t>(x)];
      if (y < 0 || y >= k) {
        report.labeling.pass = false;
        report.labeling.detail =
            "label out of range at point " + std::to_string(x);
        break;
      }
      const auto& cluster = structure_cluster(world, structure, y);
      if (std::find(cluster.begin(), cluster.end(), x) == cluster.end()) {
        report.labeling.pass = false;
        report.labeling.detail = "point " + std::to_string(x) +
                                 " labeled with cluster " + std::to_string(y) +
                                 " it does not belong to";
        break;
      }
    }
    if (report.labeling.pass) report.labeling.detail = "labeling consistent";
  }

  report.pass =
      report.coverage.pass && report.similarity.pass && report.labeling.pass;
  return report;
}

nlohmann::json AssumptionReport::to_json() const {
  auto cond = [](const ConditionReport& c) {
    nlohmann::json j;
    j["pass"] = c.pass;
    j["detail"] = c.detail;
    if (c.worst_x >= 0) {
      j["worst_slack"] = c.worst_slack;
      j["worst_pair"] = {c.worst_x, c.worst_xp};
    }
    return j;
  };
  nlohmann::json j;
  j["condition_a"] = cond(coverage);
  j["condition_b"] = cond(similarity);
  j["condition_c"] = cond(labeling);
  j["pass"] = pass;
  j["structure_incomplete"] = structure_incomplete;
  return j;
}

double max_admissible_delta(const FiniteWorld& world,
                            const std::vector<int>& cluster_ids, double lambda) {
  if (cluster_ids.empty())
    throw PreconditionError("max_admissible_delta: no clusters given");
  double best = std::numeric_limits<double>::infinity();
  for (int id : cluster_ids) {
    if (id < 0 || id >= world.cluster_count())
      throw PreconditionError("cluster index out of range");
    const auto& cluster = world.clusters[static_cast<size_t>(id)];
    if (cluster.empty()) throw PreconditionError("empty cluster");
    for (int a : cluster)
      for (int b : cluster) best = std::min(best, sim(world, a, b, lambda));
  }
  return best;
}

double max_admissible_delta(const FiniteWorld& world,
                            const ClusterStructure& structure) {
  return max_admissible_delta(world, structure.cluster_ids, structure.lambda);
}

RLambdaBreakdown r_lambda(const FiniteWorld& world,
                          const ClusterStructure& structure,
                          const Kernel& kernel) {
  RLambdaBreakdown out;
  const int k = structure.cluster_count();

  // Overlap term: ordered pairs i != j of P_+((M_i n M_j) x (M_i n M_j)).
  for (int i = 0; i < k; ++i) {
    const auto& mi = structure_cluster(world, structure, i);
    std::set<int> set_i(mi.begin(), mi.end());
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      const auto& mj = structure_cluster(world, structure, j);
      std::vector<int> inter;
      for (int idx : mj)
        if (set_i.count(idx)) inter.push_back(idx);
      if (!inter.empty())
        out.overlap_term += positive_mass(world, inter, inter);
    }
  }
  out.overlap_term *= kernel.m_k / 2.0;

  double dispersion = 0.0;
  for (int i = 0; i < k; ++i) {
    double mass = structure_mass(world, structure, i);
    dispersion += mass * (1.0 - mass);
  }
  out.mass_term = structure.lambda * kernel.psi_one * dispersion;
  out.const_term = (1.0 - structure.lambda) * kernel.psi_one;
  out.total = out.overlap_term + out.mass_term + out.const_term;
  return out;
}

}  // namespace kcl
