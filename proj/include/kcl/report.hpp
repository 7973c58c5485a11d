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

#include <map>
#include <string>

#include <json.hpp>

namespace kcl {

/// Default tolerance for exactly-summed statements.
constexpr double kExactTol = 1e-9;

/// One verified statement: LHS, RHS, slack, pass flag and the provenance of
/// each term. Inequalities pass when slack = rhs - lhs >= -(tol + noise);
/// identities (`two_sided`) pass when |slack| <= tol + noise.
struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double tol = kExactTol;
  double estimator_noise = 0.0;  // Monte-Carlo half-width folded into the gate
  bool two_sided = false;
  bool pass = false;
  std::map<std::string, double> components;
  std::map<std::string, std::string> notes;

  void finalize();
  nlohmann::json to_json() const;
  static BoundReport from_json(const nlohmann::json& j);
};

}  // namespace kcl
