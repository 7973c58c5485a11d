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

#include "kcl/report.hpp"

#include <cmath>

namespace kcl {

void BoundReport::finalize() {
  slack = rhs - lhs;
  double gate = tol + estimator_noise;
  pass = two_sided ? std::abs(slack) <= gate : slack >= -gate;
}

nlohmann::json BoundReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["lhs"] = lhs;
  j["rhs"] = rhs;
  j["slack"] = slack;
  j["tol"] = tol;
  j["estimator_noise"] = estimator_noise;
  j["two_sided"] = two_sided;
  j["pass"] = pass;
  j["components"] = components;
  if (!notes.empty()) j["notes"] = notes;
  return j;
}

BoundReport BoundReport::from_json(const nlohmann::json& j) {
  BoundReport r;
  r.name = j.at("name");
  r.lhs = j.at("lhs");
  r.rhs = j.at("rhs");
  r.slack = j.at("slack");
  r.tol = j.at("tol");
  r.estimator_noise = j.value("estimator_noise", 0.0);
  r.two_sided = j.value("two_sided", false);
  r.pass = j.at("pass");
  if (j.contains("components"))
    r.components = j.at("components").get<std::map<std::string, double>>();
  if (j.contains("notes"))
    r.notes = j.at("notes").get<std::map<std::string, std::string>>();
  return r;
}

}  // namespace kcl
