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
#include <random>

#include <Eigen/Core>

namespace kcl {

/// splitmix64 step; used to derive independent stream seeds from one base
/// seed (e.g. one stream per sweep entry or per trial).
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

/// Standard-normal vector.
inline Eigen::VectorXd normal_vector(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = gauss(rng);
  return v;
}

/// Uniform point on the unit sphere S^{d-1}.
inline Eigen::VectorXd unit_vector(int d, std::mt19937_64& rng) {
  Eigen::VectorXd v = normal_vector(d, rng);
  double n = v.norm();
  while (n < 1e-12) {
    v = normal_vector(d, rng);
    n = v.norm();
  }
  return v / n;
}

}  // namespace kcl
