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

#include <functional>
#include <map>
#include <string>

#include <Eigen/Core>

namespace kcl {

/// A positive-definite kernel on the unit sphere of the form
/// k(z, z') = psi(z^T z'), together with the scalar constants every bound
/// in this project consumes:
///   rho     Lipschitz constant of psi on [-1, 1] (we use sup |psi'|),
///   psi_one psi(1) = k(z, z),
///   b       sup over the sphere of |k|,
///   m_k     sup ||k(.,z) - k(.,z')||^2_H = 2 psi(1) - 2 min psi.
struct Kernel {
  std::string name;
  std::function<double(double)> psi;
  std::function<double(double)> psi_prime;
  double rho = 0.0;
  double psi_one = 0.0;
  double b = 0.0;
  double m_k = 0.0;
  std::map<std::string, double> params;
};

Kernel linear_kernel();
Kernel quadratic_kernel();
Kernel gaussian_kernel(double sigma2);

/// Custom kernels are accepted as (psi, psi_prime, rho) triples. The derived
/// constants come from a dense grid scan of [-1, 1]; positive-definiteness is
/// only spot-checked, never proven.
Kernel custom_kernel(const std::string& name, std::function<double(double)> psi,
                     std::function<double(double)> psi_prime, double rho,
                     std::map<std::string, double> params = {});

/// Factory keyed by CLI names: "linear", "quadratic", "gaussian" (reads
/// sigma2 from params, default 1.0).
Kernel kernel_by_name(const std::string& name,
                      const std::map<std::string, double>& params = {});

/// k(z, z') for unit vectors. Inputs within 1e-9 of unit norm are
/// renormalized; anything farther off raises PreconditionError naming the
/// offending norm.
double evaluate(const Kernel& kernel, const Eigen::VectorXd& z,
                const Eigen::VectorXd& zp);

/// ||h(z) - h(z')||^2_H = 2 psi(1) - 2 k(z, z').
double rkhs_sq_distance(const Kernel& kernel, const Eigen::VectorXd& z,
                        const Eigen::VectorXd& zp);

/// psi applied to an inner product that is trusted to come from unit vectors;
/// clamps to [-1, 1] to absorb floating-point drift in dot products.
double psi_at(const Kernel& kernel, double dot);

/// Elementwise psi over a matrix of inner products (a Gram matrix of encoded
/// points), clamped as in psi_at.
Eigen::MatrixXd psi_matrix(const Kernel& kernel, const Eigen::MatrixXd& dots);

}  // namespace kcl
