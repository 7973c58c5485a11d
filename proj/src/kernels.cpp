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

#include "kcl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kcl/errors.hpp"

namespace kcl {

namespace {

constexpr double kUnitTol = 1e-9;
constexpr int kGridPoints = 20001;

struct GridScan {
  double min_psi;
  double max_abs_psi;
  double max_abs_prime;
};

GridScan scan(const std::function<double(double)>& psi,
              const std::function<double(double)>& psi_prime) {
  GridScan g{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (int i = 0; i < kGridPoints; ++i) {
    double t = -1.0 + 2.0 * i / (kGridPoints - 1);
    double v = psi(t);
    g.min_psi = std::min(g.min_psi, v);
    g.max_abs_psi = std::max(g.max_abs_psi, std::abs(v));
    g.max_abs_prime = std::max(g.max_abs_prime, std::abs(psi_prime(t)));
  }
  return g;
}

// Asserts the closed-form constants of a built-in kernel against a grid scan.
void check_constants(const Kernel& k) {
  GridScan g = scan(k.psi, k.psi_prime);
  double m_k_grid = 2.0 * k.psi_one - 2.0 * g.min_psi;
  if (std::abs(k.m_k - m_k_grid) > 1e-6 || std::abs(k.b - g.max_abs_psi) > 1e-6 ||
      g.max_abs_prime > k.rho + 1e-6 || k.rho > g.max_abs_prime + 1e-3) {
    throw ConstructionError("kernel '" + k.name +
                            "': closed-form constants disagree with grid scan");
  }
}

}  // namespace

Kernel linear_kernel() {
  Kernel k;
  k.name = "linear";
  k.psi = [](double t) { return t; };
  k.psi_prime = [](double) { return 1.0; };
  k.rho = 1.0;
  k.psi_one = 1.0;
  k.b = 1.0;
  k.m_k = 4.0;  // 2 - 2 * min_t t = 2 - 2*(-1)
  check_constants(k);
  return k;
}

Kernel quadratic_kernel() {
  Kernel k;
  k.name = "quadratic";
  k.psi = [](double t) { return t * t; };
  k.psi_prime = [](double t) { return 2.0 * t; };
  k.rho = 2.0;
  k.psi_one = 1.0;
  k.b = 1.0;
  k.m_k = 2.0;  // min psi = 0 at t = 0
  check_constants(k);
  return k;
}

Kernel gaussian_kernel(double sigma2) {
  if (!(sigma2 > 0.0)) throw ConstructionError("gaussian kernel needs sigma2 > 0");
  Kernel k;
  k.name = "gaussian";
  k.params["sigma2"] = sigma2;
  // ||z - z'||^2 = 2 - 2 z^T z' on the sphere.
  k.psi = [sigma2](double t) { return std::exp(-(2.0 - 2.0 * t) / sigma2); };
  k.psi_prime = [sigma2](double t) {
    return (2.0 / sigma2) * std::exp(-(2.0 - 2.0 * t) / sigma2);
  };
  k.rho = 2.0 / sigma2;  // psi' is increasing, sup at t = 1 where psi = 1
  k.psi_one = 1.0;
  k.b = 1.0;
  k.m_k = 2.0 - 2.0 * std::exp(-4.0 / sigma2);
  check_constants(k);
  return k;
}

Kernel custom_kernel(const std::string& name, std::function<double(double)> psi,
                     std::function<double(double)> psi_prime, double rho,
                     std::map<std::string, double> params) {
  Kernel k;
  k.name = name;
  k.psi = std::move(psi);
  k.psi_prime = std::move(psi_prime);
  k.rho = rho;
  k.params = std::move(params);
  GridScan g = scan(k.psi, k.psi_prime);
  k.psi_one = k.psi(1.0);
  k.b = g.max_abs_psi;
  k.m_k = 2.0 * k.psi_one - 2.0 * g.min_psi;
  if (g.max_abs_prime > rho + 1e-9) {
    throw ConstructionError("custom kernel '" + name +
                            "': supplied rho is smaller than observed sup |psi'|");
  }
  return k;
}

Kernel kernel_by_name(const std::string& name,
                      const std::map<std::string, double>& params) {
  if (name == "linear") return linear_kernel();
  if (name == "quadratic") return quadratic_kernel();
  if (name == "gaussian") {
    auto it = params.find("sigma2");
    return gaussian_kernel(it == params.end() ? 1.0 : it->second);
  }
  throw ConstructionError("unknown kernel '" + name + "'");
}

namespace {

double checked_unit_dot(const Eigen::VectorXd& z, const Eigen::VectorXd& zp) {
  double nz = z.norm();
  double nzp = zp.norm();
  if (std::abs(nz - 1.0) > kUnitTol) {
    std::ostringstream msg;
    msg << "evaluate: first argument has norm " << nz << ", expected 1 within "
        << kUnitTol;
    throw PreconditionError(msg.str());
  }
  if (std::abs(nzp - 1.0) > kUnitTol) {
    std::ostringstream msg;
    msg << "evaluate: second argument has norm " << nzp << ", expected 1 within "
        << kUnitTol;
    throw PreconditionError(msg.str());
  }
  double dot = z.dot(zp) / (nz * nzp);
  return std::clamp(dot, -1.0, 1.0);
}

}  // namespace

double psi_at(const Kernel& kernel, double dot) {
  return kernel.psi(std::clamp(dot, -1.0, 1.0));
}

Eigen::MatrixXd psi_matrix(const Kernel& kernel, const Eigen::MatrixXd& dots) {
  Eigen::MatrixXd out(dots.rows(), dots.cols());
  for (Eigen::Index j = 0; j < dots.cols(); ++j)
    for (Eigen::Index i = 0; i < dots.rows(); ++i)
      out(i, j) = kernel.psi(std::clamp(dots(i, j), -1.0, 1.0));
  return out;
}

double evaluate(const Kernel& kernel, const Eigen::VectorXd& z,
                const Eigen::VectorXd& zp) {
  return kernel.psi(checked_unit_dot(z, zp));
}

double rkhs_sq_distance(const Kernel& kernel, const Eigen::VectorXd& z,
                        const Eigen::VectorXd& zp) {
  return 2.0 * kernel.psi_one - 2.0 * evaluate(kernel, z, zp);
}

}  // namespace kcl
