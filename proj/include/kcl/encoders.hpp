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
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "kcl/kernels.hpp"
#include "kcl/similarity.hpp"
#include "kcl/worlds.hpp"

namespace kcl {

/// Pre-normalization outputs below this floor raise DegenerateEncoderError:
/// the normalized encoder is only well defined when inf ||f0(x)|| > 0.
constexpr double kNormFloor = 1e-6;

/// Threshold on Delta_min(f) below which an encoder counts as collapsed.
constexpr double kMeaningfulTol = 1e-8;

/// Sphere-valued encoder f(x) = f0(x) / ||f0(x)||. Implementations expose a
/// flat parameter vector and accumulate analytic parameter gradients given
/// dLoss/df(x), with the normalization Jacobian handled here.
class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual int dim() const = 0;
  virtual Eigen::VectorXd raw_output(const FiniteWorld& world, int point) const = 0;
  virtual Eigen::VectorXd params() const = 0;
  virtual void set_params(const Eigen::VectorXd& p) = 0;
  virtual int param_count() const = 0;
  /// Adds d(loss)/d(params) to `grad` given g = d(loss)/d f(point), where f
  /// is the normalized output.
  virtual void accumulate_param_grad(const FiniteWorld& world, int point,
                                     const Eigen::VectorXd& g,
                                     Eigen::VectorXd& grad) const = 0;
  virtual std::unique_ptr<Encoder> clone() const = 0;
  virtual nlohmann::json to_json() const = 0;

  /// Normalized output; throws DegenerateEncoderError when ||f0(x)|| falls
  /// below the norm floor.
  Eigen::VectorXd encode(const FiniteWorld& world, int point) const;

 protected:
  /// Chain rule through v -> v/||v||: returns d(loss)/dv from g = d(loss)/df.
  static Eigen::VectorXd normalize_backward(const Eigen::VectorXd& raw,
                                            const Eigen::VectorXd& g);
};

/// One free d-vector per world point.
class TableEncoder : public Encoder {
 public:
  TableEncoder(Eigen::MatrixXd vectors);
  static TableEncoder random(int n_points, int d, std::uint64_t seed);

  int dim() const override { return static_cast<int>(vectors_.cols()); }
  Eigen::VectorXd raw_output(const FiniteWorld& world, int point) const override;
  Eigen::VectorXd params() const override;
  void set_params(const Eigen::VectorXd& p) override;
  int param_count() const override;
  void accumulate_param_grad(const FiniteWorld& world, int point,
                             const Eigen::VectorXd& g,
                             Eigen::VectorXd& grad) const override;
  std::unique_ptr<Encoder> clone() const override;
  nlohmann::json to_json() const override;

  /// Projects every parameter row back onto the sphere (projected gradient).
  void renormalize_rows();
  const Eigen::MatrixXd& vectors() const { return vectors_; }

 private:
  Eigen::MatrixXd vectors_;  // n_points x d
};

/// Tiny MLP on point coordinates: tanh hidden layers, affine output, then
/// the sphere normalization.
class MlpEncoder : public Encoder {
 public:
  MlpEncoder(std::vector<Eigen::MatrixXd> weights,
             std::vector<Eigen::VectorXd> biases);
  /// Uniform fan-in initialization; `layer_dims` = {input, hidden..., output}.
  static MlpEncoder random(const std::vector<int>& layer_dims,
                           std::uint64_t seed);

  int dim() const override;
  Eigen::VectorXd raw_output(const FiniteWorld& world, int point) const override;
  Eigen::VectorXd params() const override;
  void set_params(const Eigen::VectorXd& p) override;
  int param_count() const override;
  void accumulate_param_grad(const FiniteWorld& world, int point,
                             const Eigen::VectorXd& g,
                             Eigen::VectorXd& grad) const override;
  std::unique_ptr<Encoder> clone() const override;
  nlohmann::json to_json() const override;

 private:
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

std::unique_ptr<Encoder> encoder_from_json(const nlohmann::json& j);

/// All encoded points as rows of an N x d matrix.
Eigen::MatrixXd encode_all(const Encoder& encoder, const FiniteWorld& world);

struct Meaningfulness {
  bool meaningful = false;
  double delta_min = 0.0;
};

/// Delta_min(f) = min_{i != j} ||mu_i(f) - mu_j(f)||^2_H; meaningful iff it
/// exceeds the collapse threshold. Throws for K = 1 (no pair exists).
Meaningfulness is_meaningful(const Encoder& encoder, const FiniteWorld& world,
                             const ClusterStructure& structure,
                             const Kernel& kernel);
Meaningfulness is_meaningful(const Eigen::MatrixXd& features,
                             const FiniteWorld& world,
                             const ClusterStructure& structure,
                             const Kernel& kernel);

}  // namespace kcl
