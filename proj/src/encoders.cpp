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

#include "kcl/encoders.hpp"

#include <cmath>

#include "kcl/errors.hpp"
#include "kcl/geometry.hpp"
#include "kcl/random.hpp"

namespace kcl {

Eigen::VectorXd Encoder::encode(const FiniteWorld& world, int point) const {
  Eigen::VectorXd raw = raw_output(world, point);
  double norm = raw.norm();
  if (norm < kNormFloor)
    throw DegenerateEncoderError("pre-normalization norm " + std::to_string(norm) +
                                 " below floor at point " + std::to_string(point));
  return raw / norm;
}

Eigen::VectorXd Encoder::normalize_backward(const Eigen::VectorXd& raw,
                                            const Eigen::VectorXd& g) {
  double norm = raw.norm();
  Eigen::VectorXd f = raw / norm;
  return (g - f * g.dot(f)) / norm;
}

// ---------------------------------------------------------------------------
// TableEncoder

TableEncoder::TableEncoder(Eigen::MatrixXd vectors)
    : vectors_(std::move(vectors)) {}

TableEncoder TableEncoder::random(int n_points, int d, std::uint64_t seed) {
  auto rng = make_rng(seed);
  Eigen::MatrixXd v(n_points, d);
  for (int i = 0; i < n_points; ++i) v.row(i) = unit_vector(d, rng).transpose();
  return TableEncoder(std::move(v));
}

Eigen::VectorXd TableEncoder::raw_output(const FiniteWorld& world,
                                         int point) const {
  if (point < 0 || point >= world.size() || point >= vectors_.rows())
    throw PreconditionError("point index out of range for table encoder");
  return vectors_.row(point).transpose();
}

Eigen::VectorXd TableEncoder::params() const {
  return Eigen::Map<const Eigen::VectorXd>(vectors_.data(), vectors_.size());
}

void TableEncoder::set_params(const Eigen::VectorXd& p) {
  if (p.size() != vectors_.size())
    throw PreconditionError("parameter size mismatch for table encoder");
  vectors_ = Eigen::Map<const Eigen::MatrixXd>(p.data(), vectors_.rows(),
                                               vectors_.cols());
}

int TableEncoder::param_count() const {
  return static_cast<int>(vectors_.size());
}

void TableEncoder::accumulate_param_grad(const FiniteWorld& world, int point,
                                         const Eigen::VectorXd& g,
                                         Eigen::VectorXd& grad) const {
  (void)world;
  Eigen::VectorXd raw = vectors_.row(point).transpose();
  Eigen::VectorXd dv = normalize_backward(raw, g);
  // Column-major layout: entry (point, j) lives at j * rows + point.
  const Eigen::Index rows = vectors_.rows();
  for (Eigen::Index j = 0; j < vectors_.cols(); ++j)
    grad(j * rows + point) += dv(j);
}

std::unique_ptr<Encoder> TableEncoder::clone() const {
  return std::make_unique<TableEncoder>(*this);
}

nlohmann::json TableEncoder::to_json() const {
  nlohmann::json j;
  j["kind"] = "table";
  j["d"] = dim();
  j["vectors"] = nlohmann::json::array();
  for (Eigen::Index i = 0; i < vectors_.rows(); ++i) {
    std::vector<double> row(static_cast<size_t>(vectors_.cols()));
    for (Eigen::Index c = 0; c < vectors_.cols(); ++c)
      row[static_cast<size_t>(c)] = vectors_(i, c);
    j["vectors"].push_back(row);
  }
  return j;
}

void TableEncoder::renormalize_rows() {
  for (Eigen::Index i = 0; i < vectors_.rows(); ++i) {
    double n = vectors_.row(i).norm();
    if (n > kNormFloor) vectors_.row(i) /= n;
  }
}

// ---------------------------------------------------------------------------
// MlpEncoder

MlpEncoder::MlpEncoder(std::vector<Eigen::MatrixXd> weights,
                       std::vector<Eigen::VectorXd> biases)
    : weights_(std::move(weights)), biases_(std::move(biases)) {
  if (weights_.empty() || weights_.size() != biases_.size())
    throw PreconditionError("MLP needs matching weight and bias lists");
}

MlpEncoder MlpEncoder::random(const std::vector<int>& layer_dims,
                              std::uint64_t seed) {
  if (layer_dims.size() < 2)
    throw PreconditionError("MLP needs at least input and output dims");
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  for (size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    int in = layer_dims[l];
    int out = layer_dims[l + 1];
    double scale = 1.0 / std::sqrt(static_cast<double>(in));
    Eigen::MatrixXd w(out, in);
    Eigen::VectorXd b(out);
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) w(r, c) = scale * unif(rng);
      b(r) = scale * unif(rng);
    }
    weights.push_back(std::move(w));
    biases.push_back(std::move(b));
  }
  return MlpEncoder(std::move(weights), std::move(biases));
}

int MlpEncoder::dim() const {
  return static_cast<int>(weights_.back().rows());
}

Eigen::VectorXd MlpEncoder::raw_output(const FiniteWorld& world,
                                       int point) const {
  if (point < 0 || point >= world.size())
    throw PreconditionError("point index out of range for MLP encoder");
  Eigen::VectorXd a = world.points[static_cast<size_t>(point)].coords;
  if (a.size() != weights_.front().cols())
    throw PreconditionError("world coordinate dimension does not match MLP input");
  for (size_t l = 0; l < weights_.size(); ++l) {
    a = weights_[l] * a + biases_[l];
    if (l + 1 < weights_.size()) a = a.array().tanh().matrix();
  }
  return a;
}

Eigen::VectorXd MlpEncoder::params() const {
  Eigen::VectorXd p(param_count());
  Eigen::Index at = 0;
  for (size_t l = 0; l < weights_.size(); ++l) {
    p.segment(at, weights_[l].size()) =
        Eigen::Map<const Eigen::VectorXd>(weights_[l].data(), weights_[l].size());
    at += weights_[l].size();
    p.segment(at, biases_[l].size()) = biases_[l];
    at += biases_[l].size();
  }
  return p;
}

void MlpEncoder::set_params(const Eigen::VectorXd& p) {
  if (p.size() != param_count())
    throw PreconditionError("parameter size mismatch for MLP encoder");
  Eigen::Index at = 0;
  for (size_t l = 0; l < weights_.size(); ++l) {
    weights_[l] = Eigen::Map<const Eigen::MatrixXd>(
        p.data() + at, weights_[l].rows(), weights_[l].cols());
    at += weights_[l].size();
    biases_[l] = p.segment(at, biases_[l].size());
    at += biases_[l].size();
  }
}

int MlpEncoder::param_count() const {
  Eigen::Index total = 0;
  for (size_t l = 0; l < weights_.size(); ++l)
    total += weights_[l].size() + biases_[l].size();
  return static_cast<int>(total);
}

void MlpEncoder::accumulate_param_grad(const FiniteWorld& world, int point,
                                       const Eigen::VectorXd& g,
                                       Eigen::VectorXd& grad) const {
  // Forward pass with cached activations.
  std::vector<Eigen::VectorXd> activations;  // a^0 .. a^{L}
  activations.push_back(world.points[static_cast<size_t>(point)].coords);
  for (size_t l = 0; l < weights_.size(); ++l) {
    Eigen::VectorXd z = weights_[l] * activations.back() + biases_[l];
    if (l + 1 < weights_.size()) z = z.array().tanh().matrix();
    activations.push_back(std::move(z));
  }

  Eigen::VectorXd delta = normalize_backward(activations.back(), g);
  Eigen::Index at = param_count();
  for (size_t l = weights_.size(); l-- > 0;) {
    // delta is d(loss)/d z^l where z^l is this layer's pre-activation output
    // (tanh already undone for hidden layers below).
    at -= biases_[l].size();
    grad.segment(at, biases_[l].size()) += delta;
    at -= weights_[l].size();
    Eigen::MatrixXd wgrad = delta * activations[l].transpose();
    grad.segment(at, weights_[l].size()) +=
        Eigen::Map<const Eigen::VectorXd>(wgrad.data(), wgrad.size());
    if (l > 0) {
      Eigen::VectorXd upstream = weights_[l].transpose() * delta;
      // activations[l] = tanh(z^{l-1}); tanh' = 1 - tanh^2.
      delta = (upstream.array() *
               (1.0 - activations[l].array().square()))
                  .matrix();
    }
  }
}

std::unique_ptr<Encoder> MlpEncoder::clone() const {
  return std::make_unique<MlpEncoder>(*this);
}

nlohmann::json MlpEncoder::to_json() const {
  nlohmann::json j;
  j["kind"] = "mlp";
  j["d"] = dim();
  j["layers"] = nlohmann::json::array();
  for (size_t l = 0; l < weights_.size(); ++l) {
    nlohmann::json layer;
    layer["rows"] = weights_[l].rows();
    layer["cols"] = weights_[l].cols();
    std::vector<double> w(weights_[l].data(),
                          weights_[l].data() + weights_[l].size());
    std::vector<double> b(biases_[l].data(),
                          biases_[l].data() + biases_[l].size());
    layer["weight"] = w;
    layer["bias"] = b;
    j["layers"].push_back(layer);
  }
  return j;
}

std::unique_ptr<Encoder> encoder_from_json(const nlohmann::json& j) {
  std::string kind = j.at("kind");
  if (kind == "table") {
    const auto& rows = j.at("vectors");
    int n = static_cast<int>(rows.size());
    int d = j.at("d");
    Eigen::MatrixXd v(n, d);
    for (int i = 0; i < n; ++i) {
      auto row = rows.at(static_cast<size_t>(i)).get<std::vector<double>>();
      if (static_cast<int>(row.size()) != d)
        throw SchemaError("table encoder row has wrong width");
      for (int c = 0; c < d; ++c) v(i, c) = row[static_cast<size_t>(c)];
    }
    return std::make_unique<TableEncoder>(std::move(v));
  }
  if (kind == "mlp") {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    for (const auto& layer : j.at("layers")) {
      int rows = layer.at("rows");
      int cols = layer.at("cols");
      auto w = layer.at("weight").get<std::vector<double>>();
      auto b = layer.at("bias").get<std::vector<double>>();
      if (static_cast<int>(w.size()) != rows * cols ||
          static_cast<int>(b.size()) != rows)
        throw SchemaError("mlp layer has inconsistent sizes");
      weights.push_back(
          Eigen::Map<const Eigen::MatrixXd>(w.data(), rows, cols));
      biases.push_back(Eigen::Map<const Eigen::VectorXd>(b.data(), rows));
    }
    return std::make_unique<MlpEncoder>(std::move(weights), std::move(biases));
  }
  throw SchemaError("unknown encoder kind '" + kind + "'");
}

Eigen::MatrixXd encode_all(const Encoder& encoder, const FiniteWorld& world) {
  Eigen::MatrixXd f(world.size(), encoder.dim());
  for (int x = 0; x < world.size(); ++x)
    f.row(x) = encoder.encode(world, x).transpose();
  return f;
}

Meaningfulness is_meaningful(const Eigen::MatrixXd& features,
                             const FiniteWorld& world,
                             const ClusterStructure& structure,
                             const Kernel& kernel) {
  if (structure.cluster_count() < 2)
    throw PreconditionError(
        "meaningfulness needs K >= 2 (no pair of cluster means exists)");
  ClusterGeometry geo = cluster_geometry(world, features, kernel, structure);
  return {geo.delta_min > kMeaningfulTol, geo.delta_min};
}

Meaningfulness is_meaningful(const Encoder& encoder, const FiniteWorld& world,
                             const ClusterStructure& structure,
                             const Kernel& kernel) {
  return is_meaningful(encode_all(encoder, world), world, structure, kernel);
}

}  // namespace kcl
