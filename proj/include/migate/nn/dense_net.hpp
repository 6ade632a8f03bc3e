//
// Copyright 2026 The migate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "migate/error.hpp"

namespace migate::nn {

using Index = Eigen::Index;

enum class Activation : std::uint8_t { kIdentity = 0, kRelu = 1 };

struct LayerShape {
  Index in = 0;
  Index out = 0;
  Activation activation = Activation::kIdentity;

  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

// Fully connected network whose parameters live in one flat vector, laid
// out layer by layer as [W_k (out x in, column-major), b_k]. Inputs are
// batched one sample per column.
template <typename Scalar_>
class DenseNet {
 public:
  using Scalar = Scalar_;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  // Activations of every layer for one batch; activations[0] is the input.
  struct Cache {
    std::vector<Matrix> activations;
  };

  DenseNet() = default;

  explicit DenseNet(std::vector<LayerShape> shapes) : shapes_(std::move(shapes)) {
    if (shapes_.empty()) throw DimensionError("a dense net needs at least one layer");
    Index offset = 0;
    for (std::size_t k = 0; k < shapes_.size(); ++k) {
      if (shapes_[k].in <= 0 || shapes_[k].out <= 0) {
        throw DimensionError("layer " + std::to_string(k) + " has a non-positive dimension");
      }
      if (k > 0 && shapes_[k].in != shapes_[k - 1].out) {
        throw DimensionError("layer " + std::to_string(k) + " input " +
                             std::to_string(shapes_[k].in) + " does not chain with output " +
                             std::to_string(shapes_[k - 1].out));
      }
      offsets_.push_back(offset);
      offset += shapes_[k].out * shapes_[k].in + shapes_[k].out;
    }
    params_ = Vector::Zero(offset);
  }

  // relu hidden layers, identity output.
  static DenseNet mlp(Index input_dim, std::span<const Index> hidden, Index output_dim) {
    std::vector<LayerShape> shapes;
    Index in = input_dim;
    for (Index width : hidden) {
      shapes.push_back({in, width, Activation::kRelu});
      in = width;
    }
    shapes.push_back({in, output_dim, Activation::kIdentity});
    return DenseNet(std::move(shapes));
  }

  Index input_dim() const { return shapes_.front().in; }
  Index output_dim() const { return shapes_.back().out; }
  std::size_t num_layers() const { return shapes_.size(); }
  Index num_parameters() const { return params_.size(); }
  const std::vector<LayerShape>& shapes() const { return shapes_; }

  Vector& parameters() { return params_; }
  const Vector& parameters() const { return params_; }

  Eigen::Map<Matrix> weight(std::size_t k) {
    return Eigen::Map<Matrix>(params_.data() + offsets_[k], shapes_[k].out, shapes_[k].in);
  }
  Eigen::Map<const Matrix> weight(std::size_t k) const {
    return Eigen::Map<const Matrix>(params_.data() + offsets_[k], shapes_[k].out, shapes_[k].in);
  }
  Eigen::Map<Vector> bias(std::size_t k) {
    return Eigen::Map<Vector>(params_.data() + offsets_[k] + shapes_[k].out * shapes_[k].in,
                              shapes_[k].out);
  }
  Eigen::Map<const Vector> bias(std::size_t k) const {
    return Eigen::Map<const Vector>(
        params_.data() + offsets_[k] + shapes_[k].out * shapes_[k].in, shapes_[k].out);
  }

  // He-style uniform fan-in initialisation, zero biases.
  template <typename Rng>
  void initialize(Rng& rng) {
    for (std::size_t k = 0; k < shapes_.size(); ++k) {
      const double limit = std::sqrt(6.0 / static_cast<double>(shapes_[k].in));
      std::uniform_real_distribution<double> dist(-limit, limit);
      auto w = weight(k);
      for (Index j = 0; j < w.cols(); ++j) {
        for (Index i = 0; i < w.rows(); ++i) w(i, j) = static_cast<Scalar>(dist(rng));
      }
      bias(k).setZero();
    }
  }

  Matrix forward(const Eigen::Ref<const Matrix>& x, Cache* cache = nullptr) const {
    if (x.rows() != input_dim()) {
      throw DimensionError("input has " + std::to_string(x.rows()) + " rows, net expects " +
                           std::to_string(input_dim()));
    }
    if (cache != nullptr) {
      cache->activations.resize(shapes_.size() + 1);
      cache->activations[0] = x;
    }
    Matrix current = x;
    for (std::size_t k = 0; k < shapes_.size(); ++k) {
      Matrix next = weight(k) * current;
      next.colwise() += bias(k);
      if (shapes_[k].activation == Activation::kRelu) next = next.cwiseMax(Scalar(0));
      current = std::move(next);
      if (cache != nullptr) cache->activations[k + 1] = current;
    }
    return current;
  }

  Vector forward_one(const Eigen::Ref<const Vector>& x) const {
    return forward(Matrix(x)).col(0);
  }

  // Accumulates dLoss/dParams into grad given dLoss/dOutput for the batch
  // recorded in cache.
  void backward(const Cache& cache, Matrix d_out, Eigen::Ref<Vector> grad) const {
    if (grad.size() != num_parameters()) throw DimensionError("gradient size mismatch");
    Matrix delta = std::move(d_out);
    for (std::size_t k = shapes_.size(); k-- > 0;) {
      if (shapes_[k].activation == Activation::kRelu) {
        delta = delta.cwiseProduct(
            (cache.activations[k + 1].array() > Scalar(0)).template cast<Scalar>().matrix());
      }
      const Index w_size = shapes_[k].out * shapes_[k].in;
      Eigen::Map<Matrix> d_w(grad.data() + offsets_[k], shapes_[k].out, shapes_[k].in);
      d_w.noalias() += delta * cache.activations[k].transpose();
      grad.segment(offsets_[k] + w_size, shapes_[k].out) += delta.rowwise().sum();
      if (k > 0) delta = weight(k).transpose() * delta;
    }
  }

  bool all_finite() const { return params_.allFinite(); }

  template <typename Other>
  DenseNet<Other> cast() const {
    DenseNet<Other> out(shapes_);
    out.parameters() = params_.template cast<Other>();
    return out;
  }

 private:
  std::vector<LayerShape> shapes_;
  std::vector<Index> offsets_;
  Vector params_;
};

}  // namespace migate::nn
