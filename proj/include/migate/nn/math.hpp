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
#include <limits>

#include <Eigen/Core>

namespace migate::nn {

// log(sum(exp(v))) with the max shifted out; -inf for an all -inf input.
template <typename Derived>
typename Derived::Scalar logsumexp(const Eigen::DenseBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Scalar peak = v.maxCoeff();
  if (!std::isfinite(peak)) return peak;
  return peak + std::log((v.derived().array() - peak).exp().sum());
}

// Column-wise logsumexp of a (classes x samples) matrix.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 1, Eigen::Dynamic> logsumexp_cols(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> out(m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) out(c) = logsumexp(m.col(c));
  return out;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> log_softmax_cols(
    const Eigen::MatrixBase<Derived>& logits) {
  auto lse = logsumexp_cols(logits);
  return logits.rowwise() - lse;
}

template <typename Scalar>
Scalar softplus(Scalar x) {
  return std::max(x, Scalar(0)) + std::log1p(std::exp(-std::abs(x)));
}

// Inverse of softplus for y > 0.
template <typename Scalar>
Scalar softplus_inverse(Scalar y) {
  if (y > Scalar(30)) return y;
  return std::log(std::expm1(y));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  if (x >= 0) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

}  // namespace migate::nn
