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

#include <Eigen/Core>

namespace migate::nn {

// Per-dimension standardisation fitted on column-per-sample data.
// Dimensions with (near) zero spread are centred but not rescaled.
template <typename Scalar>
struct Standardizer {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector mean;
  Vector inv_std;

  static Standardizer fit(const Matrix& x) {
    Standardizer s;
    s.mean = x.rowwise().mean();
    const Vector var = (x.colwise() - s.mean).cwiseAbs2().rowwise().mean();
    s.inv_std = var.unaryExpr([](Scalar v) {
      return v > Scalar(1e-12) ? Scalar(1) / std::sqrt(v) : Scalar(1);
    });
    return s;
  }

  Matrix apply(const Matrix& x) const {
    return (x.colwise() - mean).array().colwise() * inv_std.array();
  }
};

}  // namespace migate::nn
