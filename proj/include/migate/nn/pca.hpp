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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "migate/error.hpp"

namespace migate::nn {

// Principal components of row-per-sample data. Rows of `components` are
// orthonormal, sorted by non-increasing explained variance, and signed so
// that each row's largest-magnitude entry is positive.
template <typename Scalar_>
struct PcaModel {
  using Scalar = Scalar_;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector mean;
  Matrix components;  // k x d
  Vector explained_variance;

  Eigen::Index input_dim() const { return mean.size(); }
  Eigen::Index output_dim() const { return components.rows(); }
};

struct PcaOptions {
  // Above this dimension the covariance eigendecomposition gives way to a
  // randomized SVD of the centred data.
  Eigen::Index exact_max_dim = 4096;
  int oversampling = 10;
  int power_iterations = 4;
  std::uint64_t seed = 42;
};

namespace detail {

template <typename Scalar>
void canonicalize_signs(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& rows) {
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    Eigen::Index arg = 0;
    rows.row(i).cwiseAbs().maxCoeff(&arg);
    if (rows(i, arg) < Scalar(0)) rows.row(i) *= Scalar(-1);
  }
}

template <typename Scalar>
void check_rank(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& variances, Scalar scale) {
  const Scalar tol = std::max(scale, Scalar(1)) * Scalar(1e-10);
  for (Eigen::Index i = 0; i < variances.size(); ++i) {
    if (!(variances(i) > tol)) {
      throw RankError("pca: component " + std::to_string(i + 1) +
                      " has zero variance; data rank is " + std::to_string(i));
    }
  }
}

}  // namespace detail

template <typename Derived>
PcaModel<typename Derived::Scalar> pca_fit(const Eigen::MatrixBase<Derived>& x, Eigen::Index k,
                                           const PcaOptions& options = {}) {
  using Scalar = typename Derived::Scalar;
  using Matrix = typename PcaModel<Scalar>::Matrix;
  using Vector = typename PcaModel<Scalar>::Vector;
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n < 2) throw DimensionError("pca: need at least two samples");
  if (k < 1 || k > std::min(n, d)) {
    throw DimensionError("pca: k=" + std::to_string(k) + " outside [1, min(N, d)=" +
                         std::to_string(std::min(n, d)) + "]");
  }

  PcaModel<Scalar> model;
  model.mean = x.colwise().mean().transpose();
  const Matrix centered = x.rowwise() - model.mean.transpose();
  const Scalar denom = static_cast<Scalar>(n - 1);

  if (d <= options.exact_max_dim) {
    const Matrix cov = (centered.transpose() * centered) / denom;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
    if (solver.info() != Eigen::Success) throw NumericalError("pca: eigendecomposition failed");
    // Eigen sorts ascending; take the top k from the end.
    model.components = solver.eigenvectors().rightCols(k).rowwise().reverse().transpose();
    model.explained_variance = solver.eigenvalues().tail(k).reverse();
    detail::check_rank<Scalar>(model.explained_variance, solver.eigenvalues().cwiseAbs().maxCoeff());
  } else {
    const Eigen::Index sketch = std::min<Eigen::Index>(k + options.oversampling, std::min(n, d));
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix omega(d, sketch);
    for (Eigen::Index j = 0; j < sketch; ++j) {
      for (Eigen::Index i = 0; i < d; ++i) omega(i, j) = static_cast<Scalar>(gauss(rng));
    }
    Matrix basis = Eigen::HouseholderQR<Matrix>(centered * omega).householderQ() *
                   Matrix::Identity(n, sketch);
    for (int it = 0; it < options.power_iterations; ++it) {
      Matrix z = Eigen::HouseholderQR<Matrix>(centered.transpose() * basis).householderQ() *
                 Matrix::Identity(d, sketch);
      basis = Eigen::HouseholderQR<Matrix>(centered * z).householderQ() *
              Matrix::Identity(n, sketch);
    }
    const Matrix projected = basis.transpose() * centered;
    Eigen::BDCSVD<Matrix> svd(projected, Eigen::ComputeThinV);
    model.components = svd.matrixV().leftCols(k).transpose();
    model.explained_variance = svd.singularValues().head(k).cwiseAbs2() / denom;
    const Vector all = svd.singularValues().cwiseAbs2() / denom;
    detail::check_rank<Scalar>(model.explained_variance, all.size() > 0 ? all.maxCoeff() : Scalar(0));
  }
  detail::canonicalize_signs(model.components);
  return model;
}

template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> pca_transform(
    const PcaModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  if (x.cols() != model.input_dim()) {
    throw DimensionError("pca_transform: data has " + std::to_string(x.cols()) +
                         " columns, model expects " + std::to_string(model.input_dim()));
  }
  return (x.template cast<Scalar>().rowwise() - model.mean.transpose()) *
         model.components.transpose();
}

}  // namespace migate::nn
