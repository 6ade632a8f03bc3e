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
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "migate/error.hpp"
#include "migate/log.hpp"
#include "migate/nn/math.hpp"
#include "migate/nn/train.hpp"

namespace migate::entropy {

using Eigen::Index;

// Mixture of K full-covariance Gaussians, Sigma_k = L_k L_k^T, with L_k
// lower triangular. Parameters are stored flat as
//   [logits (K) | means (d x K, column per component) | raw L entries]
// where each L_k is packed row-major over its lower triangle and diagonal
// entries pass through softplus(raw) + kDiagonalFloor.
template <typename Scalar_>
class GmmEntropyModel {
 public:
  using Scalar = Scalar_;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  static constexpr double kDiagonalFloor = 1e-4;

  GmmEntropyModel() = default;
  GmmEntropyModel(Index components, Index dim) : k_(components), d_(dim) {
    if (components <= 0 || dim <= 0) throw DimensionError("gmm: K and d must be positive");
    params_ = Vector::Zero(k_ + k_ * d_ + k_ * tri_size());
  }

  Index num_components() const { return k_; }
  Index dim() const { return d_; }
  Index tri_size() const { return d_ * (d_ + 1) / 2; }
  static Index tri_index(Index row, Index col) { return row * (row + 1) / 2 + col; }

  Vector& parameters() { return params_; }
  const Vector& parameters() const { return params_; }

  auto logits() { return params_.head(k_); }
  auto logits() const { return params_.head(k_); }
  Eigen::Map<Matrix> means() { return Eigen::Map<Matrix>(params_.data() + k_, d_, k_); }
  Eigen::Map<const Matrix> means() const {
    return Eigen::Map<const Matrix>(params_.data() + k_, d_, k_);
  }
  auto raw_scale(Index k) { return params_.segment(k_ + k_ * d_ + k * tri_size(), tri_size()); }
  auto raw_scale(Index k) const {
    return params_.segment(k_ + k_ * d_ + k * tri_size(), tri_size());
  }

  Vector mixture_weights() const {
    const Vector w = (logits().array() - nn::logsumexp(logits())).exp();
    return w;
  }

  Matrix scale_factor(Index k) const {
    Matrix l = Matrix::Zero(d_, d_);
    const auto raw = raw_scale(k);
    for (Index i = 0; i < d_; ++i) {
      for (Index j = 0; j < i; ++j) l(i, j) = raw(tri_index(i, j));
      l(i, i) = nn::softplus(raw(tri_index(i, i))) + static_cast<Scalar>(kDiagonalFloor);
    }
    return l;
  }

  Matrix covariance(Index k) const {
    const Matrix l = scale_factor(k);
    return l * l.transpose();
  }

  // Sets L_k directly; diagonal entries must exceed kDiagonalFloor.
  void set_scale_factor(Index k, const Matrix& l) {
    auto raw = raw_scale(k);
    for (Index i = 0; i < d_; ++i) {
      for (Index j = 0; j < i; ++j) raw(tri_index(i, j)) = l(i, j);
      const Scalar diag = l(i, i) - static_cast<Scalar>(kDiagonalFloor);
      if (!(diag > Scalar(0))) throw DomainError("gmm: scale diagonal must exceed the floor");
      raw(tri_index(i, i)) = nn::softplus_inverse(diag);
    }
  }

 private:
  Index k_ = 0;
  Index d_ = 0;
  Vector params_;
};

namespace detail {

template <typename Scalar>
constexpr Scalar half_log_two_pi() {
  return static_cast<Scalar>(0.5 * std::log(2.0 * std::numbers::pi));
}

// Per-component log(pi_k) + log N(x; mu_k, Sigma_k) for every column of x,
// returned as a K x N matrix. Optionally keeps the whitened residuals.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> component_log_terms(
    const GmmEntropyModel<Scalar>& model,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& x,
    std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>* whitened = nullptr,
    std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>* factors = nullptr) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Index k_count = model.num_components();
  const Index d = model.dim();
  if (x.rows() != d) {
    throw DimensionError("gmm: sample has " + std::to_string(x.rows()) + " dims, model has " +
                         std::to_string(d));
  }
  const Scalar log_norm = nn::logsumexp(model.logits());
  Matrix terms(k_count, x.cols());
  if (whitened != nullptr) whitened->resize(static_cast<std::size_t>(k_count));
  if (factors != nullptr) factors->resize(static_cast<std::size_t>(k_count));
  for (Index k = 0; k < k_count; ++k) {
    Matrix l = model.scale_factor(k);
    Matrix z = x.colwise() - model.means().col(k);
    l.template triangularView<Eigen::Lower>().solveInPlace(z);
    const Scalar log_det = l.diagonal().array().log().sum();
    terms.row(k) = (Scalar(-0.5) * z.colwise().squaredNorm()).array() - log_det -
                   static_cast<Scalar>(d) * half_log_two_pi<Scalar>() +
                   (model.logits()(k) - log_norm);
    if (whitened != nullptr) (*whitened)[static_cast<std::size_t>(k)] = std::move(z);
    if (factors != nullptr) (*factors)[static_cast<std::size_t>(k)] = std::move(l);
  }
  return terms;
}

}  // namespace detail

// log p(x) for every column of x.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> log_density_batch(
    const GmmEntropyModel<Scalar>& model,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& x) {
  const auto terms = detail::component_log_terms(model, x);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(x.cols());
  for (Index n = 0; n < x.cols(); ++n) out(n) = nn::logsumexp(terms.col(n));
  if (!out.allFinite()) throw NumericalError("gmm: non-finite log density");
  return out;
}

template <typename Scalar>
Scalar log_density(const GmmEntropyModel<Scalar>& model,
                   const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& x) {
  return log_density_batch(model, Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(x))(0);
}

// Pointwise entropy h(x) = -log p(x), in nats.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> pointwise_entropy_batch(
    const GmmEntropyModel<Scalar>& model,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& x) {
  return -log_density_batch(model, x);
}

template <typename Scalar>
Scalar pointwise_entropy(const GmmEntropyModel<Scalar>& model,
                         const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& x) {
  return -log_density(model, x);
}

// Mean negative log-likelihood over the columns of x. When grad is given,
// the gradient with respect to model.parameters() is added into it.
template <typename Scalar>
double mean_nll(const GmmEntropyModel<Scalar>& model,
                const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& x,
                Eigen::Matrix<Scalar, Eigen::Dynamic, 1>* grad = nullptr) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Index batch = x.cols();
  if (batch == 0) throw DimensionError("gmm: empty batch");
  std::vector<Matrix> whitened;
  std::vector<Matrix> factors;
  const Matrix terms = detail::component_log_terms(model, x, grad ? &whitened : nullptr,
                                                   grad ? &factors : nullptr);
  const auto lse = nn::logsumexp_cols(terms);
  const double loss = -static_cast<double>(lse.sum()) / static_cast<double>(batch);
  if (grad == nullptr) return loss;

  const Index k_count = model.num_components();
  const Index d = model.dim();
  const Scalar inv_batch = Scalar(1) / static_cast<Scalar>(batch);
  // Responsibilities scaled by 1/B.
  const Matrix resp = ((terms.rowwise() - lse).array().exp() * inv_batch).matrix();
  const Vector weights = model.mixture_weights();

  Vector& g = *grad;
  g.head(k_count) += weights - resp.rowwise().sum();
  for (Index k = 0; k < k_count; ++k) {
    const Matrix& l = factors[static_cast<std::size_t>(k)];
    const Matrix& z = whitened[static_cast<std::size_t>(k)];
    const Matrix w = l.transpose().template triangularView<Eigen::Upper>().solve(z);
    const auto r = resp.row(k).transpose();
    g.segment(k_count + k * d, d) -= w * r;

    const Matrix d_l = -(w * r.asDiagonal() * z.transpose());
    const Scalar mass = r.sum();
    const auto raw = model.raw_scale(k);
    auto g_raw = g.segment(k_count + k_count * d + k * model.tri_size(), model.tri_size());
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < i; ++j) g_raw(model.tri_index(i, j)) += d_l(i, j);
      const Index t = model.tri_index(i, i);
      g_raw(t) += (d_l(i, i) + mass / l(i, i)) * nn::sigmoid(raw(t));
    }
  }
  return loss;
}

// Initial mixture: means at K distinct data points chosen by seeded sampling,
// L_k = diag(per-dimension data std), equal weights.
template <typename Scalar>
GmmEntropyModel<Scalar> initialize_gmm(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& samples, Index components,
    std::uint64_t seed) {
  const Index d = samples.rows();
  const Index n = samples.cols();
  if (n < components) {
    throw DimensionError("gmm: need at least K=" + std::to_string(components) + " samples, got " +
                         std::to_string(n));
  }
  GmmEntropyModel<Scalar> model(components, d);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::unordered_set<Index> chosen;
  for (Index k = 0; k < components; ++k) {
    Index idx = pick(rng);
    while (!chosen.insert(idx).second) idx = pick(rng);
    model.means().col(k) = samples.col(idx);
  }
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mean = samples.rowwise().mean();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> stddev =
      ((samples.colwise() - mean).cwiseAbs2().rowwise().sum() / static_cast<Scalar>(n))
          .cwiseSqrt();
  const auto floor = static_cast<Scalar>(GmmEntropyModel<Scalar>::kDiagonalFloor);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> l =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(d, d);
  for (Index i = 0; i < d; ++i) {
    if (stddev(i) <= Scalar(10) * floor) {
      log().warn("gmm: dimension {} has spread {:.3g}; scale will be held at the softplus floor", i,
                 static_cast<double>(stddev(i)));
    }
    l(i, i) = std::max(stddev(i), Scalar(2) * floor);
  }
  for (Index k = 0; k < components; ++k) model.set_scale_factor(k, l);
  return model;
}

template <typename Scalar>
struct GmmSetFit {
  std::vector<GmmEntropyModel<Scalar>> models;
  nn::TrainHistory history;
};

// Fits one mixture per aligned sample set, all at once: the objective is the
// sum of the per-set mean NLLs, the sets share minibatch indices, and early
// stopping watches the summed validation NLL. Sample sets are column-per-
// sample and must have equal column counts (likewise the validation sets).
template <typename Scalar>
GmmSetFit<Scalar> fit_set(
    std::span<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> train_sets,
    std::span<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> validation_sets,
    const nn::TrainConfig& cfg, Index components) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (train_sets.empty()) throw DimensionError("gmm: no sample sets to fit");
  if (validation_sets.size() != train_sets.size()) {
    throw DimensionError("gmm: validation sets must pair with training sets");
  }
  const Index n = train_sets.front().cols();
  for (std::size_t m = 0; m < train_sets.size(); ++m) {
    if (train_sets[m].cols() != n || validation_sets[m].cols() != validation_sets.front().cols()) {
      throw DimensionError("gmm: sample sets are not aligned");
    }
    if (validation_sets[m].rows() != train_sets[m].rows()) {
      throw DimensionError("gmm: validation dims differ from training dims");
    }
  }

  GmmSetFit<Scalar> result;
  std::vector<Index> offsets;
  Index total = 0;
  for (std::size_t m = 0; m < train_sets.size(); ++m) {
    result.models.push_back(
        initialize_gmm<Scalar>(train_sets[m], components, cfg.seed + static_cast<std::uint64_t>(m)));
    offsets.push_back(total);
    total += result.models.back().parameters().size();
  }
  Vector params(total);
  for (std::size_t m = 0; m < result.models.size(); ++m) {
    params.segment(offsets[m], result.models[m].parameters().size()) =
        result.models[m].parameters();
  }

  // Scratch copies the objective loads parameters into.
  std::vector<GmmEntropyModel<Scalar>> work = result.models;
  auto load = [&](const Vector& p) {
    for (std::size_t m = 0; m < work.size(); ++m) {
      work[m].parameters() = p.segment(offsets[m], work[m].parameters().size());
    }
  };

  nn::Objective<Scalar> objective;
  objective.batch_loss = [&](const Vector& p, std::span<const Index> batch, Vector& grad) {
    load(p);
    double loss = 0.0;
    for (std::size_t m = 0; m < work.size(); ++m) {
      const Matrix& data = train_sets[m];
      Matrix x(data.rows(), static_cast<Index>(batch.size()));
      for (std::size_t b = 0; b < batch.size(); ++b) x.col(static_cast<Index>(b)) = data.col(batch[b]);
      const Index size = work[m].parameters().size();
      Vector g = Vector::Zero(size);
      loss += mean_nll(work[m], x, &g);
      grad.segment(offsets[m], size) += g;
    }
    return loss;
  };
  objective.validation_loss = [&](const Vector& p) {
    load(p);
    double loss = 0.0;
    for (std::size_t m = 0; m < work.size(); ++m) loss += mean_nll(work[m], validation_sets[m]);
    return loss;
  };

  result.history = nn::train<Scalar>(params, n, objective, cfg);
  for (std::size_t m = 0; m < result.models.size(); ++m) {
    result.models[m].parameters() = params.segment(offsets[m], result.models[m].parameters().size());
  }
  return result;
}

// Entropy estimators get more epochs than the classifiers by default.
inline nn::TrainConfig default_entropy_config() {
  nn::TrainConfig cfg;
  cfg.max_epochs = 80;
  return cfg;
}

inline constexpr Index kDefaultComponents = 6;

// Fits a single mixture. Without a validation set the training samples double
// as the early-stopping monitor.
template <typename Scalar>
GmmEntropyModel<Scalar> fit(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& samples,
                            const nn::TrainConfig& cfg = default_entropy_config(),
                            Index components = kDefaultComponents,
                            const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>* validation =
                                nullptr,
                            nn::TrainHistory* history = nullptr) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const std::span<const Matrix> train(&samples, 1);
  const std::span<const Matrix> val(validation != nullptr ? validation : &samples, 1);
  auto fitted = fit_set<Scalar>(train, val, cfg, components);
  if (history != nullptr) *history = fitted.history;
  return std::move(fitted.models.front());
}

}  // namespace migate::entropy
