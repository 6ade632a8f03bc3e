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

#include <Eigen/Core>

#include "migate/error.hpp"

namespace migate::nn {

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename Scalar>
struct AdamState {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  AdamState() = default;
  explicit AdamState(Eigen::Index size) : m(Vector::Zero(size)), v(Vector::Zero(size)) {}

  Vector m;
  Vector v;
  std::int64_t step = 0;
  AdamHyper hyper;
};

// One bias-corrected Adam update of params in place.
template <typename Scalar>
void adam_step(Eigen::Ref<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> params,
               const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& grads,
               AdamState<Scalar>& state, double learning_rate) {
  if (params.size() != grads.size() || state.m.size() != params.size()) {
    throw DimensionError("adam: parameter, gradient and state sizes differ");
  }
  if (!grads.allFinite()) throw NumericalError("adam: non-finite gradient");
  const auto& h = state.hyper;
  ++state.step;
  const double correction1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.step));
  const auto b1 = static_cast<Scalar>(h.beta1);
  const auto b2 = static_cast<Scalar>(h.beta2);
  state.m = b1 * state.m + (Scalar(1) - b1) * grads;
  state.v = b2 * state.v + (Scalar(1) - b2) * grads.cwiseAbs2();
  const auto step_size = static_cast<Scalar>(learning_rate / correction1);
  const auto root_correction2 = static_cast<Scalar>(std::sqrt(correction2));
  const auto eps = static_cast<Scalar>(h.epsilon);
  params.array() -=
      step_size * state.m.array() / (state.v.array().sqrt() / root_correction2 + eps);
}

}  // namespace migate::nn
