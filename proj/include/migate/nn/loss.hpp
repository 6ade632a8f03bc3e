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

#include <cstdint>
#include <span>
#include <string>

#include <Eigen/Core>

#include "migate/error.hpp"
#include "migate/nn/math.hpp"

namespace migate::nn {

// Mean softmax cross-entropy over the columns of logits (classes x batch).
// When d_logits is non-null it receives dLoss/dLogits, already divided by
// the batch size.
template <typename Scalar>
double softmax_cross_entropy(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& logits,
    std::span<const std::uint32_t> labels,
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>* d_logits = nullptr) {
  const Eigen::Index batch = logits.cols();
  if (static_cast<std::size_t>(batch) != labels.size()) {
    throw DimensionError("logits have " + std::to_string(batch) + " columns but " +
                         std::to_string(labels.size()) + " labels were given");
  }
  auto log_probs = log_softmax_cols(logits);
  double loss = 0.0;
  for (Eigen::Index b = 0; b < batch; ++b) {
    if (labels[b] >= static_cast<std::uint32_t>(logits.rows())) {
      throw DimensionError("label " + std::to_string(labels[b]) + " out of range");
    }
    loss -= static_cast<double>(log_probs(labels[b], b));
  }
  if (d_logits != nullptr) {
    *d_logits = log_probs.array().exp().matrix();
    for (Eigen::Index b = 0; b < batch; ++b) (*d_logits)(labels[b], b) -= Scalar(1);
    *d_logits /= static_cast<Scalar>(batch);
  }
  return loss / static_cast<double>(batch);
}

}  // namespace migate::nn
