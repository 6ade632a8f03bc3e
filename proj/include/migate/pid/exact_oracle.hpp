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

#include <vector>

#include <Eigen/Core>

#include "migate/pid/decomposition.hpp"

namespace migate::pid {

// Finite joint p(x_V, x_T, y) over alphabets of the given sizes.
class DiscreteJointDistribution {
 public:
  DiscreteJointDistribution(Index visual_size, Index text_size, Index label_size);

  double& at(Index v, Index t, Index y) { return p_[flat(v, t, y)]; }
  double at(Index v, Index t, Index y) const { return p_[flat(v, t, y)]; }

  Index visual_size() const { return nv_; }
  Index text_size() const { return nt_; }
  Index label_size() const { return ny_; }

  // Throws DomainError unless non-negative and summing to 1 within 1e-12.
  void validate() const;

 private:
  std::size_t flat(Index v, Index t, Index y) const;

  Index nv_;
  Index nt_;
  Index ny_;
  std::vector<double> p_;
};

struct Outcome {
  Index visual = 0;
  Index text = 0;
  Index label = 0;
};

// Exact pointwise decomposition for every outcome with positive mass, using
// h(x_m) = -log p(x_m) and h(x_m|y) = -log p(x_m|y). Aggregates are weighted
// by outcome probability.
struct OracleResult {
  std::vector<Outcome> outcomes;
  Eigen::VectorXd probabilities;
  PointwiseDecomposition decomposition;
  AggregateInteractions aggregates;
};

OracleResult exact_oracle(const DiscreteJointDistribution& dist);

}  // namespace migate::pid
