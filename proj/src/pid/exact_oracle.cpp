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

#include "migate/pid/exact_oracle.hpp"

#include <cmath>
#include <string>

#include "migate/error.hpp"

namespace migate::pid {

DiscreteJointDistribution::DiscreteJointDistribution(Index visual_size, Index text_size,
                                                     Index label_size)
    : nv_(visual_size), nt_(text_size), ny_(label_size) {
  if (nv_ <= 0 || nt_ <= 0 || ny_ <= 0) throw DimensionError("alphabet sizes must be positive");
  p_.assign(static_cast<std::size_t>(nv_ * nt_ * ny_), 0.0);
}

std::size_t DiscreteJointDistribution::flat(Index v, Index t, Index y) const {
  if (v < 0 || v >= nv_ || t < 0 || t >= nt_ || y < 0 || y >= ny_) {
    throw DimensionError("outcome index out of range");
  }
  return static_cast<std::size_t>((v * nt_ + t) * ny_ + y);
}

void DiscreteJointDistribution::validate() const {
  double total = 0.0;
  for (double p : p_) {
    if (!(p >= 0.0)) throw DomainError("joint distribution has a negative or NaN entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("joint distribution sums to " + std::to_string(total));
  }
}

OracleResult exact_oracle(const DiscreteJointDistribution& dist) {
  dist.validate();
  const Index nv = dist.visual_size();
  const Index nt = dist.text_size();
  const Index ny = dist.label_size();

  Eigen::VectorXd p_v = Eigen::VectorXd::Zero(nv);
  Eigen::VectorXd p_t = Eigen::VectorXd::Zero(nt);
  Eigen::VectorXd p_y = Eigen::VectorXd::Zero(ny);
  Eigen::MatrixXd p_vt = Eigen::MatrixXd::Zero(nv, nt);
  Eigen::MatrixXd p_vy = Eigen::MatrixXd::Zero(nv, ny);
  Eigen::MatrixXd p_ty = Eigen::MatrixXd::Zero(nt, ny);
  for (Index v = 0; v < nv; ++v) {
    for (Index t = 0; t < nt; ++t) {
      for (Index y = 0; y < ny; ++y) {
        const double p = dist.at(v, t, y);
        p_v(v) += p;
        p_t(t) += p;
        p_y(y) += p;
        p_vt(v, t) += p;
        p_vy(v, y) += p;
        p_ty(t, y) += p;
      }
    }
  }

  OracleResult result;
  std::vector<PointwiseTerms> terms;
  std::vector<double> weights;
  for (Index v = 0; v < nv; ++v) {
    for (Index t = 0; t < nt; ++t) {
      for (Index y = 0; y < ny; ++y) {
        const double p = dist.at(v, t, y);
        if (p <= 0.0) continue;
        PointwiseTerms term;
        term.i_plus[kV] = -std::log(p_v(v));
        term.i_plus[kT] = -std::log(p_t(t));
        term.i_plus[kJ] = -std::log(p_vt(v, t));
        term.i_minus[kV] = -std::log(p_vy(v, y) / p_y(y));
        term.i_minus[kT] = -std::log(p_ty(t, y) / p_y(y));
        term.i_minus[kJ] = -std::log(p / p_y(y));
        terms.push_back(term);
        weights.push_back(p);
        result.outcomes.push_back({v, t, y});
      }
    }
  }
  result.probabilities = Eigen::Map<const Eigen::VectorXd>(weights.data(),
                                                           static_cast<Index>(weights.size()));
  result.decomposition = decompose(terms);
  result.aggregates = aggregate(result.decomposition, result.probabilities);
  return result;
}

}  // namespace migate::pid
