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

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "migate/discriminators.hpp"

namespace migate::pid {

using Eigen::Index;

inline constexpr std::size_t kV = 0;
inline constexpr std::size_t kT = 1;
inline constexpr std::size_t kJ = 2;

// Pointwise specificity i+ = h(x_m) and ambiguity i- = h(x_m|y) for the
// visual, text and joint observations of one sample, in nats.
struct PointwiseTerms {
  std::array<double, 3> i_plus{};
  std::array<double, 3> i_minus{};

  double information(std::size_t m) const { return i_plus[m] - i_minus[m]; }
};

// i-(x_m;y) = h(x_m) + log P(y) - log P(y|x_m), per modality.
PointwiseTerms pointwise_terms(const std::array<double, 3>& entropy, double log_prior,
                               const std::array<double, 3>& log_posterior);

struct PointwiseDecomposition {
  std::vector<std::string> sample_ids;
  Eigen::MatrixX3d i_plus;   // columns V, T, J
  Eigen::MatrixX3d i_minus;
  Eigen::VectorXd r_plus;
  Eigen::VectorXd r_minus;
  Eigen::VectorXd r;
  Eigen::VectorXd u_visual;
  Eigen::VectorXd u_text;
  Eigen::VectorXd s;

  Index size() const { return r.size(); }
  // Rows in `rows` order, e.g. one split of the dataset.
  PointwiseDecomposition subset(std::span<const Index> rows) const;
};

// r+- = min over {V, T} of i+-, r = r+ - r-, u_m = i(x_m;y) - r,
// s = i(x_V,x_T;y) - r - u_V - u_T. Sample ids are optional.
PointwiseDecomposition decompose(std::span<const PointwiseTerms> terms,
                                 std::span<const std::string> sample_ids = {});

struct AggregateInteractions {
  double redundancy = 0.0;
  double unique_visual = 0.0;
  double unique_text = 0.0;
  double synergy = 0.0;

  std::array<double, 4> values() const { return {redundancy, unique_visual, unique_text, synergy}; }
};

inline constexpr std::array<const char*, 4> kAggregateNames{"R", "U_V", "U_T", "S"};

AggregateInteractions aggregate(const PointwiseDecomposition& decomposition);
// Probability-weighted aggregate; weights must sum to a positive value.
AggregateInteractions aggregate(const PointwiseDecomposition& decomposition,
                                const Eigen::VectorXd& weights);

// Percent change per component; nullopt where the baseline component is 0.
using RelativeChange = std::array<std::optional<double>, 4>;
RelativeChange relative_change(const AggregateInteractions& before,
                               const AggregateInteractions& after);

nlohmann::ordered_json to_json(const AggregateInteractions& aggregates);
AggregateInteractions aggregates_from_json(const nlohmann::json& doc);

// CSV with header sample_id,r_plus,r_minus,r,u_V,u_T,s; reals rendered with
// nine significant digits.
void write_decomposition_csv(const PointwiseDecomposition& decomposition, std::ostream& out);
// Reads the columns written above. i+ / i- are not stored and come back zero.
PointwiseDecomposition read_decomposition_csv(std::istream& in);

}  // namespace migate::pid
