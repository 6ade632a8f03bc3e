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

#include "migate/pid/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "migate/csv.hpp"
#include "migate/error.hpp"

namespace migate::pid {

PointwiseTerms pointwise_terms(const std::array<double, 3>& entropy, double log_prior,
                               const std::array<double, 3>& log_posterior) {
  PointwiseTerms terms;
  for (std::size_t m = 0; m < 3; ++m) {
    terms.i_plus[m] = entropy[m];
    terms.i_minus[m] = entropy[m] + log_prior - log_posterior[m];
  }
  return terms;
}

PointwiseDecomposition decompose(std::span<const PointwiseTerms> terms,
                                 std::span<const std::string> sample_ids) {
  if (!sample_ids.empty() && sample_ids.size() != terms.size()) {
    throw DimensionError("decompose: sample id count differs from term count");
  }
  const auto n = static_cast<Index>(terms.size());
  PointwiseDecomposition out;
  out.sample_ids.assign(sample_ids.begin(), sample_ids.end());
  out.i_plus.resize(n, 3);
  out.i_minus.resize(n, 3);
  out.r_plus.resize(n);
  out.r_minus.resize(n);
  out.r.resize(n);
  out.u_visual.resize(n);
  out.u_text.resize(n);
  out.s.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto& t = terms[static_cast<std::size_t>(i)];
    for (std::size_t m = 0; m < 3; ++m) {
      out.i_plus(i, static_cast<Index>(m)) = t.i_plus[m];
      out.i_minus(i, static_cast<Index>(m)) = t.i_minus[m];
    }
    // The joint observation takes no part in the minima.
    out.r_plus(i) = std::min(t.i_plus[kV], t.i_plus[kT]);
    out.r_minus(i) = std::min(t.i_minus[kV], t.i_minus[kT]);
    out.r(i) = out.r_plus(i) - out.r_minus(i);
    out.u_visual(i) = t.information(kV) - out.r(i);
    out.u_text(i) = t.information(kT) - out.r(i);
    out.s(i) = t.information(kJ) - out.r(i) - out.u_visual(i) - out.u_text(i);
  }
  return out;
}

PointwiseDecomposition PointwiseDecomposition::subset(std::span<const Index> rows) const {
  PointwiseDecomposition out;
  const auto n = static_cast<Index>(rows.size());
  out.i_plus.resize(n, 3);
  out.i_minus.resize(n, 3);
  out.r_plus.resize(n);
  out.r_minus.resize(n);
  out.r.resize(n);
  out.u_visual.resize(n);
  out.u_text.resize(n);
  out.s.resize(n);
  for (Index k = 0; k < n; ++k) {
    const Index i = rows[static_cast<std::size_t>(k)];
    if (i < 0 || i >= size()) throw DimensionError("subset: row out of range");
    if (!sample_ids.empty()) out.sample_ids.push_back(sample_ids[static_cast<std::size_t>(i)]);
    out.i_plus.row(k) = i_plus.row(i);
    out.i_minus.row(k) = i_minus.row(i);
    out.r_plus(k) = r_plus(i);
    out.r_minus(k) = r_minus(i);
    out.r(k) = r(i);
    out.u_visual(k) = u_visual(i);
    out.u_text(k) = u_text(i);
    out.s(k) = s(i);
  }
  return out;
}

AggregateInteractions aggregate(const PointwiseDecomposition& decomposition) {
  if (decomposition.size() == 0) throw DomainError("aggregate: empty decomposition");
  return {decomposition.r.mean(), decomposition.u_visual.mean(), decomposition.u_text.mean(),
          decomposition.s.mean()};
}

AggregateInteractions aggregate(const PointwiseDecomposition& decomposition,
                                const Eigen::VectorXd& weights) {
  if (decomposition.size() == 0) throw DomainError("aggregate: empty decomposition");
  if (weights.size() != decomposition.size()) throw DimensionError("aggregate: weight count");
  const double total = weights.sum();
  if (!(total > 0.0)) throw DomainError("aggregate: weights must sum to a positive value");
  return {weights.dot(decomposition.r) / total, weights.dot(decomposition.u_visual) / total,
          weights.dot(decomposition.u_text) / total, weights.dot(decomposition.s) / total};
}

RelativeChange relative_change(const AggregateInteractions& before,
                               const AggregateInteractions& after) {
  RelativeChange out;
  const auto b = before.values();
  const auto a = after.values();
  for (std::size_t i = 0; i < 4; ++i) {
    if (b[i] != 0.0) out[i] = 100.0 * (a[i] - b[i]) / std::abs(b[i]);
  }
  return out;
}

nlohmann::ordered_json to_json(const AggregateInteractions& aggregates) {
  nlohmann::ordered_json doc;
  const auto values = aggregates.values();
  for (std::size_t i = 0; i < 4; ++i) doc[kAggregateNames[i]] = values[i];
  return doc;
}

AggregateInteractions aggregates_from_json(const nlohmann::json& doc) {
  try {
    return {doc.at("R").get<double>(), doc.at("U_V").get<double>(), doc.at("U_T").get<double>(),
            doc.at("S").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("aggregates JSON: ") + e.what());
  }
}

void write_decomposition_csv(const PointwiseDecomposition& decomposition, std::ostream& out) {
  if (decomposition.sample_ids.size() != static_cast<std::size_t>(decomposition.size())) {
    throw DimensionError("decomposition export needs one sample id per row");
  }
  out << "sample_id,r_plus,r_minus,r,u_V,u_T,s\n";
  for (Index i = 0; i < decomposition.size(); ++i) {
    out << csv::escape(decomposition.sample_ids[static_cast<std::size_t>(i)]) << ','
        << csv::real(decomposition.r_plus(i)) << ',' << csv::real(decomposition.r_minus(i)) << ','
        << csv::real(decomposition.r(i)) << ',' << csv::real(decomposition.u_visual(i)) << ','
        << csv::real(decomposition.u_text(i)) << ',' << csv::real(decomposition.s(i)) << '\n';
  }
  if (!out) throw IoError("failed writing decomposition CSV");
}

PointwiseDecomposition read_decomposition_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("decomposition CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "sample_id,r_plus,r_minus,r,u_V,u_T,s") {
    throw SchemaError("unexpected decomposition CSV header: " + line);
  }
  std::vector<std::string> ids;
  std::vector<std::array<double, 6>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split(line);
    if (fields.size() != 7) {
      throw SchemaError("decomposition CSV line " + std::to_string(line_no) + ": expected 7 fields");
    }
    std::array<double, 6> values{};
    for (std::size_t c = 0; c < 6; ++c) {
      try {
        std::size_t used = 0;
        values[c] = std::stod(fields[c + 1], &used);
        if (used != fields[c + 1].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw SchemaError("decomposition CSV line " + std::to_string(line_no) + ": bad number '" +
                          fields[c + 1] + "'");
      }
    }
    ids.push_back(fields[0]);
    rows.push_back(values);
  }
  PointwiseDecomposition out;
  const auto n = static_cast<Index>(rows.size());
  out.sample_ids = std::move(ids);
  out.i_plus = Eigen::MatrixX3d::Zero(n, 3);
  out.i_minus = Eigen::MatrixX3d::Zero(n, 3);
  out.r_plus.resize(n);
  out.r_minus.resize(n);
  out.r.resize(n);
  out.u_visual.resize(n);
  out.u_text.resize(n);
  out.s.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto& v = rows[static_cast<std::size_t>(i)];
    out.r_plus(i) = v[0];
    out.r_minus(i) = v[1];
    out.r(i) = v[2];
    out.u_visual(i) = v[3];
    out.u_text(i) = v[4];
    out.s(i) = v[5];
  }
  return out;
}

}  // namespace migate::pid
