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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "migate/error.hpp"
#include "migate/pid/decomposition.hpp"
#include "migate/pid/estimator.hpp"
#include "migate/pid/exact_oracle.hpp"
#include "migate/synth/synth.hpp"

namespace migate::pid {
namespace {

const double kLn2 = std::numbers::ln2;

PointwiseTerms terms(std::array<double, 3> plus, std::array<double, 3> minus) {
  PointwiseTerms t;
  t.i_plus = plus;
  t.i_minus = minus;
  return t;
}

void expect_aggregates(const AggregateInteractions& got, std::array<double, 4> want, double tol) {
  const auto v = got.values();
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_NEAR(v[c], want[c], tol) << kAggregateNames[c];
  }
}

// Brute-force oracle over the probability table, written independently of
// the library: every pointwise quantity from marginals computed by loops.
std::array<double, 4> brute_force(const DiscreteJointDistribution& d) {
  const Index nv = d.visual_size(), nt = d.text_size(), ny = d.label_size();
  std::vector<double> pv(nv, 0), pt(nt, 0), py(ny, 0), pvy(nv * ny, 0), pty(nt * ny, 0),
      pvt(nv * nt, 0);
  for (Index v = 0; v < nv; ++v)
    for (Index t = 0; t < nt; ++t)
      for (Index y = 0; y < ny; ++y) {
        const double p = d.at(v, t, y);
        pv[v] += p;
        pt[t] += p;
        py[y] += p;
        pvy[v * ny + y] += p;
        pty[t * ny + y] += p;
        pvt[v * nt + t] += p;
      }
  std::array<double, 4> out{};
  for (Index v = 0; v < nv; ++v)
    for (Index t = 0; t < nt; ++t)
      for (Index y = 0; y < ny; ++y) {
        const double p = d.at(v, t, y);
        if (p <= 0) continue;
        const double plus_v = -std::log(pv[v]), plus_t = -std::log(pt[t]);
        const double minus_v = -std::log(pvy[v * ny + y] / py[y]);
        const double minus_t = -std::log(pty[t * ny + y] / py[y]);
        const double i_v = plus_v - minus_v, i_t = plus_t - minus_t;
        const double i_j = -std::log(pvt[v * nt + t]) + std::log(p / py[y]);
        const double r = std::min(plus_v, plus_t) - std::min(minus_v, minus_t);
        out[0] += p * r;
        out[1] += p * (i_v - r);
        out[2] += p * (i_t - r);
        out[3] += p * (i_j - i_v - i_t + r);
      }
  return out;
}

DiscreteJointDistribution random_distribution(Index nv, Index nt, Index ny, std::mt19937_64& rng) {
  DiscreteJointDistribution d(nv, nt, ny);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double total = 0.0;
  for (Index v = 0; v < nv; ++v)
    for (Index t = 0; t < nt; ++t)
      for (Index y = 0; y < ny; ++y) total += (d.at(v, t, y) = u(rng) < 0.2 ? 0.0 : u(rng));
  for (Index v = 0; v < nv; ++v)
    for (Index t = 0; t < nt; ++t)
      for (Index y = 0; y < ny; ++y) d.at(v, t, y) /= total;
  return d;
}

TEST(PointwiseTermsTest, HandSetOutputs) {
  const auto t = pointwise_terms({2.0, 2.0, 2.0}, -kLn2, {-0.1, -0.1, -0.1});
  EXPECT_NEAR(t.i_minus[kV], 1.4069, 1e-4);
  EXPECT_DOUBLE_EQ(t.i_plus[kV], 2.0);
}

TEST(PointwiseTermsTest, PerfectAndUninformativeClassifiers) {
  const double log_prior = std::log(0.25);
  const auto perfect = pointwise_terms({1.0, 3.0, 5.0}, log_prior, {0.0, 0.0, 0.0});
  for (std::size_t m = 0; m < 3; ++m) EXPECT_NEAR(perfect.information(m), -log_prior, 1e-15);
  const auto flat = pointwise_terms({1.0, 3.0, 5.0}, log_prior, {log_prior, log_prior, log_prior});
  for (std::size_t m = 0; m < 3; ++m) EXPECT_NEAR(flat.information(m), 0.0, 1e-15);
}

TEST(DecomposeTest, XorPattern) {
  const std::vector<PointwiseTerms> t{terms({1, 1, 1 + kLn2}, {1, 1, 1})};
  const auto d = decompose(t);
  EXPECT_NEAR(d.r(0), 0.0, 1e-15);
  EXPECT_NEAR(d.u_visual(0), 0.0, 1e-15);
  EXPECT_NEAR(d.u_text(0), 0.0, 1e-15);
  EXPECT_NEAR(d.s(0), kLn2, 1e-15);
}

TEST(DecomposeTest, UniqueVisualPattern) {
  const std::vector<PointwiseTerms> t{terms({kLn2, 0, kLn2}, {0, 0, 0})};
  const auto d = decompose(t);
  EXPECT_NEAR(d.r(0), 0.0, 1e-15);
  EXPECT_NEAR(d.u_visual(0), kLn2, 1e-15);
  EXPECT_NEAR(d.u_text(0), 0.0, 1e-15);
  EXPECT_NEAR(d.s(0), 0.0, 1e-15);
}

TEST(DecomposeTest, IdenticalModalitiesAreRedundant) {
  const std::vector<PointwiseTerms> t{terms({kLn2, kLn2, kLn2}, {0, 0, 0})};
  const auto d = decompose(t);
  EXPECT_NEAR(d.r(0), kLn2, 1e-15);
  EXPECT_NEAR(d.u_visual(0), 0.0, 1e-15);
  EXPECT_NEAR(d.u_text(0), 0.0, 1e-15);
  EXPECT_NEAR(d.s(0), 0.0, 1e-15);
}

TEST(DecomposeTest, JointTermsDoNotEnterTheMinimum) {
  const std::vector<PointwiseTerms> t{terms({3, 4, 0.1}, {2, 1, 0.0})};
  const auto d = decompose(t);
  EXPECT_DOUBLE_EQ(d.r_plus(0), 3.0);
  EXPECT_DOUBLE_EQ(d.r_minus(0), 1.0);
}

TEST(DecomposeTest, ChainIdentitiesHold) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 3.0);
  std::vector<PointwiseTerms> t(500);
  for (auto& x : t) {
    for (std::size_t m = 0; m < 3; ++m) {
      x.i_plus[m] = normal(rng);
      x.i_minus[m] = normal(rng);
    }
  }
  const auto d = decompose(t);
  for (Index n = 0; n < d.size(); ++n) {
    const auto& x = t[static_cast<std::size_t>(n)];
    EXPECT_NEAR(d.r(n), d.r_plus(n) - d.r_minus(n), 1e-12);
    EXPECT_NEAR(d.r(n) + d.u_visual(n), x.information(kV), 1e-12);
    EXPECT_NEAR(d.r(n) + d.u_text(n), x.information(kT), 1e-12);
    EXPECT_NEAR(d.r(n) + d.u_visual(n) + d.u_text(n) + d.s(n), x.information(kJ), 1e-12);
  }
}

TEST(DecomposeTest, NegativeValuesAreKept) {
  const std::vector<PointwiseTerms> t{terms({0, 5, 0}, {0, 6, 2})};
  const auto d = decompose(t);
  EXPECT_LT(d.u_text(0), 0.0);
  EXPECT_LT(d.s(0), 0.0);
}

TEST(AggregateTest, MeansOfPointwiseVectors) {
  const std::vector<PointwiseTerms> one{terms({1, 2, 3}, {0.5, 0.1, 0.2})};
  const auto d1 = decompose(one);
  expect_aggregates(aggregate(d1), {d1.r(0), d1.u_visual(0), d1.u_text(0), d1.s(0)}, 0.0);

  const std::vector<PointwiseTerms> two{terms({0, 0, 0}, {0, 0, 0}),
                                        terms({kLn2, kLn2, kLn2}, {0, 0, 0})};
  EXPECT_NEAR(aggregate(decompose(two)).redundancy, kLn2 / 2, 1e-15);
}

TEST(AggregateTest, PermutationInvariant) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  std::vector<PointwiseTerms> t(100);
  for (auto& x : t)
    for (std::size_t m = 0; m < 3; ++m) x.i_plus[m] = normal(rng), x.i_minus[m] = normal(rng);
  const auto a = aggregate(decompose(t));
  std::shuffle(t.begin(), t.end(), rng);
  expect_aggregates(aggregate(decompose(t)), a.values(), 1e-12);
}

TEST(AggregateTest, EmptyAndWeighted) {
  EXPECT_THROW(aggregate(decompose(std::vector<PointwiseTerms>{})), DomainError);
  const std::vector<PointwiseTerms> two{terms({0, 0, 0}, {0, 0, 0}),
                                        terms({1, 1, 1}, {0, 0, 0})};
  Eigen::VectorXd w(2);
  w << 1.0, 3.0;
  EXPECT_NEAR(aggregate(decompose(two), w).redundancy, 0.75, 1e-15);
}

TEST(AggregateTest, SubsetKeepsOrder) {
  const std::vector<PointwiseTerms> t{terms({1, 1, 1}, {0, 0, 0}), terms({2, 2, 2}, {0, 0, 0}),
                                      terms({3, 3, 3}, {0, 0, 0})};
  const std::vector<std::string> ids{"a", "b", "c"};
  const auto d = decompose(t, ids);
  const std::vector<Index> rows{2, 0};
  const auto s = d.subset(rows);
  EXPECT_EQ(s.sample_ids, (std::vector<std::string>{"c", "a"}));
  EXPECT_DOUBLE_EQ(s.r(0), 3.0);
}

TEST(RelativeChangeTest, TableValues) {
  AggregateInteractions before{0.0553, 0.3465, 0.0, 0.1};
  AggregateInteractions after{0.2319, 0.1710, 0.05, 0.1};
  const auto change = relative_change(before, after);
  EXPECT_NEAR(*change[0], 319.0, 1.0);
  EXPECT_NEAR(*change[1], -51.0, 1.0);
  EXPECT_FALSE(change[2].has_value());
  EXPECT_NEAR(*change[3], 0.0, 1e-12);
}

TEST(RelativeChangeTest, NegativeBaselineUsesMagnitude) {
  AggregateInteractions before{-0.2, 0, 0, 0};
  AggregateInteractions after{-0.1, 0, 0, 0};
  EXPECT_NEAR(*relative_change(before, after)[0], 50.0, 1e-12);
}

TEST(ExactOracleTest, LogicGates) {
  using synth::GateName;
  expect_aggregates(exact_oracle(synth::gate_distribution(GateName::kXor)).aggregates,
                    {0, 0, 0, kLn2}, 1e-12);
  expect_aggregates(exact_oracle(synth::gate_distribution(GateName::kCopy)).aggregates,
                    {kLn2, 0, 0, 0}, 1e-12);
  expect_aggregates(exact_oracle(synth::gate_distribution(GateName::kUniqueV)).aggregates,
                    {0, kLn2, 0, 0}, 1e-12);
  expect_aggregates(exact_oracle(synth::gate_distribution(GateName::kUniqueVNoise)).aggregates,
                    {kLn2, 0, -kLn2, kLn2}, 1e-12);
}

TEST(ExactOracleTest, MatchesBruteForceOnRandomTables) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = random_distribution(2 + trial % 3, 2 + trial % 2, 2 + trial % 4, rng);
    expect_aggregates(exact_oracle(d).aggregates, brute_force(d), 1e-10);
  }
}

TEST(ExactOracleTest, SkipsZeroMassOutcomes) {
  const auto r = exact_oracle(synth::gate_distribution(synth::GateName::kXor));
  EXPECT_EQ(r.outcomes.size(), 4u);
  EXPECT_NEAR(r.probabilities.sum(), 1.0, 1e-15);
}

TEST(ExactOracleTest, RelabelingSymbolsChangesNothing) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = random_distribution(3, 3, 3, rng);
    std::array<Index, 3> pv{0, 1, 2}, pt{0, 1, 2}, py{0, 1, 2};
    std::shuffle(pv.begin(), pv.end(), rng);
    std::shuffle(pt.begin(), pt.end(), rng);
    std::shuffle(py.begin(), py.end(), rng);
    DiscreteJointDistribution e(3, 3, 3);
    for (Index v = 0; v < 3; ++v)
      for (Index t = 0; t < 3; ++t)
        for (Index y = 0; y < 3; ++y) e.at(pv[v], pt[t], py[y]) = d.at(v, t, y);
    expect_aggregates(exact_oracle(e).aggregates, exact_oracle(d).aggregates.values(), 1e-12);
  }
}

TEST(ExactOracleTest, SwappingModalitiesSwapsUniques) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = random_distribution(3, 2, 2, rng);
    DiscreteJointDistribution e(2, 3, 2);
    for (Index v = 0; v < 3; ++v)
      for (Index t = 0; t < 2; ++t)
        for (Index y = 0; y < 2; ++y) e.at(t, v, y) = d.at(v, t, y);
    const auto a = exact_oracle(d).aggregates;
    expect_aggregates(exact_oracle(e).aggregates,
                      {a.redundancy, a.unique_text, a.unique_visual, a.synergy}, 1e-12);
  }
}

TEST(ExactOracleTest, RejectsInvalidDistribution) {
  DiscreteJointDistribution d(2, 2, 2);
  d.at(0, 0, 0) = 0.5;
  EXPECT_THROW(exact_oracle(d), DomainError);
  d.at(1, 1, 1) = 0.6;
  d.at(0, 1, 0) = -0.1;
  EXPECT_THROW(d.validate(), DomainError);
}

TEST(DecompositionCsvTest, RoundTripAtNineDigits) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal;
  std::vector<PointwiseTerms> t(20);
  std::vector<std::string> ids;
  for (std::size_t n = 0; n < t.size(); ++n) {
    for (std::size_t m = 0; m < 3; ++m) t[n].i_plus[m] = normal(rng), t[n].i_minus[m] = normal(rng);
    ids.push_back("s" + std::to_string(n));
  }
  const auto d = decompose(t, ids);
  std::stringstream io;
  write_decomposition_csv(d, io);
  EXPECT_EQ(io.str().substr(0, io.str().find('\n')), "sample_id,r_plus,r_minus,r,u_V,u_T,s");
  const auto back = read_decomposition_csv(io);
  EXPECT_EQ(back.sample_ids, ids);
  for (Index n = 0; n < d.size(); ++n) {
    EXPECT_NEAR(back.s(n), d.s(n), 1e-8 * std::max(1.0, std::abs(d.s(n))));
    EXPECT_NEAR(back.r_minus(n), d.r_minus(n), 1e-8 * std::max(1.0, std::abs(d.r_minus(n))));
  }
}

TEST(AggregatesJsonTest, RoundTrip) {
  AggregateInteractions a{0.1, -0.2, 0.3, 0.4};
  const auto j = to_json(a);
  EXPECT_EQ(j.begin().key(), "R");
  expect_aggregates(aggregates_from_json(j), a.values(), 0.0);
}

EstimatorConfig fast_config() {
  EstimatorConfig cfg;
  cfg.hidden = {64, 64};
  return cfg;
}

TEST(EstimatorTest, SwappingModalitiesSwapsUniques) {
  synth::SynthConfig sc;
  sc.n = 6000;
  const auto data = synth::sample(synth::gate_distribution(synth::GateName::kUniqueV), sc);
  auto swapped = data.table;
  for (auto& r : swapped.records) std::swap(r.visual, r.text);
  const auto a = estimate_interactions(data.table, fast_config()).overall;
  const auto b = estimate_interactions(swapped, fast_config()).overall;
  EXPECT_NEAR(a.unique_visual, b.unique_text, 0.1);
  EXPECT_NEAR(a.unique_text, b.unique_visual, 0.1);
  EXPECT_NEAR(a.redundancy, b.redundancy, 0.1);
  EXPECT_NEAR(a.synergy, b.synergy, 0.1);
}

TEST(EstimatorTest, ChainIdentitiesAndSplits) {
  synth::SynthConfig sc;
  sc.n = 3000;
  const auto data = synth::sample(synth::gate_distribution(synth::GateName::kXor), sc);
  auto cfg = fast_config();
  cfg.entropy.max_epochs = 5;
  cfg.classifier.max_epochs = 5;
  const auto est = estimate_interactions(data.table, cfg);
  ASSERT_EQ(est.decomposition.size(), static_cast<Index>(data.table.size()));
  const auto& d = est.decomposition;
  for (Index n = 0; n < d.size(); ++n) {
    EXPECT_NEAR(d.r(n) + d.u_visual(n) + d.u_text(n) + d.s(n),
                d.i_plus(n, kJ) - d.i_minus(n, kJ), 1e-9);
  }
  expect_aggregates(est.overall, aggregate(d).values(), 1e-12);
  for (auto s : kAllSplits) {
    const auto rows = est.rows_of(data.table, s);
    ASSERT_TRUE(est.per_split.contains(s));
    expect_aggregates(est.per_split.at(s), aggregate(d.subset(rows)).values(), 1e-12);
  }
  EXPECT_LE(est.entropy_history.epochs_run, 5);
}

TEST(EstimatorTest, SameSeedIsBitReproducible) {
  synth::SynthConfig sc;
  sc.n = 1500;
  const auto data = synth::sample(synth::gate_distribution(synth::GateName::kCopy), sc);
  auto cfg = fast_config();
  cfg.entropy.max_epochs = 3;
  cfg.classifier.max_epochs = 3;
  const auto a = estimate_interactions(data.table, cfg);
  const auto b = estimate_interactions(data.table, cfg);
  EXPECT_EQ(a.decomposition.s, b.decomposition.s);
  EXPECT_EQ(a.decomposition.r, b.decomposition.r);
}

}  // namespace
}  // namespace migate::pid
