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
#include <random>
#include <set>

#include "migate/discriminators.hpp"
#include "migate/error.hpp"
#include "migate/nn/loss.hpp"
#include "test_util.hpp"

namespace migate {
namespace {

DiscriminatorData blobs(Eigen::Index n, std::uint32_t classes, double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal;
  DiscriminatorData d;
  d.visual.resize(3, n);
  d.text.resize(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto y = static_cast<std::uint32_t>(rng() % classes);
    d.labels.push_back(y);
    for (Eigen::Index r = 0; r < 3; ++r) {
      d.visual(r, i) = static_cast<float>(spread) * normal(rng) + (r == y % 3 ? 4.0f : 0.0f);
    }
    for (Eigen::Index r = 0; r < 2; ++r) {
      d.text(r, i) = static_cast<float>(spread) * normal(rng) + 3.0f * static_cast<float>(y) * (r ? 1.0f : -1.0f);
    }
  }
  return d;
}

double accuracy(const DiscriminatorSet& set, Head head, const DiscriminatorData& d) {
  const Eigen::MatrixXf x = head == Head::kVisual ? d.visual : head == Head::kText ? d.text : d.joint();
  const Eigen::MatrixXd lp = log_posterior_batch(set, head, x);
  int right = 0;
  for (Eigen::Index i = 0; i < lp.cols(); ++i) {
    Eigen::Index arg = 0;
    lp.col(i).maxCoeff(&arg);
    right += static_cast<std::uint32_t>(arg) == d.labels[static_cast<std::size_t>(i)];
  }
  return static_cast<double>(right) / static_cast<double>(lp.cols());
}

DiscriminatorOptions small_options() {
  DiscriminatorOptions o;
  o.hidden = {32, 32};
  o.train.max_epochs = 20;
  return o;
}

TEST(ClassPriorTest, EmpiricalFrequencies) {
  const std::vector<std::uint32_t> labels{0, 0, 1, 2};
  const auto prior = class_prior(labels, 4);
  EXPECT_DOUBLE_EQ(prior.probabilities(0), 0.5);
  EXPECT_DOUBLE_EQ(prior.probabilities(1), 0.25);
  EXPECT_DOUBLE_EQ(prior.log_probability(0), std::log(0.5));
  EXPECT_DOUBLE_EQ(prior.log_probability(3), kLogPriorFloor);
  EXPECT_THROW(prior.log_probability(4), DimensionError);
}

TEST(ClassPriorTest, RejectsBadInput) {
  const std::vector<std::uint32_t> none;
  const std::vector<std::uint32_t> big{0, 5};
  EXPECT_THROW(class_prior(none, 2), DomainError);
  EXPECT_THROW(class_prior(big, 2), DomainError);
}

TEST(DiscriminatorTest, SeparableBlobsAreLearned) {
  const auto train = blobs(3000, 3, 0.5, 1);
  const auto val = blobs(600, 3, 0.5, 2);
  const auto test = blobs(1000, 3, 0.5, 3);
  const auto fit = train_set(train, val, 3, small_options());
  for (Head h : kAllHeads) EXPECT_GT(accuracy(fit.set, h, test), 0.95);
}

TEST(DiscriminatorTest, ShuffledLabelsGiveChanceCrossEntropy) {
  auto train = blobs(3000, 4, 1.0, 4);
  auto val = blobs(1000, 4, 1.0, 5);
  std::mt19937_64 rng(6);
  for (auto* d : {&train, &val}) {
    for (auto& y : d->labels) y = static_cast<std::uint32_t>(rng() % 4);
  }
  const auto fit = train_set(train, val, 4, small_options());
  for (Head h : kAllHeads) {
    const Eigen::MatrixXf x = h == Head::kVisual ? val.visual : h == Head::kText ? val.text : val.joint();
    const Eigen::MatrixXd lp = log_posterior_batch(fit.set, h, x);
    double ce = 0.0;
    for (Eigen::Index i = 0; i < lp.cols(); ++i) ce -= lp(val.labels[static_cast<std::size_t>(i)], i);
    EXPECT_NEAR(ce / static_cast<double>(lp.cols()), std::log(4.0), 0.05);
  }
}

TEST(DiscriminatorTest, PosteriorsNormalize) {
  const auto train = blobs(400, 3, 1.0, 7);
  auto opts = small_options();
  opts.train.max_epochs = 2;
  const auto fit = train_set(train, train, 3, opts);
  const Eigen::MatrixXd lp = log_posterior_batch(fit.set, Head::kJoint, train.joint());
  for (Eigen::Index i = 0; i < lp.cols(); ++i) {
    EXPECT_NEAR(lp.col(i).array().exp().sum(), 1.0, 1e-6);
  }
  const Eigen::VectorXd one = log_posterior(fit.set, Head::kVisual, train.visual.col(0));
  EXPECT_LT((one - log_posterior_batch(fit.set, Head::kVisual, train.visual.leftCols(1)).col(0))
                .norm(),
            1e-12);
}

TEST(DiscriminatorTest, ZeroNetIsUniform) {
  const std::vector<Eigen::Index> hidden{4};
  DiscriminatorSet set{nn::DenseNet<float>::mlp(3, hidden, 5), nn::DenseNet<float>::mlp(2, hidden, 5),
                       nn::DenseNet<float>::mlp(5, hidden, 5)};
  const Eigen::VectorXd lp = log_posterior(set, Head::kText, Eigen::VectorXf::Ones(2));
  for (Eigen::Index c = 0; c < 5; ++c) EXPECT_NEAR(lp(c), -std::log(5.0), 1e-6);
}

TEST(DiscriminatorTest, HeadsShareEveryMinibatch) {
  const auto train = blobs(250, 2, 1.0, 8);
  auto opts = small_options();
  opts.train.max_epochs = 3;
  opts.train.early_stop_patience = 10;
  opts.train.batch_size = 64;
  std::vector<std::vector<Eigen::Index>> batches;
  opts.batch_observer = [&](std::span<const Eigen::Index> b) { batches.emplace_back(b.begin(), b.end()); };
  train_set(train, train, 2, opts);
  ASSERT_EQ(batches.size(), 3u * 4u);
  for (int epoch = 0; epoch < 3; ++epoch) {
    std::set<Eigen::Index> seen;
    for (int b = 0; b < 4; ++b) {
      for (auto i : batches[static_cast<std::size_t>(epoch * 4 + b)]) EXPECT_TRUE(seen.insert(i).second);
    }
    EXPECT_EQ(seen.size(), 250u);
  }
}

TEST(DiscriminatorTest, TrainingIsDeterministic) {
  const auto train = blobs(500, 3, 1.0, 9);
  auto opts = small_options();
  opts.train.max_epochs = 3;
  const auto a = train_set(train, train, 3, opts);
  const auto b = train_set(train, train, 3, opts);
  EXPECT_EQ(a.set.joint.parameters(), b.set.joint.parameters());
  EXPECT_EQ(a.history.validation_loss, b.history.validation_loss);
}

TEST(DiscriminatorTest, EpochCapAppliesByDefault) {
  EXPECT_EQ(default_classifier_config().max_epochs, 30);
  EXPECT_EQ(DiscriminatorOptions{}.hidden, (std::vector<Eigen::Index>{512, 512}));
}

TEST(DiscriminatorTest, SaveAndLoad) {
  testing::TempDir dir("disc");
  const auto train = blobs(200, 2, 1.0, 10);
  auto opts = small_options();
  opts.train.max_epochs = 1;
  const auto fit = train_set(train, train, 2, opts);
  const auto prior = class_prior(train.labels, 2);
  save_discriminators(fit.set, prior, dir.path());
  const auto [set, back_prior] = load_discriminators(dir.path());
  for (Head h : kAllHeads) EXPECT_EQ(set.head(h).parameters(), fit.set.head(h).parameters());
  EXPECT_EQ(back_prior.probabilities, prior.probabilities);
}

TEST(DiscriminatorTest, TableOverloadUsesTrainAndVal) {
  const auto table = testing::random_table(90, 3, 2, 2, 1);
  auto opts = small_options();
  opts.train.max_epochs = 1;
  std::size_t seen = 0;
  opts.batch_observer = [&](std::span<const Eigen::Index> b) { seen += b.size(); };
  train_set(table, opts);
  EXPECT_EQ(seen, select_split(table, Split::kTrain).size());
}

}  // namespace
}  // namespace migate
