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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "migate/feature_store.hpp"
#include "migate/nn/dense_net.hpp"
#include "migate/nn/train.hpp"

namespace migate {

enum class Head : std::uint8_t { kVisual = 0, kText = 1, kJoint = 2 };

inline constexpr std::array<Head, 3> kAllHeads{Head::kVisual, Head::kText, Head::kJoint};

// log P(y) for classes absent from the data is clamped here instead of -inf.
inline constexpr double kLogPriorFloor = -30.0;

// Empirical label distribution P(y) = count(y) / N.
struct ClassPrior {
  Eigen::VectorXd probabilities;

  double log_probability(std::uint32_t label) const;
};

ClassPrior class_prior(std::span<const std::uint32_t> labels, std::uint32_t num_classes);

// Three independent classifiers P(Y|X_V), P(Y|X_T), P(Y|X_V,X_T); the joint
// head reads the visual features stacked on top of the text features.
struct DiscriminatorSet {
  nn::DenseNet<float> visual;
  nn::DenseNet<float> text;
  nn::DenseNet<float> joint;

  const nn::DenseNet<float>& head(Head which) const;
  nn::DenseNet<float>& head(Head which);
  std::uint32_t num_classes() const { return static_cast<std::uint32_t>(visual.output_dim()); }
};

// Column-per-sample training data shared by the three heads.
struct DiscriminatorData {
  Eigen::MatrixXf visual;
  Eigen::MatrixXf text;
  std::vector<std::uint32_t> labels;

  Eigen::Index size() const { return visual.cols(); }
  Eigen::MatrixXf joint() const;
  static DiscriminatorData from_table(const FeatureTable& table);
};

inline nn::TrainConfig default_classifier_config() {
  nn::TrainConfig cfg;
  cfg.max_epochs = 30;
  return cfg;
}

struct DiscriminatorOptions {
  nn::TrainConfig train = default_classifier_config();
  std::vector<Eigen::Index> hidden{512, 512};
  // Sees every minibatch (as training-set indices) exactly once, before the
  // three heads consume it.
  std::function<void(std::span<const Eigen::Index>)> batch_observer;
};

struct DiscriminatorFit {
  DiscriminatorSet set;
  nn::TrainHistory history;
};

// Minimises CE_V + CE_T + CE_J over shared minibatches with early stopping
// on the summed validation cross-entropy.
DiscriminatorFit train_set(const DiscriminatorData& train, const DiscriminatorData& validation,
                           std::uint32_t num_classes, const DiscriminatorOptions& options = {});

// Uses the train and val splits of the table.
DiscriminatorFit train_set(const FeatureTable& table, const DiscriminatorOptions& options = {});

// log-softmax of the head's logits; column per sample (C x N).
Eigen::MatrixXd log_posterior_batch(const DiscriminatorSet& set, Head which,
                                    const Eigen::MatrixXf& x);
Eigen::VectorXd log_posterior(const DiscriminatorSet& set, Head which,
                              const Eigen::Ref<const Eigen::VectorXf>& x);

// Writes visual.minn, text.minn, joint.minn and prior.json into dir.
void save_discriminators(const DiscriminatorSet& set, const ClassPrior& prior,
                         const std::filesystem::path& dir);
std::pair<DiscriminatorSet, ClassPrior> load_discriminators(const std::filesystem::path& dir);

}  // namespace migate
