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

#include <map>
#include <optional>
#include <vector>

#include "migate/discriminators.hpp"
#include "migate/entropy/gmm.hpp"
#include "migate/feature_store.hpp"
#include "migate/nn/pca.hpp"
#include "migate/nn/standardize.hpp"
#include "migate/pid/decomposition.hpp"

namespace migate::pid {

struct EstimatorConfig {
  nn::TrainConfig classifier = default_classifier_config();
  nn::TrainConfig entropy = entropy::default_entropy_config();
  Index components = entropy::kDefaultComponents;
  std::vector<Index> hidden{512, 512};
  // Optional feature preprocessing, fitted on the train split.
  bool standardize = false;
  Index pca_visual = 0;  // 0 keeps the raw dimension
  Index pca_text = 0;
};

struct EntropyModels {
  entropy::GmmEntropyModel<double> visual;
  entropy::GmmEntropyModel<double> text;
  entropy::GmmEntropyModel<double> joint;
};

// Feature transform applied before both estimators: PCA then standardisation.
struct Preprocessor {
  std::optional<nn::PcaModel<double>> visual_pca;
  std::optional<nn::PcaModel<double>> text_pca;
  std::optional<nn::Standardizer<float>> visual_scale;
  std::optional<nn::Standardizer<float>> text_scale;

  static Preprocessor fit(const FeatureTable& train, const EstimatorConfig& cfg);
  Eigen::MatrixXf visual(const FeatureTable& table) const;
  Eigen::MatrixXf text(const FeatureTable& table) const;
};

// Terms for one sample whose features are already in model space.
PointwiseTerms pointwise_terms(const EntropyModels& models, const DiscriminatorSet& set,
                               const ClassPrior& prior, const FeatureRecord& record);

// Column-per-sample batch version of the above.
std::vector<PointwiseTerms> pointwise_terms_batch(const EntropyModels& models,
                                                  const DiscriminatorSet& set,
                                                  const ClassPrior& prior,
                                                  const Eigen::MatrixXf& visual,
                                                  const Eigen::MatrixXf& text,
                                                  std::span<const std::uint32_t> labels);

struct Estimate {
  Preprocessor preprocessor;
  EntropyModels entropy;
  DiscriminatorSet discriminators;
  ClassPrior prior;
  nn::TrainHistory entropy_history;
  nn::TrainHistory classifier_history;
  // One row per record, in table order.
  PointwiseDecomposition decomposition;
  AggregateInteractions overall;
  std::map<Split, AggregateInteractions> per_split;  // splits with no records are absent

  std::vector<Index> rows_of(const FeatureTable& table, Split split) const;
};

// Fits the three entropy models and three classifiers on the train split
// (validation split for early stopping), takes P(y) from every record, and
// decomposes every record.
Estimate estimate_interactions(const FeatureTable& table, const EstimatorConfig& cfg = {});

}  // namespace migate::pid
