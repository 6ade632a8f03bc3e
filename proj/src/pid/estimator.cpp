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

#include "migate/pid/estimator.hpp"

#include <array>
#include <string>

#include "migate/error.hpp"
#include "migate/log.hpp"

namespace migate::pid {

namespace {

Eigen::MatrixXf project(const std::optional<nn::PcaModel<double>>& pca,
                        const std::optional<nn::Standardizer<float>>& scale,
                        Eigen::MatrixXf features) {
  if (pca) {
    const Eigen::MatrixXd rows = features.transpose().cast<double>();
    features = nn::pca_transform(*pca, rows).transpose().cast<float>();
  }
  if (scale) features = scale->apply(features);
  return features;
}

Eigen::MatrixXd stack(const Eigen::MatrixXf& top, const Eigen::MatrixXf& bottom) {
  Eigen::MatrixXd out(top.rows() + bottom.rows(), top.cols());
  out << top.cast<double>(), bottom.cast<double>();
  return out;
}

}  // namespace

Preprocessor Preprocessor::fit(const FeatureTable& train, const EstimatorConfig& cfg) {
  Preprocessor pre;
  auto fit_modality = [&](const Eigen::MatrixXf& raw, Index dims,
                          std::optional<nn::PcaModel<double>>& pca,
                          std::optional<nn::Standardizer<float>>& scale) {
    if (dims > 0 && dims < raw.rows()) {
      pca = nn::pca_fit(Eigen::MatrixXd(raw.transpose().cast<double>()), dims);
    }
    if (cfg.standardize) scale = nn::Standardizer<float>::fit(project(pca, std::nullopt, raw));
  };
  fit_modality(visual_matrix(train), cfg.pca_visual, pre.visual_pca, pre.visual_scale);
  fit_modality(text_matrix(train), cfg.pca_text, pre.text_pca, pre.text_scale);
  return pre;
}

Eigen::MatrixXf Preprocessor::visual(const FeatureTable& table) const {
  return project(visual_pca, visual_scale, visual_matrix(table));
}

Eigen::MatrixXf Preprocessor::text(const FeatureTable& table) const {
  return project(text_pca, text_scale, text_matrix(table));
}

std::vector<PointwiseTerms> pointwise_terms_batch(const EntropyModels& models,
                                                  const DiscriminatorSet& set,
                                                  const ClassPrior& prior,
                                                  const Eigen::MatrixXf& visual,
                                                  const Eigen::MatrixXf& text,
                                                  std::span<const std::uint32_t> labels) {
  const Index n = visual.cols();
  if (text.cols() != n || static_cast<std::size_t>(n) != labels.size()) {
    throw DimensionError("pointwise terms: visual, text and labels disagree on sample count");
  }
  const Eigen::MatrixXd joint = stack(visual, text);
  const std::array<Eigen::VectorXd, 3> entropy{
      entropy::pointwise_entropy_batch(models.visual, Eigen::MatrixXd(visual.cast<double>())),
      entropy::pointwise_entropy_batch(models.text, Eigen::MatrixXd(text.cast<double>())),
      entropy::pointwise_entropy_batch(models.joint, joint)};
  const std::array<Eigen::MatrixXd, 3> posterior{
      log_posterior_batch(set, Head::kVisual, visual),
      log_posterior_batch(set, Head::kText, text),
      log_posterior_batch(set, Head::kJoint, joint.cast<float>())};

  std::vector<PointwiseTerms> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const std::uint32_t y = labels[static_cast<std::size_t>(i)];
    if (y >= set.num_classes()) throw DimensionError("pointwise terms: label out of range");
    out.push_back(pointwise_terms({entropy[0](i), entropy[1](i), entropy[2](i)},
                                  prior.log_probability(y),
                                  {posterior[0](y, i), posterior[1](y, i), posterior[2](y, i)}));
  }
  return out;
}

PointwiseTerms pointwise_terms(const EntropyModels& models, const DiscriminatorSet& set,
                               const ClassPrior& prior, const FeatureRecord& record) {
  const Eigen::MatrixXf visual = Eigen::Map<const Eigen::VectorXf>(
      record.visual.data(), static_cast<Index>(record.visual.size()));
  const Eigen::MatrixXf text =
      Eigen::Map<const Eigen::VectorXf>(record.text.data(), static_cast<Index>(record.text.size()));
  const std::array<std::uint32_t, 1> label{record.label};
  return pointwise_terms_batch(models, set, prior, visual, text, label).front();
}

std::vector<Index> Estimate::rows_of(const FeatureTable& table, Split split) const {
  std::vector<Index> rows;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table.records[i].split == split) rows.push_back(static_cast<Index>(i));
  }
  return rows;
}

Estimate estimate_interactions(const FeatureTable& table, const EstimatorConfig& cfg) {
  if (const auto violations = validate_table(table); !violations.empty()) {
    throw InvariantError("estimate: table has " + std::to_string(violations.size()) +
                         " invariant violations (first: " + violations.front().rule + ")");
  }
  const FeatureTable train = select_split(table, Split::kTrain);
  const FeatureTable val = select_split(table, Split::kVal);
  if (train.empty() || val.empty()) {
    throw DimensionError("estimate: train and val splits must both be non-empty");
  }

  Estimate est;
  est.preprocessor = Preprocessor::fit(train, cfg);
  const Eigen::MatrixXf train_v = est.preprocessor.visual(train);
  const Eigen::MatrixXf train_t = est.preprocessor.text(train);
  const Eigen::MatrixXf val_v = est.preprocessor.visual(val);
  const Eigen::MatrixXf val_t = est.preprocessor.text(val);

  log().info("fitting entropy models (K={}) on {} train samples", cfg.components, train.size());
  const std::array<Eigen::MatrixXd, 3> entropy_train{
      train_v.cast<double>(), train_t.cast<double>(), stack(train_v, train_t)};
  const std::array<Eigen::MatrixXd, 3> entropy_val{val_v.cast<double>(), val_t.cast<double>(),
                                                   stack(val_v, val_t)};
  auto gmms = entropy::fit_set<double>(entropy_train, entropy_val, cfg.entropy, cfg.components);
  est.entropy = {std::move(gmms.models[0]), std::move(gmms.models[1]), std::move(gmms.models[2])};
  est.entropy_history = gmms.history;
  log().info("entropy models: {} epochs, best epoch {}", gmms.history.epochs_run,
             gmms.history.best_epoch);

  log().info("training discriminators");
  DiscriminatorOptions options;
  options.train = cfg.classifier;
  options.hidden = cfg.hidden;
  const auto train_labels = labels(train);
  const auto val_labels = labels(val);
  auto fit = train_set(DiscriminatorData{train_v, train_t, train_labels},
                       DiscriminatorData{val_v, val_t, val_labels}, table.num_classes, options);
  est.discriminators = std::move(fit.set);
  est.classifier_history = fit.history;
  log().info("discriminators: {} epochs, best epoch {}", fit.history.epochs_run,
             fit.history.best_epoch);

  const auto all_labels = labels(table);
  est.prior = class_prior(all_labels, table.num_classes);

  const auto terms = pointwise_terms_batch(est.entropy, est.discriminators, est.prior,
                                           est.preprocessor.visual(table),
                                           est.preprocessor.text(table), all_labels);
  std::vector<std::string> ids;
  ids.reserve(table.size());
  for (const auto& record : table.records) ids.push_back(record.sample_id);
  est.decomposition = decompose(terms, ids);
  est.overall = aggregate(est.decomposition);
  for (Split split : kAllSplits) {
    const auto rows = est.rows_of(table, split);
    if (!rows.empty()) est.per_split[split] = aggregate(est.decomposition.subset(rows));
  }
  return est;
}

}  // namespace migate::pid
