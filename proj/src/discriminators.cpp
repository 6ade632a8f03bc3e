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

#include "migate/discriminators.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "json.hpp"
#include "migate/error.hpp"
#include "migate/nn/checkpoint.hpp"
#include "migate/nn/loss.hpp"
#include "migate/nn/math.hpp"

namespace migate {

namespace {

using Net = nn::DenseNet<float>;

Eigen::MatrixXf gather(const Eigen::MatrixXf& data, std::span<const Eigen::Index> batch) {
  Eigen::MatrixXf out(data.rows(), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) out.col(static_cast<Eigen::Index>(b)) = data.col(batch[b]);
  return out;
}

void check_data(const DiscriminatorData& data, const char* what) {
  if (data.text.cols() != data.visual.cols() ||
      static_cast<std::size_t>(data.visual.cols()) != data.labels.size()) {
    throw DimensionError(std::string(what) + ": visual, text and labels disagree on sample count");
  }
}

}  // namespace

double ClassPrior::log_probability(std::uint32_t label) const {
  if (label >= probabilities.size()) throw DimensionError("prior: label out of range");
  const double p = probabilities(label);
  return p > 0.0 ? std::max(std::log(p), kLogPriorFloor) : kLogPriorFloor;
}

ClassPrior class_prior(std::span<const std::uint32_t> labels, std::uint32_t num_classes) {
  if (labels.empty()) throw DomainError("class_prior: no labels");
  if (num_classes == 0) throw DomainError("class_prior: zero classes");
  ClassPrior prior;
  prior.probabilities = Eigen::VectorXd::Zero(num_classes);
  for (std::uint32_t y : labels) {
    if (y >= num_classes) {
      throw DomainError("class_prior: label " + std::to_string(y) + " not < C=" +
                        std::to_string(num_classes));
    }
    prior.probabilities(y) += 1.0;
  }
  prior.probabilities /= static_cast<double>(labels.size());
  return prior;
}

const Net& DiscriminatorSet::head(Head which) const {
  switch (which) {
    case Head::kVisual: return visual;
    case Head::kText: return text;
    case Head::kJoint: return joint;
  }
  throw DomainError("unknown head");
}

Net& DiscriminatorSet::head(Head which) {
  return const_cast<Net&>(static_cast<const DiscriminatorSet&>(*this).head(which));
}

Eigen::MatrixXf DiscriminatorData::joint() const {
  Eigen::MatrixXf out(visual.rows() + text.rows(), visual.cols());
  out << visual, text;
  return out;
}

DiscriminatorData DiscriminatorData::from_table(const FeatureTable& table) {
  return {visual_matrix(table), text_matrix(table), migate::labels(table)};
}

DiscriminatorFit train_set(const DiscriminatorData& train, const DiscriminatorData& validation,
                           std::uint32_t num_classes, const DiscriminatorOptions& options) {
  check_data(train, "training data");
  check_data(validation, "validation data");
  if (train.size() == 0 || validation.size() == 0) {
    throw DimensionError("discriminators need non-empty train and validation sets");
  }
  if (num_classes < 2) throw DimensionError("discriminators need at least two classes");

  const Eigen::MatrixXf train_joint = train.joint();
  const Eigen::MatrixXf val_joint = validation.joint();
  const std::array<const Eigen::MatrixXf*, 3> train_inputs{&train.visual, &train.text, &train_joint};
  const std::array<const Eigen::MatrixXf*, 3> val_inputs{&validation.visual, &validation.text,
                                                         &val_joint};

  DiscriminatorSet set{Net::mlp(train.visual.rows(), options.hidden, num_classes),
                       Net::mlp(train.text.rows(), options.hidden, num_classes),
                       Net::mlp(train_joint.rows(), options.hidden, num_classes)};
  std::mt19937_64 init_rng(options.train.seed);
  std::array<Eigen::Index, 4> offsets{};
  for (std::size_t h = 0; h < 3; ++h) {
    set.head(kAllHeads[h]).initialize(init_rng);
    offsets[h + 1] = offsets[h] + set.head(kAllHeads[h]).num_parameters();
  }

  Net::Vector params(offsets[3]);
  for (std::size_t h = 0; h < 3; ++h) {
    params.segment(offsets[h], offsets[h + 1] - offsets[h]) = set.head(kAllHeads[h]).parameters();
  }
  DiscriminatorSet work = set;
  auto load = [&](const Net::Vector& p) {
    for (std::size_t h = 0; h < 3; ++h) {
      work.head(kAllHeads[h]).parameters() = p.segment(offsets[h], offsets[h + 1] - offsets[h]);
    }
  };

  nn::Objective<float> objective;
  objective.batch_loss = [&](const Net::Vector& p, std::span<const Eigen::Index> batch,
                             Net::Vector& grad) {
    if (options.batch_observer) options.batch_observer(batch);
    load(p);
    std::vector<std::uint32_t> y(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) y[b] = train.labels[static_cast<std::size_t>(batch[b])];
    double loss = 0.0;
    for (std::size_t h = 0; h < 3; ++h) {
      const Net& net = work.head(kAllHeads[h]);
      Net::Cache cache;
      const Net::Matrix logits = net.forward(gather(*train_inputs[h], batch), &cache);
      Net::Matrix d_logits;
      loss += nn::softmax_cross_entropy<float>(logits, y, &d_logits);
      net.backward(cache, std::move(d_logits),
                   grad.segment(offsets[h], offsets[h + 1] - offsets[h]));
    }
    return loss;
  };
  objective.validation_loss = [&](const Net::Vector& p) {
    load(p);
    double loss = 0.0;
    for (std::size_t h = 0; h < 3; ++h) {
      loss += nn::softmax_cross_entropy<float>(work.head(kAllHeads[h]).forward(*val_inputs[h]),
                                               validation.labels);
    }
    return loss;
  };

  DiscriminatorFit fit;
  fit.history = nn::train<float>(params, train.size(), objective, options.train);
  load(params);
  fit.set = std::move(work);
  return fit;
}

DiscriminatorFit train_set(const FeatureTable& table, const DiscriminatorOptions& options) {
  return train_set(DiscriminatorData::from_table(select_split(table, Split::kTrain)),
                   DiscriminatorData::from_table(select_split(table, Split::kVal)),
                   table.num_classes, options);
}

Eigen::MatrixXd log_posterior_batch(const DiscriminatorSet& set, Head which,
                                    const Eigen::MatrixXf& x) {
  const Eigen::MatrixXd logits = set.head(which).forward(x).cast<double>();
  Eigen::MatrixXd out = nn::log_softmax_cols(logits);
  if (!out.allFinite()) throw NumericalError("non-finite log posterior");
  return out;
}

Eigen::VectorXd log_posterior(const DiscriminatorSet& set, Head which,
                              const Eigen::Ref<const Eigen::VectorXf>& x) {
  return log_posterior_batch(set, which, Eigen::MatrixXf(x)).col(0);
}

void save_discriminators(const DiscriminatorSet& set, const ClassPrior& prior,
                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nn::save_net(set.visual, dir / "visual.minn");
  nn::save_net(set.text, dir / "text.minn");
  nn::save_net(set.joint, dir / "joint.minn");
  nlohmann::ordered_json doc;
  doc["probabilities"] = std::vector<double>(prior.probabilities.data(),
                                             prior.probabilities.data() + prior.probabilities.size());
  std::ofstream out(dir / "prior.json");
  if (!out) throw IoError("cannot write prior.json in " + dir.string());
  out << doc.dump(2) << '\n';
}

std::pair<DiscriminatorSet, ClassPrior> load_discriminators(const std::filesystem::path& dir) {
  DiscriminatorSet set{nn::load_net<float>(dir / "visual.minn"),
                       nn::load_net<float>(dir / "text.minn"),
                       nn::load_net<float>(dir / "joint.minn")};
  std::ifstream in(dir / "prior.json");
  if (!in) throw IoError("cannot read prior.json in " + dir.string());
  const auto doc = nlohmann::json::parse(in);
  const auto values = doc.at("probabilities").get<std::vector<double>>();
  ClassPrior prior;
  prior.probabilities = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                          static_cast<Eigen::Index>(values.size()));
  return {std::move(set), std::move(prior)};
}

}  // namespace migate
