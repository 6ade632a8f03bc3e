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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "migate/error.hpp"
#include "migate/nn/adam.hpp"

namespace migate::nn {

// Multiplies the learning rate by `factor` every `period` epochs.
struct StepSchedule {
  double factor = 0.5;
  int period = 10;

  double rate(double base, int epoch) const {
    return base * std::pow(factor, static_cast<double>(epoch / std::max(period, 1)));
  }
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 64;
  int max_epochs = 30;
  double early_stop_min_delta = 1e-4;
  int early_stop_patience = 5;
  std::uint64_t seed = 42;
  StepSchedule lr_schedule;

  void validate() const;
};

inline void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (max_epochs <= 0) throw ConfigError("max_epochs must be positive");
  if (!(early_stop_min_delta >= 0.0)) throw ConfigError("early_stop_min_delta must be >= 0");
  if (early_stop_patience <= 0) throw ConfigError("early_stop_patience must be positive");
  if (!(lr_schedule.factor > 0.0 && lr_schedule.factor <= 1.0)) {
    throw ConfigError("lr_schedule.factor must lie in (0, 1]");
  }
  if (lr_schedule.period <= 0) throw ConfigError("lr_schedule.period must be positive");
}

// Patience counter: an epoch counts as progress only when it beats the last
// accepted loss by at least min_delta.
class EarlyStopping {
 public:
  EarlyStopping(double min_delta, int patience) : min_delta_(min_delta), patience_(patience) {}

  // Returns true when training should stop after this epoch.
  bool update(double loss) {
    if (loss < reference_ - min_delta_) {
      reference_ = loss;
      stale_ = 0;
    } else {
      ++stale_;
    }
    return stale_ >= patience_;
  }

  int stale_epochs() const { return stale_; }

 private:
  double min_delta_;
  int patience_;
  double reference_ = std::numeric_limits<double>::infinity();
  int stale_ = 0;
};

template <typename Scalar>
struct Objective {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  // Mean loss over the batch; adds its gradient into `grad` (zeroed by the caller).
  std::function<double(const Vector& params, std::span<const Eigen::Index> batch, Vector& grad)>
      batch_loss;
  std::function<double(const Vector& params)> validation_loss;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  int epochs_run = 0;
  int best_epoch = 0;  // 1-based
  bool early_stopped = false;
};

// Minibatch Adam over `num_samples` examples. Batch order comes from a
// generator seeded with cfg.seed. On return `params` holds the parameters
// of the epoch with the lowest validation loss.
template <typename Scalar>
TrainHistory train(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& params, Eigen::Index num_samples,
                   const Objective<Scalar>& objective, const TrainConfig& cfg) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  cfg.validate();
  if (num_samples <= 0) throw DimensionError("train: no training samples");

  std::mt19937_64 rng(cfg.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(num_samples));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  AdamState<Scalar> adam(params.size());
  Vector grad(params.size());
  Vector best = params;
  double best_loss = std::numeric_limits<double>::infinity();
  EarlyStopping stopper(cfg.early_stop_min_delta, cfg.early_stop_patience);
  TrainHistory history;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const double lr = cfg.lr_schedule.rate(cfg.learning_rate, epoch);
    double epoch_loss = 0.0;
    Eigen::Index seen = 0;
    for (Eigen::Index start = 0; start < num_samples; start += cfg.batch_size) {
      const Eigen::Index size = std::min<Eigen::Index>(cfg.batch_size, num_samples - start);
      std::span<const Eigen::Index> batch(order.data() + start, static_cast<std::size_t>(size));
      grad.setZero();
      const double loss = objective.batch_loss(params, batch, grad);
      if (!std::isfinite(loss)) {
        throw NumericalError("non-finite training loss in epoch " + std::to_string(epoch + 1));
      }
      adam_step<Scalar>(params, grad, adam, lr);
      epoch_loss += loss * static_cast<double>(size);
      seen += size;
    }
    const double val = objective.validation_loss(params);
    if (std::isnan(val)) {
      throw NumericalError("NaN validation loss in epoch " + std::to_string(epoch + 1));
    }
    history.train_loss.push_back(epoch_loss / static_cast<double>(seen));
    history.validation_loss.push_back(val);
    history.epochs_run = epoch + 1;
    if (val < best_loss) {
      best_loss = val;
      best = params;
      history.best_epoch = epoch + 1;
    }
    if (stopper.update(val)) {
      history.early_stopped = epoch + 1 < cfg.max_epochs;
      break;
    }
  }
  params = best;
  return history;
}

}  // namespace migate::nn
