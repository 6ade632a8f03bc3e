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

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "migate/metrics/diagnosis.hpp"

namespace migate::metrics {

// (p_corrupted - p_clean) / p_clean; DomainError unless p_clean > 0.
double delta_p(double p_corrupted, double p_clean);

// Unweighted mean; DomainError on an empty list.
double macro_average(std::span<const double> values);

// 100 * (current - baseline) / baseline, nullopt for a zero baseline.
std::optional<double> percent_change(double current, double baseline);

struct CorruptedScore {
  std::string kind;
  int level = 0;
  double p_corrupted = 0.0;
};

struct StabilityCell {
  std::string kind;
  int level = 0;
  double p_corrupted = 0.0;
  double delta_p = 0.0;
};

struct LevelSummary {
  int level = 0;
  double mean = 0.0;
  double std = 0.0;  // population std across kinds
  std::size_t kinds = 0;
};

struct StabilityReport {
  double p_clean = 0.0;
  std::vector<StabilityCell> cells;    // input order
  std::vector<LevelSummary> levels;    // ascending level
};

StabilityReport stability_report(double p_clean, const std::vector<CorruptedScore>& scores);
std::string stability_to_json(const StabilityReport& report);
void write_stability_csv(const StabilityReport& report, std::ostream& out);

// One row of the augmented-versus-baseline comparison. Accuracy moves in
// absolute percentage points; error counts and consistency move relatively.
struct ComparisonRow {
  std::string model;
  std::string rate;
  double delta_accuracy_pp = 0.0;
  std::optional<double> delta_li;
  std::optional<double> delta_vi;
  std::optional<double> delta_mixed;
  std::optional<double> delta_consistency;
};

ComparisonRow compare(std::string model, std::string rate, const DiagnosisReport& baseline,
                      const DiagnosisReport& augmented);
// Macro average over rows; an undefined entry makes its column undefined.
ComparisonRow macro_row(std::string rate, std::span<const ComparisonRow> rows);

// Header: model,rate,delta_acc_pp,delta_li_pct,delta_vi_pct,delta_mix_pct,
// delta_consist_pct. Values carry one decimal place; undefined cells are
// empty.
void write_comparison_csv(std::span<const ComparisonRow> rows, std::ostream& out);

}  // namespace migate::metrics
