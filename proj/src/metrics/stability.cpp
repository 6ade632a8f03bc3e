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

#include "migate/metrics/stability.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>

#include "json.hpp"
#include "migate/csv.hpp"
#include "migate/error.hpp"

namespace migate::metrics {

double delta_p(double p_corrupted, double p_clean) {
  if (!(p_clean > 0.0)) throw DomainError("delta_p needs a positive clean score");
  return (p_corrupted - p_clean) / p_clean;
}

double macro_average(std::span<const double> values) {
  if (values.empty()) throw DomainError("macro_average of an empty list");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::optional<double> percent_change(double current, double baseline) {
  if (baseline == 0.0) return std::nullopt;
  return 100.0 * (current - baseline) / baseline;
}

StabilityReport stability_report(double p_clean, const std::vector<CorruptedScore>& scores) {
  StabilityReport report;
  report.p_clean = p_clean;
  std::map<int, std::vector<double>> by_level;
  for (const auto& s : scores) {
    const double d = delta_p(s.p_corrupted, p_clean);
    report.cells.push_back({s.kind, s.level, s.p_corrupted, d});
    by_level[s.level].push_back(d);
  }
  for (const auto& [level, values] : by_level) {
    const double mean = macro_average(values);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    report.levels.push_back(
        {level, mean, std::sqrt(ss / static_cast<double>(values.size())), values.size()});
  }
  return report;
}

std::string stability_to_json(const StabilityReport& report) {
  nlohmann::ordered_json doc;
  doc["p_clean"] = report.p_clean;
  auto& cells = doc["cells"] = nlohmann::ordered_json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"kind", c.kind}, {"level", c.level}, {"p_corrupted", c.p_corrupted},
                     {"delta_p", c.delta_p}});
  }
  auto& levels = doc["levels"] = nlohmann::ordered_json::array();
  for (const auto& l : report.levels) {
    levels.push_back({{"level", l.level}, {"mean", l.mean}, {"std", l.std}, {"kinds", l.kinds}});
  }
  return doc.dump(2);
}

namespace {

std::string percent(double fraction_or_pct, bool already_pct = false) {
  const double value = already_pct ? fraction_or_pct : 100.0 * fraction_or_pct;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.1f", value);
  return buf;
}

std::string percent(const std::optional<double>& pct) {
  return pct ? percent(*pct, true) : std::string();
}

}  // namespace

void write_stability_csv(const StabilityReport& report, std::ostream& out) {
  out << "kind,level,p_clean,p_corrupted,delta_p,delta_p_pct\n";
  for (const auto& c : report.cells) {
    out << csv::escape(c.kind) << ',' << c.level << ',' << csv::real(report.p_clean) << ','
        << csv::real(c.p_corrupted) << ',' << csv::real(c.delta_p) << ',' << percent(c.delta_p)
        << '\n';
  }
  if (!out) throw IoError("failed writing stability csv");
}

ComparisonRow compare(std::string model, std::string rate, const DiagnosisReport& baseline,
                      const DiagnosisReport& augmented) {
  ComparisonRow row;
  row.model = std::move(model);
  row.rate = std::move(rate);
  row.delta_accuracy_pp = 100.0 * (augmented.accuracy - baseline.accuracy);
  row.delta_li = percent_change(static_cast<double>(augmented.language_induced),
                                static_cast<double>(baseline.language_induced));
  row.delta_vi = percent_change(static_cast<double>(augmented.visual_induced),
                                static_cast<double>(baseline.visual_induced));
  row.delta_mixed =
      percent_change(static_cast<double>(augmented.mixed), static_cast<double>(baseline.mixed));
  row.delta_consistency = percent_change(augmented.consistency, baseline.consistency);
  return row;
}

ComparisonRow macro_row(std::string rate, std::span<const ComparisonRow> rows) {
  if (rows.empty()) throw DomainError("macro_row of an empty list");
  auto column = [&](auto member) -> std::optional<double> {
    std::vector<double> values;
    for (const auto& r : rows) {
      const auto& v = r.*member;
      if (!v) return std::nullopt;
      values.push_back(*v);
    }
    return macro_average(values);
  };
  ComparisonRow macro;
  macro.model = "Avg (Macro)";
  macro.rate = std::move(rate);
  std::vector<double> acc;
  for (const auto& r : rows) acc.push_back(r.delta_accuracy_pp);
  macro.delta_accuracy_pp = macro_average(acc);
  macro.delta_li = column(&ComparisonRow::delta_li);
  macro.delta_vi = column(&ComparisonRow::delta_vi);
  macro.delta_mixed = column(&ComparisonRow::delta_mixed);
  macro.delta_consistency = column(&ComparisonRow::delta_consistency);
  return macro;
}

void write_comparison_csv(std::span<const ComparisonRow> rows, std::ostream& out) {
  out << "model,rate,delta_acc_pp,delta_li_pct,delta_vi_pct,delta_mix_pct,delta_consist_pct\n";
  for (const auto& r : rows) {
    out << csv::escape(r.model) << ',' << csv::escape(r.rate) << ','
        << percent(r.delta_accuracy_pp, true) << ',' << percent(r.delta_li) << ','
        << percent(r.delta_vi) << ',' << percent(r.delta_mixed) << ','
        << percent(r.delta_consistency) << '\n';
  }
  if (!out) throw IoError("failed writing comparison csv");
}

}  // namespace migate::metrics
