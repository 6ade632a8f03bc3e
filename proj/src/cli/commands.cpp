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

#include "migate/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "migate/corruption/batch.hpp"
#include "migate/csv.hpp"
#include "migate/error.hpp"
#include "migate/feature_store.hpp"
#include "migate/log.hpp"
#include "migate/metrics/diagnosis.hpp"
#include "migate/pid/exact_oracle.hpp"
#include "migate/synth/synth.hpp"

namespace migate::cli {

using nlohmann::ordered_json;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("no ") + what + " path configured");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + std::string(what) + " " + path.string());
  return in;
}

void ensure_output(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.output_dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

FeatureTable read_features(const RunConfig& cfg) {
  if (cfg.data.features.empty()) throw ConfigError("data.features is not set");
  return load_table(cfg.data.features);
}

TextManifest read_texts(const RunConfig& cfg) {
  auto in = open_in(cfg.data.texts, "text manifest");
  return read_text_manifest(in);
}

ordered_json history_json(const nn::TrainHistory& h) {
  return {{"epochs_run", h.epochs_run},
          {"best_epoch", h.best_epoch},
          {"early_stopped", h.early_stopped},
          {"train_loss", h.train_loss},
          {"validation_loss", h.validation_loss}};
}

}  // namespace

ordered_json cmd_synth(const RunConfig& cfg) {
  ensure_output(cfg);
  const auto& s = cfg.data.synth;
  const auto name = synth::parse_gate_name(s.gate);
  if (!name) throw ConfigError("unknown synthetic gate '" + s.gate + "'");
  if (s.n < 100) throw ConfigError("synth needs n >= 100");
  const auto dist = synth::gate_distribution(*name);
  synth::SynthConfig sc;
  sc.n = s.n;
  sc.jitter = s.jitter;
  sc.embed_dim = s.embed_dim;
  sc.seed = cfg.sub_seed("synth");
  const auto data = synth::sample(dist, sc);

  save_table(data.table, cfg.output_dir / "features.mifs");
  {
    auto out = open_out(cfg.output_dir / "texts.jsonl");
    write_text_manifest(data.texts, out);
  }

  const auto oracle = pid::exact_oracle(dist);
  {
    auto out = open_out(cfg.output_dir / "oracle.csv");
    out << "visual,text,label,probability,r_plus,r_minus,r,u_V,u_T,s\n";
    const auto& d = oracle.decomposition;
    for (std::size_t i = 0; i < oracle.outcomes.size(); ++i) {
      const auto& o = oracle.outcomes[i];
      const auto k = static_cast<Eigen::Index>(i);
      out << o.visual << ',' << o.text << ',' << o.label << ','
          << csv::real(oracle.probabilities(k)) << ',' << csv::real(d.r_plus(k)) << ','
          << csv::real(d.r_minus(k)) << ',' << csv::real(d.r(k)) << ','
          << csv::real(d.u_visual(k)) << ',' << csv::real(d.u_text(k)) << ','
          << csv::real(d.s(k)) << '\n';
    }
  }
  ordered_json agg = pid::to_json(oracle.aggregates);
  write_text(cfg.output_dir / "oracle.json", agg.dump(2));
  return {{"command", "synth"},
          {"gate", s.gate},
          {"n", data.table.size()},
          {"num_classes", data.table.num_classes},
          {"oracle", agg}};
}

ordered_json cmd_estimate(const RunConfig& cfg) {
  ensure_output(cfg);
  const auto table = read_features(cfg);
  const auto est = pid::estimate_interactions(table, cfg.estimator);
  {
    auto out = open_out(cfg.output_dir / "decomposition.csv");
    pid::write_decomposition_csv(est.decomposition, out);
  }
  ordered_json splits = ordered_json::object();
  for (const auto& [split, agg] : est.per_split) {
    const auto rows = est.rows_of(table, split);
    auto out = open_out(cfg.output_dir / ("decomposition_" + std::string(to_string(split)) + ".csv"));
    pid::write_decomposition_csv(est.decomposition.subset(rows), out);
    splits[std::string(to_string(split))] = pid::to_json(agg);
  }
  ordered_json doc;
  doc["n"] = table.size();
  doc["overall"] = pid::to_json(est.overall);
  doc["splits"] = splits;
  doc["entropy_training"] = history_json(est.entropy_history);
  doc["classifier_training"] = history_json(est.classifier_history);
  write_text(cfg.output_dir / "aggregates.json", doc.dump(2));
  return {{"command", "estimate"}, {"n", table.size()}, {"overall", doc["overall"]},
          {"splits", splits}};
}

ordered_json cmd_gate(const RunConfig& cfg) {
  ensure_output(cfg);
  const auto table = read_features(cfg);
  const auto texts = read_texts(cfg);

  std::optional<pid::PointwiseDecomposition> decomposition;
  if (cfg.gate.gate.mode == gate::GateMode::kInteractionGated) {
    const auto path = cfg.gate.decomposition.empty() ? cfg.output_dir / "decomposition.csv"
                                                     : cfg.gate.decomposition;
    auto in = open_in(path, "decomposition");
    decomposition = pid::read_decomposition_csv(in);
  }

  std::unique_ptr<gate::CaptionProvider> base;
  if (cfg.gate.provider == "synthetic-argmax") {
    base = std::make_unique<synth::ArgmaxCaptionProvider>();
  } else {
    if (cfg.gate.captions.empty()) throw ConfigError("gate.captions is not set");
    base = std::make_unique<gate::ManifestCaptionProvider>(
        gate::ManifestCaptionProvider::load(cfg.gate.captions));
  }
  gate::MemoizedCaptionProvider provider(*base, std::make_shared<gate::CaptionCache>());

  auto gc = cfg.gate.gate;
  gc.jobs = cfg.jobs;
  const auto manifest =
      gate::run_gate(table, texts, decomposition ? &*decomposition : nullptr, gc, provider);
  {
    auto out = open_out(cfg.output_dir / "augmented.jsonl");
    gate::write_augmented_manifest(manifest, out);
  }
  ordered_json summary{{"command", "gate"},
                       {"mode", gate::to_string(gc.mode)},
                       {"tau", gc.tau},
                       {"n", table.size()},
                       {"valid", manifest.valid_count},
                       {"k", manifest.budget},
                       {"selected", manifest.selected_count()},
                       {"failed", manifest.failed_ids}};
  write_text(cfg.output_dir / "gate_summary.json", summary.dump(2));
  return summary;
}

ordered_json cmd_corrupt(const RunConfig& cfg) {
  ensure_output(cfg);
  const auto& c = cfg.corruption;
  const std::string salt = std::to_string(cfg.sub_seed("corruption"));
  std::vector<corruption::LedgerEntry> ledger;
  std::size_t images = 0;
  std::size_t texts_written = 0;
  std::size_t excluded = 0;

  if (!cfg.data.images.empty()) {
    std::error_code ec;
    if (!fs::is_directory(cfg.data.images, ec)) {
      throw AssetError("image directory " + cfg.data.images.string() + " is not readable");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(cfg.data.images)) {
      if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<corruption::ImageSample> samples(files.size());
    corruption::parallel_for(files.size(), cfg.jobs, [&](std::size_t i) {
      samples[i] = {files[i].stem().string(), corruption::read_png(files[i])};
    });
    for (auto kind : c.image_kinds) {
      for (int level : c.image_levels) {
        const auto out = corruption::corrupt_images(samples, kind, level, salt, c.severity, cfg.jobs);
        const auto dir = cfg.output_dir / "images" / std::string(corruption::to_string(kind)) /
                         std::to_string(level);
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create " + dir.string());
        corruption::parallel_for(out.size(), cfg.jobs, [&](std::size_t i) {
          corruption::write_png(out[i], dir / (samples[i].sample_id + ".png"));
        });
        for (const auto& s : samples) {
          ledger.push_back({s.sample_id, std::string(corruption::to_string(kind)), level, 1, false});
        }
        images += out.size();
      }
    }
  }

  if (!cfg.data.texts.empty()) {
    const auto manifest = read_texts(cfg);
    std::vector<corruption::TextSample> samples;
    for (const auto& r : manifest) samples.push_back({r.sample_id, r.text});
    std::unique_ptr<corruption::SimilarityOracle> oracle;
    if (c.constant_similarity) {
      oracle = std::make_unique<corruption::ConstantOracle>(*c.constant_similarity);
    } else {
      oracle = std::make_unique<corruption::TrigramOracle>();
    }
    for (auto op : c.text_ops) {
      for (int level : c.text_levels) {
        const auto result =
            corruption::corrupt_texts(samples, op, level, salt, *oracle, c.text, cfg.jobs);
        TextManifest corrupted;
        for (std::size_t i = 0; i < samples.size(); ++i) {
          if (result.outputs[i].excluded()) {
            ++excluded;
            continue;
          }
          corrupted.push_back({samples[i].sample_id, *result.outputs[i].text, manifest[i].caption});
        }
        auto out = open_out(cfg.output_dir / "texts" / std::string(corruption::to_string(op)) /
                            ("level_" + std::to_string(level) + ".jsonl"));
        write_text_manifest(corrupted, out);
        texts_written += corrupted.size();
        ledger.insert(ledger.end(), result.ledger.begin(), result.ledger.end());
      }
    }
  }

  if (cfg.data.images.empty() && cfg.data.texts.empty()) {
    throw ConfigError("corrupt needs data.images and/or data.texts");
  }
  {
    auto out = open_out(cfg.output_dir / "corruption_ledger.jsonl");
    corruption::write_ledger(ledger, out);
  }
  return {{"command", "corrupt"},
          {"images_written", images},
          {"texts_written", texts_written},
          {"texts_excluded", excluded}};
}

namespace {

metrics::DiagnosisReport diagnose(const fs::path& path) {
  auto in = open_in(path, "response log");
  return metrics::classify_errors(metrics::read_response_log(in));
}

}  // namespace

ordered_json cmd_score(const RunConfig& cfg) {
  ensure_output(cfg);
  const auto& m = cfg.metrics;
  ordered_json summary{{"command", "score"}};
  bool did_something = false;

  if (!m.responses.empty()) {
    const auto report = diagnose(m.responses);
    write_text(cfg.output_dir / "diagnosis.json", metrics::diagnosis_to_json(report));
    summary["diagnosis"] = {{"LI", report.language_induced},
                            {"VI", report.visual_induced},
                            {"Mixed", report.mixed},
                            {"accuracy", report.accuracy},
                            {"consistency", report.consistency}};
    did_something = true;
  }

  if (!m.corrupted.empty()) {
    if (!m.clean_accuracy) throw ConfigError("metrics.corrupted needs metrics.clean_accuracy");
    const auto report = metrics::stability_report(*m.clean_accuracy, m.corrupted);
    write_text(cfg.output_dir / "stability.json", metrics::stability_to_json(report));
    auto out = open_out(cfg.output_dir / "stability.csv");
    metrics::write_stability_csv(report, out);
    summary["stability_cells"] = report.cells.size();
    did_something = true;
  }

  if (!m.comparisons.empty()) {
    std::map<std::string, std::vector<metrics::ComparisonRow>> by_rate;
    std::vector<std::string> rate_order;
    for (const auto& spec : m.comparisons) {
      if (!by_rate.contains(spec.rate)) rate_order.push_back(spec.rate);
      by_rate[spec.rate].push_back(
          metrics::compare(spec.model, spec.rate, diagnose(spec.baseline), diagnose(spec.augmented)));
    }
    std::vector<metrics::ComparisonRow> rows;
    for (const auto& rate : rate_order) {
      const auto& group = by_rate[rate];
      rows.insert(rows.end(), group.begin(), group.end());
      rows.push_back(metrics::macro_row(rate, group));
    }
    auto out = open_out(cfg.output_dir / "comparison.csv");
    metrics::write_comparison_csv(rows, out);
    summary["comparison_rows"] = rows.size();
    did_something = true;
  }

  if (!did_something) {
    throw ConfigError("score needs metrics.responses, metrics.corrupted or metrics.comparisons");
  }
  return summary;
}

namespace {

nlohmann::json read_json(const fs::path& path, const char* what) {
  auto in = open_in(path, what);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace

ordered_json cmd_report(const RunConfig& cfg) {
  ensure_output(cfg);
  const auto before = read_json(cfg.metrics.baseline_aggregates, "baseline aggregates");
  const auto after = read_json(cfg.metrics.augmented_aggregates, "augmented aggregates");

  auto section = [](const nlohmann::json& doc, const std::string& split) -> const nlohmann::json* {
    if (split == "overall") return doc.contains("overall") ? &doc["overall"] : &doc;
    if (!doc.contains("splits") || !doc["splits"].contains(split)) return nullptr;
    return &doc["splits"][split];
  };

  ordered_json report = ordered_json::object();
  std::ostringstream table;
  table << "split,component,baseline,augmented,change_pct\n";
  for (const std::string split : {"overall", "train", "val", "test"}) {
    const auto* b = section(before, split);
    const auto* a = section(after, split);
    if (b == nullptr || a == nullptr) continue;
    pid::AggregateInteractions base, aug;
    try {
      base = pid::aggregates_from_json(*b);
      aug = pid::aggregates_from_json(*a);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("aggregates file: " + std::string(e.what()));
    }
    const auto change = pid::relative_change(base, aug);
    ordered_json entry;
    for (std::size_t c = 0; c < 4; ++c) {
      const auto name = pid::kAggregateNames[c];
      entry[name] = {{"baseline", base.values()[c]},
                     {"augmented", aug.values()[c]},
                     {"change_pct", change[c] ? ordered_json(*change[c]) : ordered_json()}};
      table << split << ',' << name << ',' << csv::real(base.values()[c]) << ','
            << csv::real(aug.values()[c]) << ',' << (change[c] ? csv::real(*change[c]) : "")
            << '\n';
    }
    report[split] = entry;
  }
  write_text(cfg.output_dir / "report.json", report.dump(2));
  {
    auto out = open_out(cfg.output_dir / "report.csv");
    out << table.str();
  }
  return {{"command", "report"}, {"report", report}};
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const RankError*>(&e)) {
    return kExitNumerical;
  }
  if (dynamic_cast<const GateError*>(&e)) return kExitProvider;
  if (dynamic_cast<const AssetError*>(&e)) return kExitAsset;
  if (dynamic_cast<const SchemaError*>(&e)) return kExitSchema;
  if (dynamic_cast<const Error*>(&e)) return kExitConfig;
  return kExitInternal;
}

std::string error_json(const std::exception& e) {
  const auto* err = dynamic_cast<const Error*>(&e);
  ordered_json doc{{"error", e.what()},
                   {"kind", err ? err->kind() : "internal"},
                   {"exit_code", exit_code(e)}};
  return doc.dump();
}

}  // namespace migate::cli
