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

#include "migate/cli/config.hpp"

#include <fstream>
#include <set>

#include "migate/error.hpp"
#include "migate/gate/hash.hpp"

namespace migate::cli {

using nlohmann::json;

namespace {

// Reads typed members of one JSON object and rejects keys it never asked for.
class Section {
 public:
  Section(const json& doc, std::string path, std::set<std::string> allowed)
      : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw ConfigError(path_ + " must be an object");
    for (const auto& [key, value] : doc_.items()) {
      if (!allowed.contains(key)) throw ConfigError("unknown key " + path_ + "." + key);
    }
  }

  bool has(const char* key) const { return doc_.contains(key); }
  const json& raw(const char* key) const { return doc_.at(key); }
  std::string where(const char* key) const { return path_ + "." + key; }

  template <typename T>
  void read(const char* key, T& out) const {
    if (!doc_.contains(key)) return;
    try {
      out = doc_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  void read_path(const char* key, fs::path& out, const fs::path& base) const {
    std::string text;
    read(key, text);
    if (!text.empty()) out = fs::path(text).is_absolute() ? fs::path(text) : base / text;
  }

 private:
  const json& doc_;
  std::string path_;
};

void parse_train(const json& doc, const std::string& where, nn::TrainConfig& cfg) {
  Section s(doc, where,
            {"learning_rate", "batch_size", "max_epochs", "min_delta", "patience",
             "lr_step_factor", "lr_step_period"});
  s.read("learning_rate", cfg.learning_rate);
  s.read("batch_size", cfg.batch_size);
  s.read("max_epochs", cfg.max_epochs);
  s.read("min_delta", cfg.early_stop_min_delta);
  s.read("patience", cfg.early_stop_patience);
  s.read("lr_step_factor", cfg.lr_schedule.factor);
  s.read("lr_step_period", cfg.lr_schedule.period);
  cfg.validate();
}

void parse_data(const json& doc, const fs::path& base, DataSection& data) {
  Section s(doc, "data", {"features", "texts", "images", "synth"});
  s.read_path("features", data.features, base);
  s.read_path("texts", data.texts, base);
  s.read_path("images", data.images, base);
  if (s.has("synth")) {
    Section synth(s.raw("synth"), "data.synth", {"gate", "n", "jitter", "embed_dim"});
    synth.read("gate", data.synth.gate);
    synth.read("n", data.synth.n);
    synth.read("jitter", data.synth.jitter);
    synth.read("embed_dim", data.synth.embed_dim);
  }
}

void parse_estimator(const json& doc, pid::EstimatorConfig& cfg) {
  Section s(doc, "estimator",
            {"classifier", "entropy", "components", "hidden", "standardize", "pca_visual",
             "pca_text"});
  if (s.has("classifier")) parse_train(s.raw("classifier"), "estimator.classifier", cfg.classifier);
  if (s.has("entropy")) parse_train(s.raw("entropy"), "estimator.entropy", cfg.entropy);
  s.read("components", cfg.components);
  s.read("hidden", cfg.hidden);
  s.read("standardize", cfg.standardize);
  s.read("pca_visual", cfg.pca_visual);
  s.read("pca_text", cfg.pca_text);
  if (cfg.components < 1) throw ConfigError("estimator.components must be positive");
  for (auto h : cfg.hidden) {
    if (h < 1) throw ConfigError("estimator.hidden entries must be positive");
  }
  if (cfg.pca_visual < 0 || cfg.pca_text < 0) throw ConfigError("pca dims must be >= 0");
}

void parse_gate(const json& doc, const fs::path& base, GateSection& g) {
  Section s(doc, "gate",
            {"tau", "mode", "hash_salt", "separator", "decomposition", "captions", "provider"});
  s.read("tau", g.gate.tau);
  if (s.has("mode")) {
    std::string mode;
    s.read("mode", mode);
    const auto parsed = gate::parse_gate_mode(mode);
    if (!parsed) throw ConfigError("gate.mode must be interaction_gated or uniform_tier");
    g.gate.mode = *parsed;
  }
  s.read("hash_salt", g.gate.hash_salt);
  s.read("separator", g.gate.separator);
  s.read_path("decomposition", g.decomposition, base);
  s.read_path("captions", g.captions, base);
  s.read("provider", g.provider);
  if (g.provider != "manifest" && g.provider != "synthetic-argmax") {
    throw ConfigError("gate.provider must be manifest or synthetic-argmax");
  }
  g.gate.validate();
}

template <typename E, typename Parse>
std::vector<E> parse_names(const Section& s, const char* key, Parse parse) {
  std::vector<std::string> names;
  s.read(key, names);
  std::vector<E> out;
  for (const auto& n : names) {
    const auto v = parse(n);
    if (!v) throw ConfigError(s.where(key) + ": unknown entry '" + n + "'");
    out.push_back(*v);
  }
  return out;
}

void parse_corruption(const json& doc, CorruptionSection& c) {
  Section s(doc, "corruption",
            {"image_kinds", "image_levels", "text_ops", "text_levels", "oracle", "text_rates",
             "threshold", "max_attempts", "severity"});
  if (s.has("image_kinds")) {
    c.image_kinds = parse_names<corruption::NoiseKind>(s, "image_kinds", corruption::parse_noise_kind);
  }
  if (s.has("text_ops")) {
    c.text_ops = parse_names<corruption::TextOp>(s, "text_ops", corruption::parse_text_op);
  }
  s.read("image_levels", c.image_levels);
  s.read("text_levels", c.text_levels);
  if (s.has("oracle")) {
    const auto& oracle = s.raw("oracle");
    if (oracle.is_number()) {
      c.constant_similarity = oracle.get<double>();
    } else if (oracle != "trigram") {
      throw ConfigError("corruption.oracle must be \"trigram\" or a constant number");
    }
  }
  s.read("text_rates", c.text.rates);
  s.read("threshold", c.text.threshold);
  s.read("max_attempts", c.text.max_attempts);
  if (c.text.max_attempts < 1) throw ConfigError("corruption.max_attempts must be positive");
  for (double r : c.text.rates) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("corruption.text_rates must lie in [0, 1]");
  }
  for (int level : c.text_levels) {
    if (level < 1 || level > static_cast<int>(c.text.rates.size())) {
      throw ConfigError("corruption.text_levels entry " + std::to_string(level) + " out of range");
    }
  }
  if (s.has("severity")) {
    Section sev(s.raw("severity"), "corruption.severity", {"gaussian", "shot", "impulse"});
    sev.read("gaussian", c.severity.gaussian_sigma);
    sev.read("shot", c.severity.shot_lambda);
    sev.read("impulse", c.severity.impulse_probability);
    c.severity.validate();
  }
  for (int level : c.image_levels) {
    for (auto kind : c.image_kinds) {
      if (level < 1 || level > c.severity.levels(kind)) {
        throw ConfigError("corruption.image_levels entry " + std::to_string(level) +
                          " out of range for " + std::string(corruption::to_string(kind)));
      }
    }
  }
}

void parse_metrics(const json& doc, const fs::path& base, MetricsSection& m) {
  Section s(doc, "metrics",
            {"responses", "clean_accuracy", "corrupted", "comparisons", "baseline_aggregates",
             "augmented_aggregates"});
  s.read_path("responses", m.responses, base);
  if (s.has("clean_accuracy")) {
    double p = 0;
    s.read("clean_accuracy", p);
    m.clean_accuracy = p;
  }
  if (s.has("corrupted")) {
    const auto& rows = s.raw("corrupted");
    if (!rows.is_array()) throw ConfigError("metrics.corrupted must be an array");
    for (const auto& row : rows) {
      Section r(row, "metrics.corrupted[]", {"kind", "level", "accuracy"});
      metrics::CorruptedScore score;
      r.read("kind", score.kind);
      r.read("level", score.level);
      if (!r.has("accuracy")) throw ConfigError("metrics.corrupted[] needs an accuracy");
      r.read("accuracy", score.p_corrupted);
      m.corrupted.push_back(std::move(score));
    }
  }
  if (s.has("comparisons")) {
    const auto& rows = s.raw("comparisons");
    if (!rows.is_array()) throw ConfigError("metrics.comparisons must be an array");
    for (const auto& row : rows) {
      Section r(row, "metrics.comparisons[]", {"model", "rate", "baseline", "augmented"});
      ComparisonSpec spec;
      r.read("model", spec.model);
      r.read("rate", spec.rate);
      r.read_path("baseline", spec.baseline, base);
      r.read_path("augmented", spec.augmented, base);
      if (spec.baseline.empty() || spec.augmented.empty()) {
        throw ConfigError("metrics.comparisons[] needs baseline and augmented logs");
      }
      m.comparisons.push_back(std::move(spec));
    }
  }
  s.read_path("baseline_aggregates", m.baseline_aggregates, base);
  s.read_path("augmented_aggregates", m.augmented_aggregates, base);
}

}  // namespace

std::uint64_t RunConfig::sub_seed(std::string_view name) const {
  return gate::hash_u64(name, std::to_string(seed));
}

void apply_seed(RunConfig& cfg, std::uint64_t seed) {
  cfg.seed = seed;
  cfg.estimator.classifier.seed = cfg.sub_seed("estimator");
  cfg.estimator.entropy.seed = cfg.sub_seed("estimator");
}

RunConfig parse_config(const json& doc, const fs::path& base_dir) {
  Section s(doc, "config",
            {"data", "estimator", "gate", "corruption", "metrics", "output_dir", "seed"});
  RunConfig cfg;
  if (s.has("data")) parse_data(s.raw("data"), base_dir, cfg.data);
  if (s.has("estimator")) parse_estimator(s.raw("estimator"), cfg.estimator);
  if (s.has("gate")) parse_gate(s.raw("gate"), base_dir, cfg.gate);
  if (s.has("corruption")) parse_corruption(s.raw("corruption"), cfg.corruption);
  if (s.has("metrics")) parse_metrics(s.raw("metrics"), base_dir, cfg.metrics);
  s.read_path("output_dir", cfg.output_dir, base_dir);
  std::uint64_t seed = cfg.seed;
  s.read("seed", seed);
  apply_seed(cfg, seed);
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

}  // namespace migate::cli
