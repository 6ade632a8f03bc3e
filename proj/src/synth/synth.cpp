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

#include "migate/synth/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "migate/error.hpp"
#include "migate/gate/hash.hpp"

namespace migate::synth {

std::string_view to_string(GateName g) {
  switch (g) {
    case GateName::kXor: return "xor";
    case GateName::kCopy: return "copy";
    case GateName::kUniqueV: return "unique_v";
    case GateName::kUniqueVNoise: return "unique_v_noise";
  }
  return "?";
}

std::optional<GateName> parse_gate_name(std::string_view name) {
  for (auto g : {GateName::kXor, GateName::kCopy, GateName::kUniqueV, GateName::kUniqueVNoise}) {
    if (name == to_string(g)) return g;
  }
  return std::nullopt;
}

pid::DiscreteJointDistribution gate_distribution(GateName g) {
  pid::DiscreteJointDistribution d(2, 2, 2);
  for (Index v = 0; v < 2; ++v) {
    for (Index t = 0; t < 2; ++t) {
      switch (g) {
        case GateName::kXor: d.at(v, t, v ^ t) = 0.25; break;
        case GateName::kCopy:
          if (v == t) d.at(v, t, v) = 0.5;
          break;
        case GateName::kUniqueV:
          if (t == 0) d.at(v, t, v) = 0.5;
          break;
        case GateName::kUniqueVNoise: d.at(v, t, v) = 0.25; break;
      }
    }
  }
  d.validate();
  return d;
}

pid::DiscreteJointDistribution caption_all(const pid::DiscreteJointDistribution& dist) {
  const Index nv = dist.visual_size();
  pid::DiscreteJointDistribution out(nv, dist.text_size() * nv, dist.label_size());
  for (Index v = 0; v < nv; ++v) {
    for (Index t = 0; t < dist.text_size(); ++t) {
      for (Index y = 0; y < dist.label_size(); ++y) out.at(v, t * nv + v, y) = dist.at(v, t, y);
    }
  }
  return out;
}

Split split_of(std::string_view sample_id, std::string_view salt) {
  const double u = gate::hash_unit(sample_id, salt);
  if (u < 0.8) return Split::kTrain;
  if (u < 0.9) return Split::kVal;
  return Split::kTest;
}

namespace {

std::string sample_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%07zu", i);
  return buf;
}

// Jitter vectors for n samples in dimension d, one column each.
std::vector<std::vector<float>> jitter_vectors(std::size_t n, std::uint32_t d, double sigma,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<float>> eps(n, std::vector<float>(d));
  for (auto& e : eps) {
    for (auto& x : e) x = static_cast<float>(sigma * normal(rng));
  }
  return eps;
}

std::vector<float> embed(std::uint32_t symbol, const std::vector<float>& eps) {
  if (symbol >= eps.size()) throw DimensionError("symbol does not fit the embedding");
  std::vector<float> x = eps;
  x[symbol] += 1.0f;
  return x;
}

}  // namespace

SynthDataset sample(const pid::DiscreteJointDistribution& dist, const SynthConfig& cfg) {
  dist.validate();
  if (cfg.n == 0) throw ConfigError("synth needs at least one sample");
  if (!(cfg.jitter >= 0.0)) throw ConfigError("jitter must be non-negative");
  const auto width = static_cast<std::uint32_t>(std::max(dist.visual_size(), dist.text_size()));
  if (cfg.embed_dim < width) {
    throw ConfigError("embed_dim " + std::to_string(cfg.embed_dim) + " cannot hold " +
                      std::to_string(width) + " symbols");
  }

  std::vector<pid::Outcome> support;
  std::vector<double> mass;
  for (Index v = 0; v < dist.visual_size(); ++v) {
    for (Index t = 0; t < dist.text_size(); ++t) {
      for (Index y = 0; y < dist.label_size(); ++y) {
        if (dist.at(v, t, y) > 0) {
          support.push_back({v, t, y});
          mass.push_back(dist.at(v, t, y));
        }
      }
    }
  }

  std::mt19937_64 rng(cfg.seed);
  std::discrete_distribution<std::size_t> draw(mass.begin(), mass.end());
  const auto eps = jitter_vectors(cfg.n, cfg.embed_dim, cfg.jitter, rng());

  SynthDataset out;
  out.table.visual_dim = cfg.embed_dim;
  out.table.text_dim = cfg.embed_dim;
  out.table.num_classes = static_cast<std::uint32_t>(dist.label_size());
  out.table.records.reserve(cfg.n);
  out.texts.reserve(cfg.n);
  out.outcomes.reserve(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const auto& o = support[draw(rng)];
    FeatureRecord r;
    r.sample_id = sample_name(i);
    r.split = split_of(r.sample_id, cfg.split_salt);
    r.visual = embed(static_cast<std::uint32_t>(o.visual), eps[i]);
    r.text = embed(static_cast<std::uint32_t>(o.text), eps[i]);
    r.label = static_cast<std::uint32_t>(o.label);
    out.texts.push_back({r.sample_id, std::to_string(o.text), std::nullopt});
    out.table.records.push_back(std::move(r));
    out.outcomes.push_back(o);
  }
  return out;
}

std::uint32_t text_symbol(std::string_view text, std::string_view separator) {
  auto bit = [&](std::string_view s) -> std::uint32_t {
    if (s == "0") return 0;
    if (s == "1") return 1;
    throw SchemaError("synthetic text '" + std::string(text) + "' is not a binary symbol");
  };
  const auto pos = separator.empty() ? std::string_view::npos : text.find(separator);
  if (pos == std::string_view::npos) return bit(text);
  return 2 + 2 * bit(text.substr(0, pos)) + bit(text.substr(pos + separator.size()));
}

FeatureTable reembed(const SynthDataset& base, const std::vector<std::string>& texts,
                     double jitter, std::uint64_t seed, std::string_view separator) {
  const std::size_t n = base.table.size();
  if (texts.size() != n || base.outcomes.size() != n) {
    throw DimensionError("reembed needs one text per sample");
  }
  std::mt19937_64 rng(seed);
  const auto eps = jitter_vectors(n, kSymbolDim, jitter, rng());
  FeatureTable table;
  table.visual_dim = kSymbolDim;
  table.text_dim = kSymbolDim;
  table.num_classes = base.table.num_classes;
  table.records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& src = base.table.records[i];
    FeatureRecord r;
    r.sample_id = src.sample_id;
    r.split = src.split;
    r.label = src.label;
    r.visual = embed(static_cast<std::uint32_t>(base.outcomes[i].visual), eps[i]);
    r.text = embed(text_symbol(texts[i], separator), eps[i]);
    table.records.push_back(std::move(r));
  }
  return table;
}

std::vector<std::string> texts_of(const TextManifest& manifest) {
  std::vector<std::string> out;
  out.reserve(manifest.size());
  for (const auto& r : manifest) out.push_back(r.text);
  return out;
}

std::vector<std::string> texts_of(const gate::AugmentedManifest& manifest) {
  std::vector<std::string> out;
  out.reserve(manifest.records.size());
  for (const auto& r : manifest.records) out.push_back(r.augmented_text);
  return out;
}

std::optional<std::string> ArgmaxCaptionProvider::caption(const gate::CaptionRequest& request) {
  if (request.visual.empty()) return std::nullopt;
  const auto best = std::max_element(request.visual.begin(), request.visual.end());
  return std::to_string(best - request.visual.begin());
}

}  // namespace migate::synth
