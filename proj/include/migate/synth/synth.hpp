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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "migate/feature_store.hpp"
#include "migate/gate/gate.hpp"
#include "migate/pid/exact_oracle.hpp"

namespace migate::synth {

using Eigen::Index;

enum class GateName { kXor, kCopy, kUniqueV, kUniqueVNoise };

std::string_view to_string(GateName g);
std::optional<GateName> parse_gate_name(std::string_view name);

// xor:            x_V, x_T uniform bits, y = x_V ^ x_T
// copy:           x_V = x_T = y, y a uniform bit
// unique_v:       y = x_V, x_T fixed at 0
// unique_v_noise: y = x_V, x_T an independent uniform bit
pid::DiscreteJointDistribution gate_distribution(GateName g);

// Every sample captioned: the text symbol becomes the pair (x_T, x_V),
// encoded as x_T * |V| + x_V.
pid::DiscreteJointDistribution caption_all(const pid::DiscreteJointDistribution& dist);

struct SynthConfig {
  std::size_t n = 1000;
  double jitter = 0.05;
  std::uint32_t embed_dim = 2;
  std::uint64_t seed = 42;
  std::string split_salt = "split";
};

struct SynthDataset {
  FeatureTable table;
  TextManifest texts;
  std::vector<pid::Outcome> outcomes;  // table order
};

// Draws n outcomes of `dist`, embeds symbol a as onehot(a) + jitter * eps
// with one eps ~ N(0, I) per sample shared by both modalities, and splits
// 80/10/10 by hash_unit(sample_id, split_salt). Text rows carry x_T as a
// decimal string.
SynthDataset sample(const pid::DiscreteJointDistribution& dist, const SynthConfig& cfg);

Split split_of(std::string_view sample_id, std::string_view salt);

// Symbol of a text row: "b" -> b, "b<sep>a" (a captioned row) -> 2 + 2b + a.
// Only binary symbols are accepted; anything else raises SchemaError.
std::uint32_t text_symbol(std::string_view text, std::string_view separator = "\n");

inline constexpr std::uint32_t kSymbolDim = 6;

// Rebuilds the table of `base` from (possibly caption-augmented) texts in a
// kSymbolDim one-hot space on both modalities, with the same shared jitter
// scheme seeded by `seed`.
FeatureTable reembed(const SynthDataset& base, const std::vector<std::string>& texts,
                     double jitter, std::uint64_t seed, std::string_view separator = "\n");

std::vector<std::string> texts_of(const TextManifest& manifest);
std::vector<std::string> texts_of(const gate::AugmentedManifest& manifest);

// Captions a sample with the decimal index of its largest visual feature.
class ArgmaxCaptionProvider : public gate::CaptionProvider {
 public:
  std::string id() const override { return "synthetic-argmax"; }
  std::optional<std::string> caption(const gate::CaptionRequest& request) override;
};

}  // namespace migate::synth
