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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "migate/corruption/image.hpp"
#include "migate/corruption/text.hpp"
#include "migate/gate/gate.hpp"
#include "migate/metrics/stability.hpp"
#include "migate/pid/estimator.hpp"

namespace migate::cli {

namespace fs = std::filesystem;

struct SynthSection {
  std::string gate = "xor";
  std::size_t n = 1000;
  double jitter = 0.05;
  std::uint32_t embed_dim = 2;
};

struct DataSection {
  fs::path features;  // MIFS table
  fs::path texts;     // text manifest JSONL
  fs::path images;    // directory of PNG files
  SynthSection synth;
};

struct GateSection {
  gate::GateConfig gate;
  fs::path decomposition;             // defaults to <output_dir>/decomposition.csv
  fs::path captions;                  // caption JSONL for the manifest provider
  std::string provider = "manifest";  // or "synthetic-argmax"
};

struct CorruptionSection {
  std::vector<corruption::NoiseKind> image_kinds{corruption::NoiseKind::kGaussian,
                                                 corruption::NoiseKind::kShot,
                                                 corruption::NoiseKind::kImpulse};
  std::vector<int> image_levels{1, 2, 3, 4, 5};
  std::vector<corruption::TextOp> text_ops{corruption::TextOp::kInsert,
                                           corruption::TextOp::kDrop,
                                           corruption::TextOp::kReplace};
  std::vector<int> text_levels{1, 2, 3, 4, 5};
  std::optional<double> constant_similarity;  // unset selects the trigram oracle
  corruption::TextCorruptionConfig text;
  corruption::SeverityTable severity = corruption::SeverityTable::standard();
};

struct ComparisonSpec {
  std::string model;
  std::string rate;
  fs::path baseline;   // response log
  fs::path augmented;  // response log
};

struct MetricsSection {
  fs::path responses;
  std::optional<double> clean_accuracy;
  std::vector<metrics::CorruptedScore> corrupted;
  std::vector<ComparisonSpec> comparisons;
  fs::path baseline_aggregates;  // inputs of `report`
  fs::path augmented_aggregates;
};

struct RunConfig {
  DataSection data;
  pid::EstimatorConfig estimator;
  GateSection gate;
  CorruptionSection corruption;
  MetricsSection metrics;
  fs::path output_dir = "migate_out";
  std::uint64_t seed = 42;
  int jobs = 1;

  // Named sub-seed: hash_u64(name, decimal seed).
  std::uint64_t sub_seed(std::string_view name) const;
};

// Unknown keys anywhere raise ConfigError. Relative paths resolve against
// `base_dir`.
RunConfig parse_config(const nlohmann::json& doc, const fs::path& base_dir = {});
RunConfig load_config(const fs::path& path);

// Seeds every training run of the estimator from sub_seed("estimator").
void apply_seed(RunConfig& cfg, std::uint64_t seed);

}  // namespace migate::cli
