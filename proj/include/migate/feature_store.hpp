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

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace migate {

enum class Split : std::uint8_t { kTrain = 0, kVal = 1, kTest = 2 };

inline constexpr std::array<Split, 3> kAllSplits{Split::kTrain, Split::kVal, Split::kTest};

std::string_view to_string(Split split);
std::optional<Split> parse_split(std::string_view name);

// One paired sample: visual and text feature vectors plus its class label.
struct FeatureRecord {
  std::string sample_id;
  Split split = Split::kTrain;
  std::vector<float> visual;
  std::vector<float> text;
  std::uint32_t label = 0;

  // Feature comparison is on IEEE-754 bit patterns, so NaN payloads and
  // signed zeros must match too.
  friend bool operator==(const FeatureRecord& a, const FeatureRecord& b);
};

struct FeatureTable {
  std::uint32_t visual_dim = 0;
  std::uint32_t text_dim = 0;
  std::uint32_t num_classes = 0;
  std::vector<FeatureRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  friend bool operator==(const FeatureTable& a, const FeatureTable& b) = default;
};

struct Violation {
  std::string sample_id;
  std::string rule;
  std::string detail;
};

// "MIFS" binary layout, all little-endian:
//   magic[4] version:u16 N:u64 d_V:u32 d_T:u32 C:u32
//   per record: id_len:u32 id[id_len] split:u8 x_V:f32[d_V] x_T:f32[d_T] y:u32
inline constexpr std::array<char, 4> kTableMagic{'M', 'I', 'F', 'S'};
inline constexpr std::uint16_t kTableVersion = 1;
inline constexpr std::size_t kTableHeaderBytes = 4 + 2 + 8 + 4 + 4 + 4;

// Refuses (InvariantError) to serialize a table that fails validate_table.
std::uint64_t write_table(const FeatureTable& table, std::ostream& out);
FeatureTable read_table(std::istream& in);

void save_table(const FeatureTable& table, const std::filesystem::path& path);
FeatureTable load_table(const std::filesystem::path& path);

std::vector<Violation> validate_table(const FeatureTable& table);

FeatureTable select_split(const FeatureTable& table, Split split);

// Column-per-sample views used by the estimators.
Eigen::MatrixXf visual_matrix(const FeatureTable& table);
Eigen::MatrixXf text_matrix(const FeatureTable& table);
Eigen::MatrixXf joint_matrix(const FeatureTable& table);
std::vector<std::uint32_t> labels(const FeatureTable& table);

// Text side of a dataset, keyed by sample_id and stored as JSONL with
// {"sample_id", "text", "caption"} objects.
struct TextManifestRecord {
  std::string sample_id;
  std::string text;
  std::optional<std::string> caption;

  friend bool operator==(const TextManifestRecord&, const TextManifestRecord&) = default;
};

using TextManifest = std::vector<TextManifestRecord>;

void write_text_manifest(const TextManifest& manifest, std::ostream& out);
// Throws SchemaError on malformed lines or duplicate sample ids.
TextManifest read_text_manifest(std::istream& in);

void save_text_manifest(const TextManifest& manifest, const std::filesystem::path& path);
TextManifest load_text_manifest(const std::filesystem::path& path);

}  // namespace migate
