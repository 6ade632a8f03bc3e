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

#include "migate/feature_store.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "migate/binary_io.hpp"
#include "migate/error.hpp"

namespace migate {

namespace {

bool same_bits(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);
}

Eigen::MatrixXf stack(const FeatureTable& table, bool visual, bool text) {
  const Eigen::Index rows = (visual ? table.visual_dim : 0) + (text ? table.text_dim : 0);
  Eigen::MatrixXf out(rows, static_cast<Eigen::Index>(table.size()));
  for (std::size_t n = 0; n < table.size(); ++n) {
    const auto& record = table.records[n];
    Eigen::Index row = 0;
    const auto col = static_cast<Eigen::Index>(n);
    if (visual) {
      for (float v : record.visual) out(row++, col) = v;
    }
    if (text) {
      for (float v : record.text) out(row++, col) = v;
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "unknown";
}

std::optional<Split> parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  return std::nullopt;
}

bool operator==(const FeatureRecord& a, const FeatureRecord& b) {
  return a.sample_id == b.sample_id && a.split == b.split && a.label == b.label &&
         same_bits(a.visual, b.visual) && same_bits(a.text, b.text);
}

std::vector<Violation> validate_table(const FeatureTable& table) {
  std::vector<Violation> violations;
  std::unordered_set<std::string_view> seen;
  seen.reserve(table.size());
  for (const auto& record : table.records) {
    if (!seen.insert(record.sample_id).second) {
      violations.push_back({record.sample_id, "unique_sample_id", "duplicate sample_id"});
    }
    if (record.visual.size() != table.visual_dim) {
      violations.push_back({record.sample_id, "visual_dim",
                            "x_V has " + std::to_string(record.visual.size()) + " values, header d_V=" +
                                std::to_string(table.visual_dim)});
    }
    if (record.text.size() != table.text_dim) {
      violations.push_back({record.sample_id, "text_dim",
                            "x_T has " + std::to_string(record.text.size()) + " values, header d_T=" +
                                std::to_string(table.text_dim)});
    }
    if (record.label >= table.num_classes) {
      violations.push_back({record.sample_id, "label_range",
                            "y=" + std::to_string(record.label) + " not < C=" +
                                std::to_string(table.num_classes)});
    }
    if (static_cast<std::uint8_t>(record.split) > static_cast<std::uint8_t>(Split::kTest)) {
      violations.push_back({record.sample_id, "split", "unknown split value"});
    }
  }
  return violations;
}

std::uint64_t write_table(const FeatureTable& table, std::ostream& out) {
  if (const auto violations = validate_table(table); !violations.empty()) {
    const auto& first = violations.front();
    throw InvariantError("refusing to write invalid table (" + std::to_string(violations.size()) +
                         " violations; first: " + first.rule + " at '" + first.sample_id + "')");
  }
  io::Writer writer(out);
  writer.bytes(kTableMagic.data(), kTableMagic.size());
  writer.u16(kTableVersion);
  writer.u64(table.size());
  writer.u32(table.visual_dim);
  writer.u32(table.text_dim);
  writer.u32(table.num_classes);
  for (const auto& record : table.records) {
    writer.u32(static_cast<std::uint32_t>(record.sample_id.size()));
    writer.bytes(record.sample_id.data(), record.sample_id.size());
    writer.u8(static_cast<std::uint8_t>(record.split));
    for (float v : record.visual) writer.f32(v);
    for (float v : record.text) writer.f32(v);
    writer.u32(record.label);
  }
  return writer.count();
}

FeatureTable read_table(std::istream& in) {
  io::Reader reader(in);
  std::array<char, 4> magic{};
  try {
    reader.bytes(magic.data(), magic.size(), "magic");
  } catch (const TruncationError&) {
    throw FormatError("stream too short for MIFS magic");
  }
  if (magic != kTableMagic) throw FormatError("bad magic: not a MIFS feature table");
  const std::uint16_t version = reader.u16("version");
  if (version != kTableVersion) {
    throw FormatError("unsupported MIFS version " + std::to_string(version));
  }
  const std::uint64_t count = reader.u64("record count");
  FeatureTable table;
  table.visual_dim = reader.u32("d_V");
  table.text_dim = reader.u32("d_T");
  table.num_classes = reader.u32("C");

  // A corrupt count must not trigger a huge allocation up front.
  table.records.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 16)));
  for (std::uint64_t n = 0; n < count; ++n) {
    if (reader.at_end()) {
      throw TruncationError("header claims " + std::to_string(count) + " records but stream holds " +
                            std::to_string(n));
    }
    FeatureRecord record;
    const std::uint32_t id_len = reader.u32("sample_id length");
    record.sample_id.resize(id_len);
    reader.bytes(record.sample_id.data(), id_len, "sample_id");
    const std::uint8_t split = reader.u8("split");
    if (split > static_cast<std::uint8_t>(Split::kTest)) {
      throw CorruptionError("record " + std::to_string(n) + " has invalid split byte " +
                            std::to_string(split));
    }
    record.split = static_cast<Split>(split);
    record.visual.resize(table.visual_dim);
    for (auto& v : record.visual) v = reader.f32("x_V");
    record.text.resize(table.text_dim);
    for (auto& v : record.text) v = reader.f32("x_T");
    record.label = reader.u32("label");
    table.records.push_back(std::move(record));
  }
  if (!reader.at_end()) {
    throw CorruptionError("trailing bytes after " + std::to_string(count) +
                          " records: header count does not match payload");
  }
  return table;
}

void save_table(const FeatureTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_table(table, out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

FeatureTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_table(in);
}

FeatureTable select_split(const FeatureTable& table, Split split) {
  FeatureTable out;
  out.visual_dim = table.visual_dim;
  out.text_dim = table.text_dim;
  out.num_classes = table.num_classes;
  for (const auto& record : table.records) {
    if (record.split == split) out.records.push_back(record);
  }
  return out;
}

Eigen::MatrixXf visual_matrix(const FeatureTable& table) { return stack(table, true, false); }
Eigen::MatrixXf text_matrix(const FeatureTable& table) { return stack(table, false, true); }
Eigen::MatrixXf joint_matrix(const FeatureTable& table) { return stack(table, true, true); }

std::vector<std::uint32_t> labels(const FeatureTable& table) {
  std::vector<std::uint32_t> out;
  out.reserve(table.size());
  for (const auto& record : table.records) out.push_back(record.label);
  return out;
}

void write_text_manifest(const TextManifest& manifest, std::ostream& out) {
  for (const auto& record : manifest) {
    nlohmann::ordered_json line;
    line["sample_id"] = record.sample_id;
    line["text"] = record.text;
    line["caption"] = record.caption ? nlohmann::ordered_json(*record.caption) : nullptr;
    out << line.dump() << '\n';
  }
  if (!out) throw IoError("failed writing text manifest");
}

TextManifest read_text_manifest(std::istream& in) {
  TextManifest manifest;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json object;
    try {
      object = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!object.is_object() || !object.contains("sample_id") || !object["sample_id"].is_string() ||
        !object.contains("text") || !object["text"].is_string()) {
      throw SchemaError("manifest line " + std::to_string(line_no) +
                        ": expected string fields sample_id and text");
    }
    TextManifestRecord record;
    record.sample_id = object["sample_id"].get<std::string>();
    record.text = object["text"].get<std::string>();
    if (auto it = object.find("caption"); it != object.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw SchemaError("manifest line " + std::to_string(line_no) + ": caption must be a string");
      }
      record.caption = it->get<std::string>();
    }
    if (!seen.insert(record.sample_id).second) {
      throw SchemaError("duplicate sample_id '" + record.sample_id + "' in text manifest");
    }
    manifest.push_back(std::move(record));
  }
  return manifest;
}

void save_text_manifest(const TextManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_text_manifest(manifest, out);
}

TextManifest load_text_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_text_manifest(in);
}

}  // namespace migate
