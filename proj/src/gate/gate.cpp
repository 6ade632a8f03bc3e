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

#include "migate/gate/gate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "migate/error.hpp"
#include "migate/gate/hash.hpp"
#include "migate/log.hpp"

namespace migate::gate {

std::string_view to_string(GateMode mode) {
  return mode == GateMode::kInteractionGated ? "interaction_gated" : "uniform_tier";
}

std::optional<GateMode> parse_gate_mode(std::string_view name) {
  if (name == "interaction_gated") return GateMode::kInteractionGated;
  if (name == "uniform_tier") return GateMode::kUniformTier;
  return std::nullopt;
}

void GateConfig::validate() const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("gate tau must lie in [0, 1]");
  if (jobs < 1) throw ConfigError("gate jobs must be at least 1");
}

ManifestCaptionProvider::ManifestCaptionProvider(std::string provider_id,
                                                 std::map<std::string, std::string> captions)
    : id_(std::move(provider_id)), captions_(std::move(captions)) {}

ManifestCaptionProvider ManifestCaptionProvider::parse(std::istream& in, std::string provider_id) {
  std::map<std::string, std::string> captions;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError("captions line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!row.is_object() || !row.contains("sample_id") || !row["sample_id"].is_string()) {
      throw SchemaError("captions line " + std::to_string(line_no) + ": missing sample_id");
    }
    const auto id = row["sample_id"].get<std::string>();
    if (auto it = row.find("caption"); it != row.end() && it->is_string()) {
      captions[id] = it->get<std::string>();
    } else if (!row.contains("error")) {
      throw SchemaError("captions line " + std::to_string(line_no) +
                        ": needs a caption string or an error entry");
    }
  }
  return ManifestCaptionProvider(std::move(provider_id), std::move(captions));
}

ManifestCaptionProvider ManifestCaptionProvider::load(const std::filesystem::path& path,
                                                      std::string provider_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open captions file " + path.string());
  return parse(in, provider_id.empty() ? path.filename().string() : std::move(provider_id));
}

std::optional<std::string> ManifestCaptionProvider::caption(const CaptionRequest& request) {
  const auto it = captions_.find(std::string(request.sample_id));
  if (it == captions_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> CaptionCache::find(const std::string& provider,
                                              const std::string& sample_id) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find({provider, sample_id});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void CaptionCache::store(const std::string& provider, const std::string& sample_id,
                         std::string caption) {
  std::lock_guard lock(mutex_);
  entries_.try_emplace({provider, sample_id}, std::move(caption));
}

std::size_t CaptionCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

MemoizedCaptionProvider::MemoizedCaptionProvider(CaptionProvider& inner,
                                                 std::shared_ptr<CaptionCache> cache)
    : inner_(inner), cache_(std::move(cache)) {
  if (!cache_) cache_ = std::make_shared<CaptionCache>();
}

std::optional<std::string> MemoizedCaptionProvider::caption(const CaptionRequest& request) {
  const std::string provider = inner_.id();
  const std::string sample_id(request.sample_id);
  if (auto hit = cache_->find(provider, sample_id)) return hit;
  auto fresh = inner_.caption(request);
  if (fresh) {
    cache_->store(provider, sample_id, *fresh);
    // A racing request may have stored first; always hand back the cached copy.
    return cache_->find(provider, sample_id);
  }
  return fresh;
}

std::size_t AugmentedManifest::selected_count() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return r.selected; }));
}

std::vector<Index> select_valid(const pid::PointwiseDecomposition& d) {
  std::vector<Index> valid;
  for (Index i = 0; i < d.size(); ++i) {
    const double peak = std::max({d.r(i), d.u_visual(i), d.u_text(i), d.s(i)});
    if (d.u_visual(i) >= peak) valid.push_back(i);
  }
  return valid;
}

std::size_t caption_budget(double tau, std::size_t num_samples, std::size_t num_valid) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in [0, 1]");
  // The small slack keeps products such as 0.29 * 100 from flooring to 28.
  const double scaled = tau * static_cast<double>(num_samples);
  const auto floor_count = static_cast<std::size_t>(std::floor(scaled + 1e-9 * std::max(1.0, scaled)));
  return std::min({floor_count, num_valid, num_samples});
}

std::vector<Index> choose_caption_set(std::span<const Index> valid, std::size_t num_samples,
                                      double tau, std::span<const double> tiers,
                                      std::span<const std::string> sample_ids) {
  const std::size_t k = caption_budget(tau, num_samples, valid.size());
  std::vector<Index> ordered(valid.begin(), valid.end());
  for (Index i : ordered) {
    if (i < 0 || static_cast<std::size_t>(i) >= tiers.size() ||
        static_cast<std::size_t>(i) >= sample_ids.size()) {
      throw DimensionError("choose_caption_set: index without tier or sample id");
    }
  }
  std::sort(ordered.begin(), ordered.end(), [&](Index a, Index b) {
    const auto ua = static_cast<std::size_t>(a);
    const auto ub = static_cast<std::size_t>(b);
    if (tiers[ua] != tiers[ub]) return tiers[ua] < tiers[ub];
    return sample_ids[ua] < sample_ids[ub];
  });
  ordered.resize(k);
  return ordered;
}

AugmentedManifest run_gate(const FeatureTable& table, const TextManifest& texts,
                           const pid::PointwiseDecomposition* decomposition,
                           const GateConfig& cfg, CaptionProvider& provider) {
  cfg.validate();
  const std::size_t n = table.size();

  std::unordered_map<std::string_view, const TextManifestRecord*> text_by_id;
  for (const auto& record : texts) text_by_id.emplace(record.sample_id, &record);
  std::vector<std::string> ids;
  std::vector<double> tiers;
  ids.reserve(n);
  tiers.reserve(n);
  for (const auto& record : table.records) {
    if (!text_by_id.contains(record.sample_id)) {
      throw SchemaError("text manifest has no entry for sample '" + record.sample_id + "'");
    }
    ids.push_back(record.sample_id);
    tiers.push_back(hash_unit(record.sample_id, cfg.hash_salt));
  }

  std::vector<Index> valid;
  if (cfg.mode == GateMode::kUniformTier) {
    valid.resize(n);
    for (std::size_t i = 0; i < n; ++i) valid[i] = static_cast<Index>(i);
  } else {
    if (decomposition == nullptr) {
      throw ConfigError("interaction_gated mode needs a decomposition");
    }
    std::unordered_map<std::string_view, Index> row_by_id;
    for (std::size_t i = 0; i < decomposition->sample_ids.size(); ++i) {
      row_by_id.emplace(decomposition->sample_ids[i], static_cast<Index>(i));
    }
    std::vector<Index> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = row_by_id.find(ids[i]);
      if (it == row_by_id.end()) {
        throw SchemaError("decomposition has no row for sample '" + ids[i] + "'");
      }
      rows[i] = it->second;
    }
    const auto aligned = decomposition->subset(rows);
    valid = select_valid(aligned);
  }

  const auto chosen = choose_caption_set(valid, n, cfg.tau, tiers, ids);

  // Captions land in slots by position, so completion order cannot leak
  // into the manifest.
  std::vector<std::optional<std::string>> captions(chosen.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t slot = next++; slot < chosen.size(); slot = next++) {
      const auto& record = table.records[static_cast<std::size_t>(chosen[slot])];
      captions[slot] = provider.caption({record.sample_id, record.visual});
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), chosen.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  AugmentedManifest manifest;
  manifest.valid_count = valid.size();
  manifest.budget = chosen.size();
  manifest.records.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& out = manifest.records[i];
    out.sample_id = ids[i];
    out.tier = tiers[i];
    out.augmented_text = text_by_id.at(ids[i])->text;
  }
  for (std::size_t slot = 0; slot < chosen.size(); ++slot) {
    auto& out = manifest.records[static_cast<std::size_t>(chosen[slot])];
    if (!captions[slot]) {
      manifest.failed_ids.push_back(out.sample_id);
      log().warn("caption provider '{}' failed for sample '{}'", provider.id(), out.sample_id);
      continue;
    }
    out.selected = true;
    out.caption = *captions[slot];
    out.augmented_text += cfg.separator;
    out.augmented_text += *captions[slot];
  }
  if (!chosen.empty() && manifest.failed_ids.size() == chosen.size()) {
    std::string list;
    for (const auto& id : manifest.failed_ids) list += (list.empty() ? "" : ",") + id;
    throw GateError("caption provider '" + provider.id() + "' failed for every chosen sample: " +
                    list);
  }
  return manifest;
}

std::vector<double> mixture_weights(std::span<const double> counts, double temperature) {
  std::vector<double> weights;
  weights.reserve(counts.size());
  for (double count : counts) {
    if (!(count > 0.0)) throw DomainError("mixture_weights: counts must be positive");
    weights.push_back(std::pow(count, temperature));
  }
  return weights;
}

void write_augmented_manifest(const AugmentedManifest& manifest, std::ostream& out) {
  for (const auto& record : manifest.records) {
    nlohmann::ordered_json row;
    row["sample_id"] = record.sample_id;
    row["selected"] = record.selected;
    row["tier"] = record.tier;
    row["caption"] = record.caption ? nlohmann::ordered_json(*record.caption) : nullptr;
    row["augmented_text"] = record.augmented_text;
    out << row.dump() << '\n';
  }
  if (!out) throw IoError("failed writing augmented manifest");
}

std::vector<AugmentedRecord> read_augmented_manifest(std::istream& in) {
  std::vector<AugmentedRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto row = nlohmann::json::parse(line);
      AugmentedRecord record;
      record.sample_id = row.at("sample_id").get<std::string>();
      record.selected = row.at("selected").get<bool>();
      record.tier = row.at("tier").get<double>();
      if (!row.at("caption").is_null()) record.caption = row.at("caption").get<std::string>();
      record.augmented_text = row.at("augmented_text").get<std::string>();
      records.push_back(std::move(record));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("augmented manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

}  // namespace migate::gate
