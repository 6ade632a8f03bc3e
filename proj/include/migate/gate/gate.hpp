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

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "migate/feature_store.hpp"
#include "migate/pid/decomposition.hpp"

namespace migate::gate {

using Eigen::Index;

enum class GateMode { kInteractionGated, kUniformTier };

std::string_view to_string(GateMode mode);
std::optional<GateMode> parse_gate_mode(std::string_view name);

struct GateConfig {
  double tau = 0.0;  // fraction of the dataset to caption, in [0, 1]
  GateMode mode = GateMode::kInteractionGated;
  std::string hash_salt;
  std::string separator = "\n";
  int jobs = 1;  // concurrent caption requests

  void validate() const;
};

struct CaptionRequest {
  std::string_view sample_id;
  std::span<const float> visual;
};

// Image-to-text captioner. Implementations must tolerate concurrent calls
// when the gate runs with jobs > 1; nullopt signals a failed caption.
class CaptionProvider {
 public:
  virtual ~CaptionProvider() = default;
  virtual std::string id() const = 0;
  virtual std::optional<std::string> caption(const CaptionRequest& request) = 0;
};

// Serves captions from a JSONL file of {"sample_id", "caption"} rows; rows of
// the form {"sample_id", "error"} and ids absent from the file fail.
class ManifestCaptionProvider : public CaptionProvider {
 public:
  ManifestCaptionProvider(std::string provider_id, std::map<std::string, std::string> captions);
  static ManifestCaptionProvider load(const std::filesystem::path& path,
                                      std::string provider_id = {});
  static ManifestCaptionProvider parse(std::istream& in, std::string provider_id);

  std::string id() const override { return id_; }
  std::optional<std::string> caption(const CaptionRequest& request) override;

 private:
  std::string id_;
  std::map<std::string, std::string> captions_;
};

// Cache of successful captions keyed by (provider id, sample id). Sharing one
// cache between gate runs makes a larger tau reuse the smaller tau's
// captions verbatim.
class CaptionCache {
 public:
  std::optional<std::string> find(const std::string& provider, const std::string& sample_id) const;
  void store(const std::string& provider, const std::string& sample_id, std::string caption);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::pair<std::string, std::string>, std::string> entries_;
};

class MemoizedCaptionProvider : public CaptionProvider {
 public:
  MemoizedCaptionProvider(CaptionProvider& inner, std::shared_ptr<CaptionCache> cache);

  std::string id() const override { return inner_.id(); }
  std::optional<std::string> caption(const CaptionRequest& request) override;

 private:
  CaptionProvider& inner_;
  std::shared_ptr<CaptionCache> cache_;
};

struct AugmentedRecord {
  std::string sample_id;
  bool selected = false;
  double tier = 0.0;
  std::optional<std::string> caption;
  std::string augmented_text;

  friend bool operator==(const AugmentedRecord&, const AugmentedRecord&) = default;
};

struct AugmentedManifest {
  std::vector<AugmentedRecord> records;  // table order
  std::size_t valid_count = 0;
  std::size_t budget = 0;                // k
  std::vector<std::string> failed_ids;   // provider failures among the chosen k

  std::size_t selected_count() const;
};

// Rows where u_V attains max(r, u_V, u_T, s); ties count as dominant.
std::vector<Index> select_valid(const pid::PointwiseDecomposition& decomposition);

// k = min(floor(tau * N), |valid|).
std::size_t caption_budget(double tau, std::size_t num_samples, std::size_t num_valid);

// The k members of `valid` with the smallest tier value, ties broken by
// sample id; returned in that order.
std::vector<Index> choose_caption_set(std::span<const Index> valid, std::size_t num_samples,
                                      double tau, std::span<const double> tiers,
                                      std::span<const std::string> sample_ids);

// Gate over every record of the table. The text manifest and, in
// interaction-gated mode, the decomposition must cover every sample id.
AugmentedManifest run_gate(const FeatureTable& table, const TextManifest& texts,
                           const pid::PointwiseDecomposition* decomposition,
                           const GateConfig& cfg, CaptionProvider& provider);

// W_i = N_i^temperature.
std::vector<double> mixture_weights(std::span<const double> counts, double temperature = 0.5);

// JSONL rows {"sample_id", "selected", "tier", "caption", "augmented_text"}.
void write_augmented_manifest(const AugmentedManifest& manifest, std::ostream& out);
std::vector<AugmentedRecord> read_augmented_manifest(std::istream& in);

}  // namespace migate::gate
