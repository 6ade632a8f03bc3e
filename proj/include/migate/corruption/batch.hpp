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

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "migate/corruption/image.hpp"
#include "migate/corruption/text.hpp"

namespace migate::corruption {

struct LedgerEntry {
  std::string sample_id;
  std::string kind;
  int level = 0;
  int attempts = 0;
  bool excluded = false;

  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

void write_ledger(const std::vector<LedgerEntry>& entries, std::ostream& out);
std::vector<LedgerEntry> read_ledger(std::istream& in);

struct TextSample {
  std::string sample_id;
  std::string text;
};

struct TextBatchResult {
  std::vector<TextCorruption> outputs;  // input order
  std::vector<LedgerEntry> ledger;
};

// Corrupts every sample with its own seed from sample_seed(id, op, level,
// salt). Output is independent of `jobs`.
TextBatchResult corrupt_texts(const std::vector<TextSample>& samples, TextOp op, int level,
                              std::string_view salt, const SimilarityOracle& oracle,
                              const TextCorruptionConfig& cfg = {}, int jobs = 1);

struct ImageSample {
  std::string sample_id;
  ImageBuffer image;
};

std::vector<ImageBuffer> corrupt_images(const std::vector<ImageSample>& samples, NoiseKind kind,
                                        int level, std::string_view salt,
                                        const SeverityTable& table = SeverityTable::standard(),
                                        int jobs = 1);

// Runs fn(i) for i in [0, n) over up to `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace migate::corruption
