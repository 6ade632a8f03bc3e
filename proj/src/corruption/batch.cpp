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

#include "migate/corruption/batch.hpp"

#include <atomic>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "migate/error.hpp"

namespace migate::corruption {

void write_ledger(const std::vector<LedgerEntry>& entries, std::ostream& out) {
  for (const auto& e : entries) {
    nlohmann::ordered_json row;
    row["sample_id"] = e.sample_id;
    row["kind"] = e.kind;
    row["level"] = e.level;
    row["attempts"] = e.attempts;
    row["excluded"] = e.excluded;
    out << row.dump() << '\n';
  }
  if (!out) throw IoError("failed writing corruption ledger");
}

std::vector<LedgerEntry> read_ledger(std::istream& in) {
  std::vector<LedgerEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto row = nlohmann::json::parse(line);
      entries.push_back({row.at("sample_id").get<std::string>(), row.at("kind").get<std::string>(),
                         row.at("level").get<int>(), row.at("attempts").get<int>(),
                         row.at("excluded").get<bool>()});
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("ledger line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return entries;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

TextBatchResult corrupt_texts(const std::vector<TextSample>& samples, TextOp op, int level,
                              std::string_view salt, const SimilarityOracle& oracle,
                              const TextCorruptionConfig& cfg, int jobs) {
  TextBatchResult result;
  result.outputs.resize(samples.size());
  const std::string kind(to_string(op));
  parallel_for(samples.size(), jobs, [&](std::size_t i) {
    const auto seed = sample_seed(samples[i].sample_id, kind, level, salt);
    result.outputs[i] = corrupt_text(samples[i].text, op, level, seed, oracle, cfg);
  });
  result.ledger.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    result.ledger.push_back({samples[i].sample_id, kind, level, result.outputs[i].attempts,
                             result.outputs[i].excluded()});
  }
  return result;
}

std::vector<ImageBuffer> corrupt_images(const std::vector<ImageSample>& samples, NoiseKind kind,
                                        int level, std::string_view salt,
                                        const SeverityTable& table, int jobs) {
  std::vector<ImageBuffer> out(samples.size());
  const std::string name(to_string(kind));
  parallel_for(samples.size(), jobs, [&](std::size_t i) {
    const auto seed = sample_seed(samples[i].sample_id, name, level, salt);
    out[i] = apply_noise(samples[i].image, kind, level, seed, table);
  });
  return out;
}

}  // namespace migate::corruption
