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

namespace migate::corruption {

enum class TextOp { kInsert, kDrop, kReplace };

std::string_view to_string(TextOp op);
std::optional<TextOp> parse_text_op(std::string_view name);

class SimilarityOracle {
 public:
  virtual ~SimilarityOracle() = default;
  virtual double similarity(std::string_view a, std::string_view b) const = 0;
};

// Cosine between character-trigram count vectors. Code points are padded
// with one sentinel on each side, so single characters still form a trigram.
double ngram_cosine(std::string_view a, std::string_view b);

class TrigramOracle : public SimilarityOracle {
 public:
  double similarity(std::string_view a, std::string_view b) const override {
    return ngram_cosine(a, b);
  }
};

class ConstantOracle : public SimilarityOracle {
 public:
  explicit ConstantOracle(double value) : value_(value) {}
  double similarity(std::string_view, std::string_view) const override { return value_; }

 private:
  double value_;
};

inline constexpr double kFidelityThreshold = 0.2;
inline constexpr int kMaxAttempts = 100;

struct TextCorruptionConfig {
  std::vector<double> rates{0.025, 0.05, 0.10, 0.15, 0.25};
  double threshold = kFidelityThreshold;
  int max_attempts = kMaxAttempts;
  std::u32string alphabet = U"abcdefghijklmnopqrstuvwxyz";
};

struct TextCorruption {
  std::optional<std::string> text;  // nullopt when excluded
  int attempts = 0;

  bool excluded() const { return !text.has_value(); }
};

// Number of code points touched at a given length and rate: ceil(rate * len).
std::size_t affected_positions(double rate, std::size_t length);

// One corruption draw without the fidelity check.
std::string corrupt_once(std::string_view text, TextOp op, std::size_t count,
                         std::uint64_t seed, const std::u32string& alphabet);

TextCorruption corrupt_text(std::string_view text, TextOp op, int level, std::uint64_t seed,
                            const SimilarityOracle& oracle,
                            const TextCorruptionConfig& cfg = {});

// Levenshtein distance over code points.
std::size_t edit_distance(std::string_view a, std::string_view b);

// UTF-8 to code points. Invalid bytes map to U+DC80..U+DCFF and survive the
// round trip through encode_utf8 unchanged.
std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view text);

}  // namespace migate::corruption
