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

#include "migate/corruption/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "migate/error.hpp"

namespace migate::corruption {

std::string_view to_string(TextOp op) {
  switch (op) {
    case TextOp::kInsert: return "insert";
    case TextOp::kDrop: return "drop";
    case TextOp::kReplace: return "replace";
  }
  return "?";
}

std::optional<TextOp> parse_text_op(std::string_view name) {
  if (name == "insert") return TextOp::kInsert;
  if (name == "drop") return TextOp::kDrop;
  if (name == "replace") return TextOp::kReplace;
  return std::nullopt;
}

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char lead = byte(i);
    int extra = -1;
    char32_t cp = 0;
    if (lead < 0x80) {
      extra = 0;
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0 && lead >= 0xC2) {
      extra = 1;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      extra = 2;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0 && lead <= 0xF4) {
      extra = 3;
      cp = lead & 0x07;
    }
    bool ok = extra >= 0;
    for (int k = 1; ok && k <= extra; ++k) {
      if (i + k >= text.size() || (byte(i + k) & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (byte(i + k) & 0x3F);
      }
    }
    if (ok) {
      static constexpr char32_t kMin[] = {0, 0x80, 0x800, 0x10000};
      ok = cp >= kMin[extra] && cp <= 0x10FFFF && (cp < 0xD800 || cp > 0xDFFF);
    }
    if (ok) {
      out.push_back(cp);
      i += static_cast<std::size_t>(extra) + 1;
    } else {
      out.push_back(0xDC00 + lead);
      ++i;
    }
  }
  return out;
}

std::string encode_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) {
    if (cp >= 0xDC80 && cp <= 0xDCFF) {
      out.push_back(static_cast<char>(cp - 0xDC00));
    } else if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

namespace {

// Sentinels sit in the noncharacter range so they never collide with text.
constexpr char32_t kBegin = 0xFDD0;
constexpr char32_t kEnd = 0xFDD1;

std::map<std::u32string, double> trigrams(std::string_view text) {
  std::u32string padded;
  padded.push_back(kBegin);
  padded += decode_utf8(text);
  padded.push_back(kEnd);
  std::map<std::u32string, double> counts;
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) counts[padded.substr(i, 3)] += 1.0;
  return counts;
}

}  // namespace

double ngram_cosine(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const auto ca = trigrams(a);
  const auto cb = trigrams(b);
  double dot = 0, na = 0, nb = 0;
  for (const auto& [gram, count] : ca) {
    na += count * count;
    if (auto it = cb.find(gram); it != cb.end()) dot += count * it->second;
  }
  for (const auto& [gram, count] : cb) nb += count * count;
  return dot / std::sqrt(na * nb);
}

std::size_t affected_positions(double rate, std::size_t length) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw DomainError("corruption rate must lie in [0, 1]");
  const double scaled = rate * static_cast<double>(length);
  const auto count = static_cast<std::size_t>(std::ceil(scaled - 1e-9 * std::max(1.0, scaled)));
  return std::min(count, length);
}

std::string corrupt_once(std::string_view text, TextOp op, std::size_t count,
                         std::uint64_t seed, const std::u32string& alphabet) {
  if (alphabet.empty()) throw ConfigError("corruption alphabet is empty");
  std::mt19937_64 rng(seed);
  std::u32string chars = decode_utf8(text);
  const std::size_t n = chars.size();
  std::uniform_int_distribution<std::size_t> pick_letter(0, alphabet.size() - 1);

  if (op == TextOp::kInsert) {
    // Insertion slots 0..n refer to gaps of the original string.
    std::uniform_int_distribution<std::size_t> pick_gap(0, n);
    std::vector<std::size_t> gaps(count);
    for (auto& g : gaps) g = pick_gap(rng);
    std::sort(gaps.begin(), gaps.end());
    std::u32string out;
    out.reserve(n + count);
    std::size_t next = 0;
    for (std::size_t i = 0; i <= n; ++i) {
      while (next < gaps.size() && gaps[next] == i) {
        out.push_back(alphabet[pick_letter(rng)]);
        ++next;
      }
      if (i < n) out.push_back(chars[i]);
    }
    return encode_utf8(out);
  }

  count = std::min(count, n);
  std::vector<std::size_t> positions(n);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  std::vector<std::size_t> chosen;
  std::sample(positions.begin(), positions.end(), std::back_inserter(chosen), count, rng);

  if (op == TextOp::kDrop) {
    std::vector<bool> dropped(n, false);
    for (auto p : chosen) dropped[p] = true;
    std::u32string out;
    for (std::size_t i = 0; i < n; ++i) {
      if (!dropped[i]) out.push_back(chars[i]);
    }
    return encode_utf8(out);
  }

  for (auto p : chosen) {
    if (alphabet.size() == 1 && alphabet[0] == chars[p]) {
      throw ConfigError("replacement alphabet cannot change this character");
    }
    char32_t letter;
    do {
      letter = alphabet[pick_letter(rng)];
    } while (letter == chars[p]);
    chars[p] = letter;
  }
  return encode_utf8(chars);
}

TextCorruption corrupt_text(std::string_view text, TextOp op, int level, std::uint64_t seed,
                            const SimilarityOracle& oracle, const TextCorruptionConfig& cfg) {
  if (text.empty()) throw DomainError("cannot corrupt empty text");
  if (level < 1 || level > static_cast<int>(cfg.rates.size())) {
    throw DomainError("text level " + std::to_string(level) + " outside 1.." +
                      std::to_string(cfg.rates.size()));
  }
  if (cfg.max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
  const double rate = cfg.rates[static_cast<std::size_t>(level - 1)];
  const std::size_t count = affected_positions(rate, decode_utf8(text).size());

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(op), static_cast<std::uint32_t>(level)};
  std::mt19937_64 attempt_seeds(seq);
  TextCorruption result;
  while (result.attempts < cfg.max_attempts) {
    ++result.attempts;
    std::string candidate = corrupt_once(text, op, count, attempt_seeds(), cfg.alphabet);
    if (oracle.similarity(text, candidate) >= cfg.threshold) {
      result.text = std::move(candidate);
      return result;
    }
  }
  return result;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  const auto x = decode_utf8(a);
  const auto y = decode_utf8(b);
  std::vector<std::size_t> row(y.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= x.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= y.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (x[i - 1] != y[j - 1])});
      diag = up;
    }
  }
  return row[y.size()];
}

}  // namespace migate::corruption
