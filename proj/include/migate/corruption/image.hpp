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

namespace migate::corruption {

struct ImageBuffer {
  int height = 0;
  int width = 0;
  int channels = 1;  // 1 (gray) or 3 (RGB)
  std::vector<std::uint8_t> pixels;  // row-major, interleaved channels

  ImageBuffer() = default;
  ImageBuffer(int h, int w, int c, std::uint8_t fill = 0);

  std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }
  // Throws DimensionError when the byte count disagrees with H*W*C.
  void validate() const;

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;
};

enum class NoiseKind { kGaussian, kShot, kImpulse };

std::string_view to_string(NoiseKind kind);
std::optional<NoiseKind> parse_noise_kind(std::string_view name);

inline constexpr int kMaxLevel = 10;

// Level parameters indexed by level - 1. Gaussian sigma and impulse
// probability grow with level; the shot-noise photon count lambda shrinks.
struct SeverityTable {
  std::vector<double> gaussian_sigma;
  std::vector<double> shot_lambda;
  std::vector<double> impulse_probability;

  static const SeverityTable& standard();

  int levels(NoiseKind kind) const;
  double parameter(NoiseKind kind, int level) const;  // DomainError outside 1..levels
  void validate() const;
};

// Gaussian, shot and impulse tables for levels 1-10.
SeverityTable make_standard_table();

ImageBuffer gaussian_noise(const ImageBuffer& img, int level, std::uint64_t seed,
                           const SeverityTable& table = SeverityTable::standard());
ImageBuffer shot_noise(const ImageBuffer& img, int level, std::uint64_t seed,
                       const SeverityTable& table = SeverityTable::standard());
ImageBuffer impulse_noise(const ImageBuffer& img, int level, std::uint64_t seed,
                          const SeverityTable& table = SeverityTable::standard());
ImageBuffer apply_noise(const ImageBuffer& img, NoiseKind kind, int level, std::uint64_t seed,
                        const SeverityTable& table = SeverityTable::standard());

// hash_unit(sample_id || kind || level, salt) scaled to the u64 range.
std::uint64_t sample_seed(std::string_view sample_id, std::string_view kind, int level,
                          std::string_view salt = {});

// Mean absolute byte difference; images must share a shape.
double mean_absolute_delta(const ImageBuffer& a, const ImageBuffer& b);
// Fraction of pixels with at least one differing channel.
double changed_pixel_fraction(const ImageBuffer& a, const ImageBuffer& b);

// 8-bit PNG. Any readable PNG is converted to 8-bit gray or RGB with alpha
// composited away. Read failures raise AssetError.
ImageBuffer read_png(const std::filesystem::path& path);
void write_png(const ImageBuffer& img, const std::filesystem::path& path);

}  // namespace migate::corruption
