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

#include "migate/corruption/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "migate/error.hpp"
#include "migate/gate/hash.hpp"

namespace migate::corruption {

ImageBuffer::ImageBuffer(int h, int w, int c, std::uint8_t fill)
    : height(h), width(w), channels(c),
      pixels(static_cast<std::size_t>(h) * w * c, fill) {
  validate();
}

void ImageBuffer::validate() const {
  if (height < 0 || width < 0 || (channels != 1 && channels != 3)) {
    throw DimensionError("image must have non-negative size and 1 or 3 channels");
  }
  if (pixels.size() != pixel_count() * static_cast<std::size_t>(channels)) {
    throw DimensionError("image byte count does not match height*width*channels");
  }
}

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kGaussian: return "gaussian";
    case NoiseKind::kShot: return "shot";
    case NoiseKind::kImpulse: return "impulse";
  }
  return "?";
}

std::optional<NoiseKind> parse_noise_kind(std::string_view name) {
  if (name == "gaussian") return NoiseKind::kGaussian;
  if (name == "shot") return NoiseKind::kShot;
  if (name == "impulse") return NoiseKind::kImpulse;
  return std::nullopt;
}

namespace {

std::vector<double> extend_linear(std::vector<double> values, int levels) {
  const double step = values.back() - values[values.size() - 2];
  while (static_cast<int>(values.size()) < levels) values.push_back(values.back() + step);
  return values;
}

const std::vector<double>& column(const SeverityTable& t, NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kGaussian: return t.gaussian_sigma;
    case NoiseKind::kShot: return t.shot_lambda;
    case NoiseKind::kImpulse: return t.impulse_probability;
  }
  return t.gaussian_sigma;
}

std::uint8_t quantize(double unit) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(unit, 0.0, 1.0) * 255.0));
}

std::mt19937_64 level_rng(std::uint64_t seed, NoiseKind kind, int level) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(level)};
  return std::mt19937_64(seq);
}

}  // namespace

SeverityTable make_standard_table() {
  SeverityTable t;
  t.gaussian_sigma = extend_linear({0.08, 0.12, 0.18, 0.26, 0.38}, kMaxLevel);
  t.impulse_probability = extend_linear({0.03, 0.06, 0.09, 0.17, 0.27}, kMaxLevel);
  // Shot noise extends in 1/lambda; a linear step in lambda would turn
  // negative at level 7.
  std::vector<double> inverse{1 / 60.0, 1 / 25.0, 1 / 12.0, 1 / 5.0, 1 / 3.0};
  inverse = extend_linear(std::move(inverse), kMaxLevel);
  t.shot_lambda = {60, 25, 12, 5, 3};
  for (std::size_t i = 5; i < inverse.size(); ++i) t.shot_lambda.push_back(1.0 / inverse[i]);
  t.validate();
  return t;
}

const SeverityTable& SeverityTable::standard() {
  static const SeverityTable table = make_standard_table();
  return table;
}

int SeverityTable::levels(NoiseKind kind) const {
  return static_cast<int>(column(*this, kind).size());
}

double SeverityTable::parameter(NoiseKind kind, int level) const {
  const auto& values = column(*this, kind);
  if (level < 1 || level > static_cast<int>(values.size())) {
    throw DomainError(std::string(to_string(kind)) + " level " + std::to_string(level) +
                      " outside 1.." + std::to_string(values.size()));
  }
  return values[static_cast<std::size_t>(level - 1)];
}

void SeverityTable::validate() const {
  auto check = [](const std::vector<double>& v, const char* name, bool increasing) {
    if (v.empty()) throw ConfigError(std::string(name) + " table is empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v[i]) || v[i] < 0) {
        throw ConfigError(std::string(name) + " table has a negative or non-finite entry");
      }
      if (i > 0 && (increasing ? v[i] <= v[i - 1] : v[i] >= v[i - 1])) {
        throw ConfigError(std::string(name) + " table is not strictly monotone");
      }
    }
  };
  check(gaussian_sigma, "gaussian", true);
  check(shot_lambda, "shot", false);
  check(impulse_probability, "impulse", true);
  if (shot_lambda.back() <= 0) throw ConfigError("shot lambda must be positive");
  if (impulse_probability.back() > 1) throw ConfigError("impulse probability exceeds 1");
}

ImageBuffer gaussian_noise(const ImageBuffer& img, int level, std::uint64_t seed,
                           const SeverityTable& table) {
  img.validate();
  const double sigma = table.parameter(NoiseKind::kGaussian, level);
  auto rng = level_rng(seed, NoiseKind::kGaussian, level);
  std::normal_distribution<double> noise(0.0, 1.0);
  ImageBuffer out = img;
  for (auto& p : out.pixels) p = quantize(p / 255.0 + sigma * noise(rng));
  return out;
}

ImageBuffer shot_noise(const ImageBuffer& img, int level, std::uint64_t seed,
                       const SeverityTable& table) {
  img.validate();
  const double lambda = table.parameter(NoiseKind::kShot, level);
  auto rng = level_rng(seed, NoiseKind::kShot, level);
  ImageBuffer out = img;
  for (auto& p : out.pixels) {
    const double mean = p / 255.0 * lambda;
    if (mean <= 0) {
      p = 0;
      continue;
    }
    std::poisson_distribution<std::int64_t> photons(mean);
    p = quantize(static_cast<double>(photons(rng)) / lambda);
  }
  return out;
}

ImageBuffer impulse_noise(const ImageBuffer& img, int level, std::uint64_t seed,
                          const SeverityTable& table) {
  img.validate();
  const double prob = table.parameter(NoiseKind::kImpulse, level);
  auto rng = level_rng(seed, NoiseKind::kImpulse, level);
  std::bernoulli_distribution hit(prob);
  std::bernoulli_distribution salt(0.5);
  ImageBuffer out = img;
  const auto c = static_cast<std::size_t>(img.channels);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    if (!hit(rng)) continue;
    const std::uint8_t value = salt(rng) ? 255 : 0;
    std::fill_n(out.pixels.begin() + static_cast<std::ptrdiff_t>(i * c), c, value);
  }
  return out;
}

ImageBuffer apply_noise(const ImageBuffer& img, NoiseKind kind, int level, std::uint64_t seed,
                        const SeverityTable& table) {
  switch (kind) {
    case NoiseKind::kGaussian: return gaussian_noise(img, level, seed, table);
    case NoiseKind::kShot: return shot_noise(img, level, seed, table);
    case NoiseKind::kImpulse: return impulse_noise(img, level, seed, table);
  }
  throw DomainError("unknown noise kind");
}

std::uint64_t sample_seed(std::string_view sample_id, std::string_view kind, int level,
                          std::string_view salt) {
  std::string key(sample_id);
  key += '\x1f';
  key += kind;
  key += '\x1f';
  key += std::to_string(level);
  return static_cast<std::uint64_t>(std::ldexp(gate::hash_unit(key, salt), 64));
}

namespace {

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b) {
  a.validate();
  b.validate();
  if (a.height != b.height || a.width != b.width || a.channels != b.channels) {
    throw DimensionError("images differ in shape");
  }
}

}  // namespace

double mean_absolute_delta(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b);
  if (a.pixels.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    total += std::abs(static_cast<int>(a.pixels[i]) - static_cast<int>(b.pixels[i]));
  }
  return total / static_cast<double>(a.pixels.size());
}

double changed_pixel_fraction(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b);
  if (a.pixel_count() == 0) return 0.0;
  const auto c = static_cast<std::size_t>(a.channels);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < a.pixel_count(); ++i) {
    changed += !std::equal(a.pixels.begin() + i * c, a.pixels.begin() + (i + 1) * c,
                           b.pixels.begin() + i * c);
  }
  return static_cast<double>(changed) / static_cast<double>(a.pixel_count());
}

ImageBuffer read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw AssetError(path.string() + ": " + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  ImageBuffer img(static_cast<int>(image.height), static_cast<int>(image.width), color ? 3 : 1);
  if (!png_image_finish_read(&image, nullptr, img.pixels.data(), 0, nullptr)) {
    png_image_free(&image);
    throw AssetError(path.string() + ": " + image.message);
  }
  return img;
}

void write_png(const ImageBuffer& img, const std::filesystem::path& path) {
  img.validate();
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.pixels.data(), 0, nullptr)) {
    throw IoError(path.string() + ": " + image.message);
  }
}

}  // namespace migate::corruption
