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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <fstream>
#include <sstream>

#include "migate/corruption/batch.hpp"
#include "migate/corruption/image.hpp"
#include "migate/corruption/text.hpp"
#include "migate/error.hpp"
#include "test_util.hpp"

namespace migate::corruption {
namespace {

ImageBuffer gradient_photo(int h, int w) {
  ImageBuffer img(h, w, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        img.pixels[static_cast<std::size_t>((y * w + x) * 3 + c)] =
            static_cast<std::uint8_t>((x * 255 / std::max(w - 1, 1) + y * 7 + c * 40) % 256);
      }
    }
  }
  return img;
}

double byte_variance(const ImageBuffer& img) {
  double mean = 0.0, sq = 0.0;
  for (auto p : img.pixels) {
    mean += p;
    sq += static_cast<double>(p) * p;
  }
  const auto n = static_cast<double>(img.pixels.size());
  mean /= n;
  return sq / n - mean * mean;
}

double quantize_unit(double u) { return static_cast<double>(std::lround(std::clamp(u, 0.0, 1.0) * 255.0)); }

// Std of the output bytes for a constant input under clipped, quantised
// Gaussian noise, by quadrature over the standard normal.
double censored_gaussian_std(std::uint8_t value, double sigma) {
  double m1 = 0.0, m2 = 0.0;
  const double dz = 1e-4;
  for (double z = -9.0; z <= 9.0; z += dz) {
    const double w = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi) * dz;
    const double q = quantize_unit(value / 255.0 + sigma * z);
    m1 += w * q;
    m2 += w * q * q;
  }
  return std::sqrt(m2 - m1 * m1);
}

// Variance of the output bytes for a constant input under clipped,
// quantised Poisson resampling, summed over the Poisson pmf.
double clipped_poisson_variance(std::uint8_t value, double lambda) {
  const double mean = value / 255.0 * lambda;
  double m1 = 0.0, m2 = 0.0;
  double pmf = std::exp(-mean);
  for (int k = 0; k < 2000; ++k) {
    if (k > 0) pmf *= mean / k;
    const double q = quantize_unit(k / lambda);
    m1 += pmf * q;
    m2 += pmf * q * q;
  }
  return m2 - m1 * m1;
}

TEST(SeverityTableTest, StandardValues) {
  const auto& t = SeverityTable::standard();
  EXPECT_DOUBLE_EQ(t.parameter(NoiseKind::kGaussian, 1), 0.08);
  EXPECT_DOUBLE_EQ(t.parameter(NoiseKind::kGaussian, 5), 0.38);
  EXPECT_DOUBLE_EQ(t.parameter(NoiseKind::kShot, 1), 60.0);
  EXPECT_DOUBLE_EQ(t.parameter(NoiseKind::kShot, 5), 3.0);
  EXPECT_DOUBLE_EQ(t.parameter(NoiseKind::kImpulse, 4), 0.17);
  EXPECT_NEAR(t.parameter(NoiseKind::kGaussian, 6), 0.50, 1e-12);
  EXPECT_NEAR(t.parameter(NoiseKind::kImpulse, 10), 0.77, 1e-12);
  EXPECT_THROW(t.parameter(NoiseKind::kShot, 0), DomainError);
  EXPECT_THROW(t.parameter(NoiseKind::kShot, 11), DomainError);
}

TEST(SeverityTableTest, MonotoneThroughLevelTen) {
  const auto& t = SeverityTable::standard();
  for (auto kind : {NoiseKind::kGaussian, NoiseKind::kShot, NoiseKind::kImpulse}) {
    ASSERT_EQ(t.levels(kind), kMaxLevel);
    for (int l = 2; l <= kMaxLevel; ++l) {
      if (kind == NoiseKind::kShot) {
        EXPECT_LT(t.parameter(kind, l), t.parameter(kind, l - 1));
        EXPECT_GT(t.parameter(kind, l), 0.0);
      } else {
        EXPECT_GT(t.parameter(kind, l), t.parameter(kind, l - 1));
      }
    }
  }
  EXPECT_LE(t.parameter(NoiseKind::kImpulse, kMaxLevel), 1.0);
  SeverityTable bad = t;
  bad.gaussian_sigma[3] = bad.gaussian_sigma[2];
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(ImageNoiseTest, ZeroStrengthIsIdentity) {
  const auto img = gradient_photo(16, 16);
  SeverityTable zero;
  zero.gaussian_sigma = {0.0};
  zero.shot_lambda = {1e12};
  zero.impulse_probability = {0.0};
  EXPECT_EQ(gaussian_noise(img, 1, 9, zero), img);
  EXPECT_EQ(impulse_noise(img, 1, 9, zero), img);
}

TEST(ImageNoiseTest, GaussianSpreadMatchesClippedOracle) {
  const ImageBuffer gray(200, 200, 1, 128);
  for (int level : {1, 5}) {
    const double sigma = SeverityTable::standard().parameter(NoiseKind::kGaussian, level);
    const auto out = gaussian_noise(gray, level, 1234);
    const double measured = std::sqrt(byte_variance(out));
    EXPECT_NEAR(measured, censored_gaussian_std(128, sigma), 0.05 * measured);
    if (level == 1) EXPECT_NEAR(measured, 255.0 * sigma, 0.05 * 255.0 * sigma);
  }
}

TEST(ImageNoiseTest, ShotNoiseKeepsBlackBlack) {
  const ImageBuffer black(32, 32, 3, 0);
  for (int level = 1; level <= kMaxLevel; ++level) EXPECT_EQ(shot_noise(black, level, 5), black);
}

TEST(ImageNoiseTest, ShotVarianceMatchesPoissonOracle) {
  for (std::uint8_t value : {std::uint8_t{64}, std::uint8_t{255}}) {
    const ImageBuffer img(200, 200, 1, value);
    for (int level = 1; level <= 5; ++level) {
      const double lambda = SeverityTable::standard().parameter(NoiseKind::kShot, level);
      const double oracle = clipped_poisson_variance(value, lambda);
      EXPECT_NEAR(byte_variance(shot_noise(img, level, 77)), oracle, 0.10 * oracle)
          << "value " << int(value) << " level " << level;
    }
  }
  // Away from the clip the spread follows the Poisson law directly.
  const ImageBuffer mid(200, 200, 1, 64);
  const double expected = 255.0 * 255.0 * (64.0 / 255.0) / 60.0;
  EXPECT_NEAR(byte_variance(shot_noise(mid, 1, 3)), expected, 0.10 * expected);
}

TEST(ImageNoiseTest, ImpulseFractionWithinBinomialBounds) {
  const ImageBuffer gray(100, 100, 3, 128);
  const double n = 100.0 * 100.0;
  for (int level = 1; level <= kMaxLevel; ++level) {
    const double p = SeverityTable::standard().parameter(NoiseKind::kImpulse, level);
    const auto out = impulse_noise(gray, level, 99);
    EXPECT_NEAR(changed_pixel_fraction(gray, out), p, 3.0 * std::sqrt(p * (1 - p) / n));
    for (std::size_t i = 0; i < out.pixel_count(); ++i) {
      const auto v = out.pixels[i * 3];
      EXPECT_TRUE(v == 128 || ((v == 0 || v == 255) && out.pixels[i * 3 + 1] == v &&
                               out.pixels[i * 3 + 2] == v));
    }
  }
}

TEST(ImageNoiseTest, DistortionNonDecreasingInLevel) {
  const auto photo = gradient_photo(64, 64);
  for (auto kind : {NoiseKind::kGaussian, NoiseKind::kShot, NoiseKind::kImpulse}) {
    double last = 0.0;
    for (int level = 1; level <= kMaxLevel; ++level) {
      const double d = mean_absolute_delta(photo, apply_noise(photo, kind, level, 11));
      EXPECT_GE(d, last) << to_string(kind) << " level " << level;
      last = d;
    }
  }
}

TEST(ImageNoiseTest, DeterministicPerSeed) {
  const auto photo = gradient_photo(20, 30);
  for (auto kind : {NoiseKind::kGaussian, NoiseKind::kShot, NoiseKind::kImpulse}) {
    EXPECT_EQ(apply_noise(photo, kind, 3, 42), apply_noise(photo, kind, 3, 42));
    EXPECT_NE(apply_noise(photo, kind, 3, 42), apply_noise(photo, kind, 3, 43));
  }
}

TEST(ImageNoiseTest, ShapeChecks) {
  ImageBuffer broken(2, 2, 3);
  broken.pixels.pop_back();
  EXPECT_THROW(broken.validate(), DimensionError);
  EXPECT_THROW(gaussian_noise(broken, 1, 0), DimensionError);
  EXPECT_THROW(mean_absolute_delta(ImageBuffer(2, 2, 1), ImageBuffer(2, 3, 1)), DimensionError);
  EXPECT_THROW(gaussian_noise(ImageBuffer(2, 2, 1), 11, 0), DomainError);
}

TEST(SampleSeedTest, DependsOnEveryField) {
  const auto base = sample_seed("img1", "gaussian", 3, "s");
  EXPECT_EQ(base, sample_seed("img1", "gaussian", 3, "s"));
  EXPECT_NE(base, sample_seed("img2", "gaussian", 3, "s"));
  EXPECT_NE(base, sample_seed("img1", "shot", 3, "s"));
  EXPECT_NE(base, sample_seed("img1", "gaussian", 4, "s"));
  EXPECT_NE(base, sample_seed("img1", "gaussian", 3, "t"));
  EXPECT_NE(sample_seed("a", "b1", 2), sample_seed("a", "b", 12));
}

TEST(PngTest, RoundTripGrayAndRgb) {
  testing::TempDir dir("png");
  const auto rgb = gradient_photo(13, 17);
  write_png(rgb, dir / "rgb.png");
  EXPECT_EQ(read_png(dir / "rgb.png"), rgb);
  ImageBuffer gray(5, 3, 1);
  for (std::size_t i = 0; i < gray.pixels.size(); ++i) gray.pixels[i] = static_cast<std::uint8_t>(i * 17);
  write_png(gray, dir / "gray.png");
  EXPECT_EQ(read_png(dir / "gray.png"), gray);
}

TEST(PngTest, BadInputsRaiseAssetError) {
  testing::TempDir dir("png_bad");
  EXPECT_THROW(read_png(dir / "missing.png"), AssetError);
  {
    std::ofstream f(dir / "junk.png", std::ios::binary);
    f << "not a png at all";
  }
  EXPECT_THROW(read_png(dir / "junk.png"), AssetError);
  EXPECT_THROW(write_png(ImageBuffer(2, 2, 1), dir / "no" / "dir.png"), IoError);
}

TEST(NgramCosineTest, ReferenceValues) {
  EXPECT_NEAR(ngram_cosine("the quick fox", "the quick fox"), 1.0, 1e-12);
  EXPECT_NEAR(ngram_cosine("aaaa", "bbbb"), 0.0, 1e-12);
  EXPECT_NEAR(ngram_cosine("", ""), 1.0, 1e-12);
  EXPECT_NEAR(ngram_cosine("", "x"), 0.0, 1e-12);
  // Padded trigrams share 5 of 8 and 7: 5 / sqrt(56).
  const double e = ngram_cosine("elephant", "elephnt");
  EXPECT_GT(e, 0.3);
  EXPECT_LT(e, 1.0);
  EXPECT_NEAR(e, 5.0 / std::sqrt(56.0), 1e-12);
  EXPECT_NEAR(ngram_cosine("a", "a"), 1.0, 1e-12);
}

TEST(Utf8Test, RoundTripIncludingInvalidBytes) {
  for (std::string s : {std::string("plain"), std::string("caf\xc3\xa9 \xf0\x9f\x98\x80"),
                        std::string("bad \xff\xfe end"), std::string("\xc3")}) {
    EXPECT_EQ(encode_utf8(decode_utf8(s)), s);
  }
  EXPECT_EQ(decode_utf8("\xc3\xa9").size(), 1u);
}

TEST(TextCorruptionTest, AffectedPositions) {
  EXPECT_EQ(affected_positions(0.1, 100), 10u);
  EXPECT_EQ(affected_positions(0.025, 10), 1u);
  EXPECT_EQ(affected_positions(0.15, 20), 3u);
  EXPECT_EQ(affected_positions(0.25, 1), 1u);
}

TEST(TextCorruptionTest, ConstantOracleOneAcceptsFirstAttempt) {
  const auto r = corrupt_text("hello world", TextOp::kReplace, 3, 1, ConstantOracle(1.0));
  EXPECT_EQ(r.attempts, 1);
  ASSERT_FALSE(r.excluded());
}

TEST(TextCorruptionTest, ConstantOracleZeroExcludesAfterExactlyOneHundred) {
  const auto r = corrupt_text("hello world", TextOp::kDrop, 5, 1, ConstantOracle(0.0));
  EXPECT_TRUE(r.excluded());
  EXPECT_EQ(r.attempts, 100);
}

TEST(TextCorruptionTest, ThresholdIsInclusive) {
  const auto r = corrupt_text("hello world", TextOp::kDrop, 5, 1, ConstantOracle(0.2));
  EXPECT_EQ(r.attempts, 1);
  EXPECT_TRUE(corrupt_text("hello", TextOp::kDrop, 1, 1, ConstantOracle(0.1999)).excluded());
}

TEST(TextCorruptionTest, DropInsertReplaceLengths) {
  const std::string text(100, 'x');
  const ConstantOracle yes(1.0);
  const auto dropped = corrupt_text(text, TextOp::kDrop, 3, 4, yes);
  EXPECT_EQ(dropped.text->size(), 90u);
  const auto inserted = corrupt_text(text, TextOp::kInsert, 3, 4, yes);
  EXPECT_EQ(inserted.text->size(), 110u);
  const auto replaced = corrupt_text(text, TextOp::kReplace, 3, 4, yes);
  ASSERT_EQ(replaced.text->size(), 100u);
  EXPECT_EQ(edit_distance(text, *replaced.text), 10u);
}

TEST(TextCorruptionTest, OperatesOnCodePoints) {
  const std::string text = "\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9";
  const auto r = corrupt_text(text, TextOp::kDrop, 3, 2, ConstantOracle(1.0));
  EXPECT_EQ(decode_utf8(*r.text).size(), 9u);
  EXPECT_EQ(*r.text, std::string(text.begin(), text.end() - 2));
}

TEST(TextCorruptionTest, EditDistanceGrowsWithLevel) {
  const ConstantOracle yes(1.0);
  const std::string text = "a moderately long sentence used to check severity growth across levels";
  for (auto op : {TextOp::kInsert, TextOp::kDrop, TextOp::kReplace}) {
    double last = 0.0;
    for (int level = 1; level <= 5; ++level) {
      double total = 0.0;
      for (std::uint64_t s = 0; s < 20; ++s) {
        total += static_cast<double>(edit_distance(text, *corrupt_text(text, op, level, s, yes).text));
      }
      EXPECT_GE(total, last) << to_string(op) << " level " << level;
      last = total;
    }
  }
}

TEST(TextCorruptionTest, AcceptedOutputsMeetFidelity) {
  const TrigramOracle oracle;
  const std::vector<std::string> texts{"is this a cat or a dog", "two men shaking hands in a field",
                                       "ok", "what color is the bus"};
  int excluded = 0;
  for (const auto& t : texts) {
    for (auto op : {TextOp::kInsert, TextOp::kDrop, TextOp::kReplace}) {
      for (int level = 1; level <= 5; ++level) {
        for (std::uint64_t s = 0; s < 10; ++s) {
          const auto r = corrupt_text(t, op, level, s, oracle);
          EXPECT_GE(r.attempts, 1);
          EXPECT_LE(r.attempts, kMaxAttempts);
          if (r.excluded()) {
            EXPECT_EQ(r.attempts, kMaxAttempts);
            ++excluded;
          } else {
            EXPECT_GE(oracle.similarity(t, *r.text), kFidelityThreshold);
          }
        }
      }
    }
  }
  EXPECT_GT(excluded, 0);
}

TEST(TextCorruptionTest, ReplaceAlwaysChangesCharacter) {
  const std::string text(50, 'a');
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto out = corrupt_once(text, TextOp::kReplace, 50, s, U"ab");
    EXPECT_EQ(out, std::string(50, 'b'));
  }
}

TEST(TextCorruptionTest, DeterministicAndRejectsBadInput) {
  const TrigramOracle oracle;
  const auto a = corrupt_text("some text here", TextOp::kInsert, 4, 9, oracle);
  const auto b = corrupt_text("some text here", TextOp::kInsert, 4, 9, oracle);
  EXPECT_EQ(a.text, b.text);
  EXPECT_EQ(a.attempts, b.attempts);
  EXPECT_THROW(corrupt_text("", TextOp::kDrop, 1, 0, oracle), DomainError);
  EXPECT_THROW(corrupt_text("x", TextOp::kDrop, 6, 0, oracle), DomainError);
  EXPECT_THROW(corrupt_text("x", TextOp::kDrop, 0, 0, oracle), DomainError);
}

TEST(BatchTest, TextResultsIndependentOfJobs) {
  std::vector<TextSample> samples;
  for (int i = 0; i < 200; ++i) samples.push_back({"q" + std::to_string(i), "question number " + std::to_string(i * 7919)});
  const TrigramOracle oracle;
  const auto one = corrupt_texts(samples, TextOp::kReplace, 5, "salt", oracle, {}, 1);
  const auto many = corrupt_texts(samples, TextOp::kReplace, 5, "salt", oracle, {}, 8);
  ASSERT_EQ(one.outputs.size(), 200u);
  for (std::size_t i = 0; i < 200; ++i) {
    EXPECT_EQ(one.outputs[i].text, many.outputs[i].text);
    EXPECT_EQ(one.outputs[i].attempts, many.outputs[i].attempts);
  }
  EXPECT_EQ(one.ledger, many.ledger);
  EXPECT_EQ(one.ledger[3].sample_id, "q3");
  EXPECT_EQ(one.ledger[3].kind, "replace");
  const auto seed = sample_seed("q3", "replace", 5, "salt");
  EXPECT_EQ(one.outputs[3].text, corrupt_text(samples[3].text, TextOp::kReplace, 5, seed, oracle).text);
}

TEST(BatchTest, ImagesIndependentOfJobs) {
  std::vector<ImageSample> samples;
  for (int i = 0; i < 24; ++i) samples.push_back({"img" + std::to_string(i), gradient_photo(8 + i, 9)});
  for (auto kind : {NoiseKind::kGaussian, NoiseKind::kShot, NoiseKind::kImpulse}) {
    const auto a = corrupt_images(samples, kind, 4, "s", SeverityTable::standard(), 1);
    const auto b = corrupt_images(samples, kind, 4, "s", SeverityTable::standard(), 6);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a[5], apply_noise(samples[5].image, kind, 4,
                                sample_seed("img5", to_string(kind), 4, "s")));
  }
}

TEST(BatchTest, ParallelForRethrows) {
  EXPECT_THROW(parallel_for(100, 4,
                            [](std::size_t i) {
                              if (i == 37) throw DomainError("boom");
                            }),
               DomainError);
  std::vector<int> hits(1000, 0);
  parallel_for(1000, 7, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(LedgerTest, JsonlRoundTrip) {
  const std::vector<LedgerEntry> entries{{"a", "drop", 2, 1, false}, {"b", "insert", 5, 100, true}};
  std::stringstream io;
  write_ledger(entries, io);
  EXPECT_EQ(io.str().substr(0, io.str().find('\n')),
            R"({"sample_id":"a","kind":"drop","level":2,"attempts":1,"excluded":false})");
  EXPECT_EQ(read_ledger(io), entries);
}

}  // namespace
}  // namespace migate::corruption
