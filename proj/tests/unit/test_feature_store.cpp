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

#include <algorithm>
#include <bit>
#include <cstring>
#include <limits>
#include <sstream>

#include "migate/error.hpp"
#include "migate/feature_store.hpp"
#include "test_util.hpp"

namespace migate {
namespace {

std::string serialize(const FeatureTable& t) {
  std::ostringstream out;
  write_table(t, out);
  return out.str();
}

FeatureTable parse(const std::string& bytes) {
  std::istringstream in(bytes);
  return read_table(in);
}

TEST(FeatureStoreTest, EmptyTableIsHeaderOnly) {
  FeatureTable t{4, 4, 2, {}};
  std::ostringstream out;
  EXPECT_EQ(write_table(t, out), kTableHeaderBytes);
  EXPECT_EQ(out.str().size(), 26u);
  EXPECT_EQ(out.str().substr(0, 4), "MIFS");
  EXPECT_EQ(parse(out.str()), t);
}

TEST(FeatureStoreTest, HeaderFieldsAreLittleEndian) {
  auto t = testing::random_table(3, 5, 7, 4, 1);
  const auto bytes = serialize(t);
  auto u16 = [&](std::size_t at) {
    return static_cast<unsigned>(static_cast<unsigned char>(bytes[at])) |
           static_cast<unsigned>(static_cast<unsigned char>(bytes[at + 1])) << 8;
  };
  EXPECT_EQ(u16(4), kTableVersion);
  EXPECT_EQ(static_cast<unsigned char>(bytes[6]), 3);  // N, low byte first
  for (int i = 7; i < 14; ++i) EXPECT_EQ(bytes[static_cast<std::size_t>(i)], 0);
  EXPECT_EQ(static_cast<unsigned char>(bytes[14]), 5);
  EXPECT_EQ(static_cast<unsigned char>(bytes[18]), 7);
  EXPECT_EQ(static_cast<unsigned char>(bytes[22]), 4);
}

TEST(FeatureStoreTest, OneRecordCarriesFiveFloats) {
  FeatureTable t{2, 3, 2, {}};
  t.records.push_back({"ab", Split::kVal, {1.0f, 2.0f}, {3.0f, 4.0f, 5.0f}, 1});
  const auto bytes = serialize(t);
  // id_len + id + split + 5 floats + label
  EXPECT_EQ(bytes.size(), kTableHeaderBytes + 4 + 2 + 1 + 5 * 4 + 4);
  const std::size_t floats_at = kTableHeaderBytes + 4 + 2 + 1;
  for (int k = 0; k < 5; ++k) {
    float v;
    std::memcpy(&v, bytes.data() + floats_at + 4 * k, 4);
    EXPECT_EQ(v, static_cast<float>(k + 1));
  }
}

TEST(FeatureStoreTest, WriteIsByteStable) {
  const auto t = testing::random_table(8, 3, 2, 3, 7);
  EXPECT_EQ(serialize(t), serialize(t));
}

TEST(FeatureStoreTest, RoundTripPreservesFloatBits) {
  auto t = testing::random_table(20, 4, 6, 5, 3);
  t.records[0].visual[0] = -0.0f;
  t.records[1].text[2] = std::numeric_limits<float>::denorm_min();
  t.records[2].visual[1] = std::bit_cast<float>(0x7fc00123u);  // NaN with payload
  t.records[3].sample_id = "unicode \xc3\xa9\xe2\x82\xac";
  const auto back = parse(serialize(t));
  EXPECT_EQ(back, t);
  EXPECT_EQ(std::bit_cast<std::uint32_t>(back.records[2].visual[1]), 0x7fc00123u);
  EXPECT_TRUE(std::signbit(back.records[0].visual[0]));
}

TEST(FeatureStoreTest, DistinctTablesSerializeDifferently) {
  auto a = testing::random_table(5, 2, 2, 2, 11);
  auto b = a;
  b.records[4].text[1] = std::nextafter(b.records[4].text[1], 10.0f);
  EXPECT_NE(serialize(a), serialize(b));
  auto c = a;
  std::swap(c.records[0], c.records[1]);
  EXPECT_NE(serialize(a), serialize(c));
}

TEST(FeatureStoreTest, BadMagicIsFormatError) {
  auto bytes = serialize(testing::random_table(2, 2, 2, 2, 1));
  bytes.replace(0, 4, "XXXX");
  EXPECT_THROW(parse(bytes), FormatError);
}

TEST(FeatureStoreTest, MissingRecordIsTruncation) {
  const auto full = serialize(testing::random_table(3, 2, 2, 2, 1));
  const auto two = serialize(testing::random_table(2, 2, 2, 2, 1));
  // Header of the 3-record table followed by only two records.
  const auto truncated = full.substr(0, two.size());
  EXPECT_THROW(parse(truncated), TruncationError);
  EXPECT_THROW(parse(full.substr(0, 10)), TruncationError);
  EXPECT_THROW(parse(full.substr(0, full.size() - 1)), TruncationError);
}

TEST(FeatureStoreTest, ExtraRecordIsCorruption) {
  const auto one = testing::random_table(1, 2, 2, 2, 5);
  auto bytes = serialize(one);
  const auto record = bytes.substr(kTableHeaderBytes);
  EXPECT_THROW(parse(bytes + record), CorruptionError);
}

TEST(FeatureStoreTest, InvalidSplitByteIsCorruption) {
  FeatureTable t{1, 1, 2, {}};
  t.records.push_back({"a", Split::kTrain, {0.0f}, {0.0f}, 0});
  auto bytes = serialize(t);
  bytes[kTableHeaderBytes + 4 + 1] = 9;
  EXPECT_THROW(parse(bytes), CorruptionError);
}

TEST(FeatureStoreTest, ValidateFindsEachRule) {
  auto t = testing::random_table(6, 2, 3, 3, 2);
  EXPECT_TRUE(validate_table(t).empty());

  auto dup = t;
  dup.records[4].sample_id = dup.records[1].sample_id;
  auto v = validate_table(dup);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].sample_id, dup.records[1].sample_id);

  auto label = t;
  label.records[2].label = 3;
  v = validate_table(label);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].sample_id, label.records[2].sample_id);
  EXPECT_NE(v[0].rule, validate_table(dup)[0].rule);

  auto dims = t;
  dims.records[0].text.pop_back();
  EXPECT_EQ(validate_table(dims).size(), 1u);

  std::ostringstream sink;
  EXPECT_THROW(write_table(label, sink), InvariantError);
}

TEST(FeatureStoreTest, SelectSplitPartitionsTheTable) {
  FeatureTable t{1, 1, 2, {}};
  for (int i = 0; i < 5; ++i) {
    t.records.push_back({"r" + std::to_string(i), i < 3 ? Split::kTrain : Split::kVal,
                         {static_cast<float>(i)}, {0.0f}, 0});
  }
  EXPECT_EQ(select_split(t, Split::kTrain).size(), 3u);
  EXPECT_EQ(select_split(t, Split::kVal).size(), 2u);
  EXPECT_EQ(select_split(t, Split::kTest).size(), 0u);

  const auto big = testing::random_table(50, 2, 2, 2, 9);
  std::vector<std::string> seen;
  for (auto s : kAllSplits) {
    const auto part = select_split(big, s);
    EXPECT_EQ(part.visual_dim, big.visual_dim);
    for (const auto& r : part.records) {
      EXPECT_EQ(r.split, s);
      seen.push_back(r.sample_id);
    }
    // Order within a split follows the table.
    for (std::size_t i = 1; i < part.size(); ++i) {
      auto pos = [&](const std::string& id) {
        return std::find_if(big.records.begin(), big.records.end(),
                            [&](const auto& r) { return r.sample_id == id; });
      };
      EXPECT_LT(pos(part.records[i - 1].sample_id), pos(part.records[i].sample_id));
    }
  }
  std::sort(seen.begin(), seen.end());
  std::vector<std::string> all;
  for (const auto& r : big.records) all.push_back(r.sample_id);
  std::sort(all.begin(), all.end());
  EXPECT_EQ(seen, all);
}

TEST(FeatureStoreTest, MatricesAreColumnPerSample) {
  const auto t = testing::random_table(4, 2, 3, 2, 4);
  const auto j = joint_matrix(t);
  ASSERT_EQ(j.rows(), 5);
  ASSERT_EQ(j.cols(), 4);
  EXPECT_EQ(j(0, 2), t.records[2].visual[0]);
  EXPECT_EQ(j(4, 3), t.records[3].text[2]);
  EXPECT_EQ(labels(t)[1], t.records[1].label);
}

TEST(FeatureStoreTest, SaveAndLoadFile) {
  testing::TempDir dir("fs");
  const auto t = testing::random_table(10, 3, 3, 2, 8);
  save_table(t, dir / "t.mifs");
  EXPECT_EQ(load_table(dir / "t.mifs"), t);
  EXPECT_THROW(load_table(dir / "missing.mifs"), IoError);
}

TEST(TextManifestTest, RoundTripWithAndWithoutCaption) {
  TextManifest m{{"a", "hello\nworld", std::nullopt}, {"b", "caf\xc3\xa9", "a cat"}};
  std::stringstream io;
  write_text_manifest(m, io);
  EXPECT_NE(io.str().find("\"caption\":null"), std::string::npos);
  EXPECT_EQ(read_text_manifest(io), m);
}

TEST(TextManifestTest, RejectsDuplicatesAndGarbage) {
  std::istringstream dup(R"({"sample_id":"a","text":"x","caption":null}
{"sample_id":"a","text":"y","caption":null}
)");
  EXPECT_THROW(read_text_manifest(dup), SchemaError);
  std::istringstream bad("{not json}\n");
  EXPECT_THROW(read_text_manifest(bad), SchemaError);
  std::istringstream missing(R"({"text":"x"})");
  EXPECT_THROW(read_text_manifest(missing), SchemaError);
}

}  // namespace
}  // namespace migate
