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

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include "migate/binary_io.hpp"
#include "migate/entropy/gmm.hpp"

namespace migate::entropy {

// "MIGM" checkpoint: magic[4] version:u16 K:u32 d:u32, then f32 logits[K],
// means[K][d] (component-major), raw scale entries[K][d(d+1)/2].
inline constexpr std::array<char, 4> kGmmMagic{'M', 'I', 'G', 'M'};
inline constexpr std::uint16_t kGmmVersion = 1;

template <typename Scalar>
std::uint64_t write_gmm(const GmmEntropyModel<Scalar>& model, std::ostream& out) {
  io::Writer writer(out);
  writer.bytes(kGmmMagic.data(), kGmmMagic.size());
  writer.u16(kGmmVersion);
  writer.u32(static_cast<std::uint32_t>(model.num_components()));
  writer.u32(static_cast<std::uint32_t>(model.dim()));
  // The flat parameter order already matches the file layout.
  for (Index i = 0; i < model.parameters().size(); ++i) {
    writer.f32(static_cast<float>(model.parameters()(i)));
  }
  return writer.count();
}

template <typename Scalar>
GmmEntropyModel<Scalar> read_gmm(std::istream& in) {
  io::Reader reader(in);
  std::array<char, 4> magic{};
  reader.bytes(magic.data(), magic.size(), "magic");
  if (magic != kGmmMagic) throw FormatError("bad magic: not a MIGM checkpoint");
  if (const auto version = reader.u16("version"); version != kGmmVersion) {
    throw FormatError("unsupported MIGM version " + std::to_string(version));
  }
  const std::uint32_t k = reader.u32("K");
  const std::uint32_t d = reader.u32("d");
  if (k == 0 || d == 0 || k > 4096 || d > 65536) throw CorruptionError("implausible MIGM shape");
  GmmEntropyModel<Scalar> model(k, d);
  for (Index i = 0; i < model.parameters().size(); ++i) {
    model.parameters()(i) = static_cast<Scalar>(reader.f32("parameter"));
  }
  if (!reader.at_end()) throw CorruptionError("trailing bytes after MIGM parameters");
  return model;
}

template <typename Scalar>
void save_gmm(const GmmEntropyModel<Scalar>& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_gmm(model, out);
}

template <typename Scalar>
GmmEntropyModel<Scalar> load_gmm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_gmm<Scalar>(in);
}

}  // namespace migate::entropy
