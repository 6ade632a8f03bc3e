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
#include <vector>

#include "migate/binary_io.hpp"
#include "migate/error.hpp"
#include "migate/nn/dense_net.hpp"

namespace migate::nn {

// "MINN" checkpoint: magic[4] version:u16 layers:u32, then per layer
// in:u32 out:u32 activation:u8, then every parameter as f32 in the net's
// flat order. Little-endian throughout.
inline constexpr std::array<char, 4> kNetMagic{'M', 'I', 'N', 'N'};
inline constexpr std::uint16_t kNetVersion = 1;

template <typename Scalar>
std::uint64_t write_net(const DenseNet<Scalar>& net, std::ostream& out) {
  io::Writer writer(out);
  writer.bytes(kNetMagic.data(), kNetMagic.size());
  writer.u16(kNetVersion);
  writer.u32(static_cast<std::uint32_t>(net.num_layers()));
  for (const auto& shape : net.shapes()) {
    writer.u32(static_cast<std::uint32_t>(shape.in));
    writer.u32(static_cast<std::uint32_t>(shape.out));
    writer.u8(static_cast<std::uint8_t>(shape.activation));
  }
  for (Eigen::Index i = 0; i < net.num_parameters(); ++i) {
    writer.f32(static_cast<float>(net.parameters()(i)));
  }
  return writer.count();
}

template <typename Scalar>
DenseNet<Scalar> read_net(std::istream& in) {
  io::Reader reader(in);
  std::array<char, 4> magic{};
  reader.bytes(magic.data(), magic.size(), "magic");
  if (magic != kNetMagic) throw FormatError("bad magic: not a MINN checkpoint");
  if (const auto version = reader.u16("version"); version != kNetVersion) {
    throw FormatError("unsupported MINN version " + std::to_string(version));
  }
  const std::uint32_t layers = reader.u32("layer count");
  if (layers == 0 || layers > 1024) throw CorruptionError("implausible layer count");
  std::vector<LayerShape> shapes;
  for (std::uint32_t k = 0; k < layers; ++k) {
    LayerShape shape;
    shape.in = reader.u32("layer input dim");
    shape.out = reader.u32("layer output dim");
    const std::uint8_t act = reader.u8("activation");
    if (act > static_cast<std::uint8_t>(Activation::kRelu)) {
      throw CorruptionError("unknown activation tag " + std::to_string(act));
    }
    shape.activation = static_cast<Activation>(act);
    shapes.push_back(shape);
  }
  DenseNet<Scalar> net(std::move(shapes));
  for (Eigen::Index i = 0; i < net.num_parameters(); ++i) {
    net.parameters()(i) = static_cast<Scalar>(reader.f32("parameter"));
  }
  if (!reader.at_end()) throw CorruptionError("trailing bytes after MINN parameters");
  return net;
}

template <typename Scalar>
void save_net(const DenseNet<Scalar>& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_net(net, out);
}

template <typename Scalar>
DenseNet<Scalar> load_net(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_net<Scalar>(in);
}

}  // namespace migate::nn
