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

#include "migate/gate/hash.hpp"

#include <string>

#include <openssl/evp.h>

#include "migate/error.hpp"

namespace migate::gate {

std::array<unsigned char, 32> sha256(std::string_view data) {
  std::array<unsigned char, 32> digest{};
  unsigned int size = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &size, EVP_sha256(), nullptr) != 1 ||
      size != digest.size()) {
    throw Error("SHA-256 digest failed");
  }
  return digest;
}

std::uint64_t hash_u64(std::string_view sample_id, std::string_view salt) {
  std::string message;
  message.reserve(salt.size() + sample_id.size());
  message.append(salt);
  message.append(sample_id);
  const auto digest = sha256(message);
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < 8; ++i) value = (value << 8) | digest[i];
  return value;
}

double hash_unit(std::string_view sample_id, std::string_view salt) {
  return static_cast<double>(hash_u64(sample_id, salt) >> 11) * 0x1.0p-53;
}

}  // namespace migate::gate
