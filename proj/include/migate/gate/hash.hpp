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
#include <string_view>

namespace migate::gate {

std::array<unsigned char, 32> sha256(std::string_view data);

// First eight bytes of SHA-256(salt || sample_id), read big-endian.
std::uint64_t hash_u64(std::string_view sample_id, std::string_view salt = {});

// hash_u64 mapped into [0, 1). Only the top 53 bits are kept so that the
// double can never round up to 1.
double hash_unit(std::string_view sample_id, std::string_view salt = {});

}  // namespace migate::gate
