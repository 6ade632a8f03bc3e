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

#include <stdexcept>
#include <string>

namespace migate {

// Base of every error raised by the library. The CLI maps subclasses onto
// process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

#define MIGATE_DECLARE_ERROR(Name, Tag)                          \
  class Name : public Error {                                    \
   public:                                                       \
    using Error::Error;                                          \
    const char* kind() const noexcept override { return Tag; }   \
  }

MIGATE_DECLARE_ERROR(FormatError, "format");
MIGATE_DECLARE_ERROR(TruncationError, "truncation");
MIGATE_DECLARE_ERROR(CorruptionError, "corruption");
MIGATE_DECLARE_ERROR(InvariantError, "invariant");
MIGATE_DECLARE_ERROR(IoError, "io");
MIGATE_DECLARE_ERROR(DimensionError, "dimension");
MIGATE_DECLARE_ERROR(NumericalError, "numerical");
MIGATE_DECLARE_ERROR(RankError, "rank");
MIGATE_DECLARE_ERROR(DomainError, "domain");
MIGATE_DECLARE_ERROR(SchemaError, "schema");
MIGATE_DECLARE_ERROR(GateError, "gate");
MIGATE_DECLARE_ERROR(ConfigError, "config");
MIGATE_DECLARE_ERROR(AssetError, "asset");

#undef MIGATE_DECLARE_ERROR

}  // namespace migate
