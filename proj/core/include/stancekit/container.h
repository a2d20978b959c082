// Copyright 2026 The stancekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STANCEKIT_CONTAINER_H_
#define STANCEKIT_CONTAINER_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace stancekit {

// Versioned binary container shared by feature and model files.
//
//   offset  size  field
//   0       4     magic "STKC"
//   4       4     u32 format version (kContainerVersion)
//   8       4     u32 section count S
//   then S sections, each:
//           8     u64 header length H in bytes
//           H     UTF-8 JSON header (compact, keys sorted)
//           8     u64 payload length P in float64 elements
//           8*P   IEEE-754 binary64 values
//
// All integers and doubles are little-endian. Every section header carries a
// "type" key naming its layout.
inline constexpr uint32_t kContainerVersion = 1;

struct Section {
  nlohmann::json header;
  std::vector<double> payload;
};

void write_container(std::ostream& out, std::span<const Section> sections);
std::vector<Section> read_container(std::istream& in);

void write_container_file(const std::filesystem::path& path,
                          std::span<const Section> sections);
std::vector<Section> read_container_file(const std::filesystem::path& path);

}  // namespace stancekit

#endif  // STANCEKIT_CONTAINER_H_
