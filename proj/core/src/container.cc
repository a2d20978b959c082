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

#include "stancekit/container.h"

#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "stancekit/error.h"

namespace stancekit {
namespace {

constexpr std::array<char, 4> kMagic = {'S', 'T', 'K', 'C'};

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  for (size_t k = 0; k < sizeof(T); ++k) {
    bytes[k] = static_cast<char>((value >> (8 * k)) & 0xFF);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw Error(ErrorCode::kFormat, "container truncated");
  }
  T value = 0;
  for (size_t k = 0; k < sizeof(T); ++k) {
    value |= static_cast<T>(bytes[k]) << (8 * k);
  }
  return value;
}

}  // namespace

void write_container(std::ostream& out, std::span<const Section> sections) {
  out.write(kMagic.data(), kMagic.size());
  put_le<uint32_t>(out, kContainerVersion);
  put_le<uint32_t>(out, static_cast<uint32_t>(sections.size()));
  for (const auto& section : sections) {
    const std::string header = section.header.dump();
    put_le<uint64_t>(out, header.size());
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    put_le<uint64_t>(out, section.payload.size());
    for (double v : section.payload) {
      put_le<uint64_t>(out, std::bit_cast<uint64_t>(v));
    }
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing container");
}

std::vector<Section> read_container(std::istream& in) {
  std::array<char, 4> magic;
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw Error(ErrorCode::kFormat, "not a stancekit container (bad magic)");
  }
  const auto version = get_le<uint32_t>(in);
  if (version != kContainerVersion) {
    throw Error(ErrorCode::kFormat,
                "unsupported container version " + std::to_string(version));
  }
  const auto count = get_le<uint32_t>(in);
  std::vector<Section> sections;
  sections.reserve(count);
  for (uint32_t s = 0; s < count; ++s) {
    Section section;
    const auto header_len = get_le<uint64_t>(in);
    std::string header(header_len, '\0');
    if (!in.read(header.data(), static_cast<std::streamsize>(header_len))) {
      throw Error(ErrorCode::kFormat, "container truncated in header");
    }
    try {
      section.header = nlohmann::json::parse(header);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormat,
                  "bad section header " + std::to_string(s) + ": " + e.what());
    }
    const auto payload_len = get_le<uint64_t>(in);
    section.payload.resize(payload_len);
    for (auto& v : section.payload) v = std::bit_cast<double>(get_le<uint64_t>(in));
    sections.push_back(std::move(section));
  }
  return sections;
}

void write_container_file(const std::filesystem::path& path,
                          std::span<const Section> sections) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  write_container(out, sections);
}

std::vector<Section> read_container_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return read_container(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace stancekit
