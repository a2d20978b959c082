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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <vector>

#include "stancekit/container.h"
#include "test_util.h"

namespace stancekit {
namespace {

std::vector<Section> sample() {
  return {Section{{{"type", "a"}, {"k", {1, 2}}}, {1.0, -0.0, 1e-310, 0.1}},
          Section{{{"type", "b"}}, {}}};
}

TEST(Container, RoundTripBitExact) {
  std::stringstream buf;
  write_container(buf, sample());
  const auto back = read_container(buf);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].header, sample()[0].header);
  ASSERT_EQ(back[0].payload.size(), 4u);
  for (size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(std::memcmp(&back[0].payload[i], &sample()[0].payload[i], sizeof(double)), 0);
  }
  EXPECT_TRUE(back[1].payload.empty());
}

TEST(Container, Layout) {
  std::stringstream buf;
  const std::vector<Section> one = {Section{{{"type", "x"}}, {2.0}}};
  write_container(buf, one);
  const std::string bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, 4), "STKC");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 1);
  const std::string header = R"({"type":"x"})";
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), header.size());
  EXPECT_EQ(bytes.substr(20, header.size()), header);
  EXPECT_EQ(bytes.size(), 12 + 8 + header.size() + 8 + 8);
}

TEST(Container, RejectsGarbage) {
  std::stringstream bad("NOPE\x01\x00\x00\x00");
  EXPECT_ERROR_CODE(read_container(bad), ErrorCode::kFormat);

  std::stringstream buf;
  write_container(buf, sample());
  std::string bytes = buf.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_ERROR_CODE(read_container(truncated), ErrorCode::kFormat);

  bytes[4] = 9;
  std::stringstream version(bytes);
  EXPECT_ERROR_CODE(read_container(version), ErrorCode::kFormat);
}

TEST(Container, MissingFile) {
  EXPECT_ERROR_CODE(read_container_file("/nonexistent/model.bin"), ErrorCode::kIo);
}

}  // namespace
}  // namespace stancekit
