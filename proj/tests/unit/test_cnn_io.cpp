// Copyright 2026 The saocnn Authors
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

#include <filesystem>

#include "saocnn/byte_io.hpp"
#include "saocnn/cnn_io.hpp"

namespace saocnn {
namespace {

TEST(Saow, RoundTripIsExact) {
  for (auto arch : {Arch::V1, Arch::V2})
    for (auto role : {Role::Luma, Role::Chroma}) {
      const auto net = randomNetwork(arch, role, 5);
      const auto back = decodeSaow(encodeSaow(net));
      EXPECT_EQ(back.arch, arch);
      EXPECT_EQ(back.role, role);
      ASSERT_EQ(back.layers.size(), net.layers.size());
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        EXPECT_EQ(back.layers[l].weights, net.layers[l].weights);
        EXPECT_EQ(back.layers[l].bias, net.layers[l].bias);
      }
    }
}

TEST(Saow, HeaderLayout) {
  const auto bytes = encodeSaow(NetworkSpec::zeros(Arch::V2, Role::Chroma));
  ASSERT_GE(bytes.size(), 14u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "SAOW");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 0);
  EXPECT_EQ(bytes[6], 2);   // arch
  EXPECT_EQ(bytes[7], 1);   // role
  EXPECT_EQ(bytes[8], 6);   // layers
  EXPECT_EQ(bytes[9], 3);   // in_ch of layer 0, little-endian
  EXPECT_EQ(bytes[10], 0);
  EXPECT_EQ(bytes[11], 16);  // out_ch
  EXPECT_EQ(bytes[13], 3);   // kernel
  std::size_t expect = 9;
  for (const auto& l : NetworkSpec::zeros(Arch::V2, Role::Chroma).layers)
    expect += 5 + 8 * (l.weights.size() + l.bias.size());
  EXPECT_EQ(bytes.size(), expect);
}

TEST(Saow, RejectsCorruptInput) {
  auto bytes = encodeSaow(NetworkSpec::zeros(Arch::V1, Role::Luma));
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decodeSaow(bad), Error);
  bad = bytes;
  bad[4] = 2;
  EXPECT_THROW(decodeSaow(bad), Error);
  bad = bytes;
  bad[6] = 3;
  EXPECT_THROW(decodeSaow(bad), Error);
  bad = bytes;
  bad[11] = 17;  // layer 0 out_ch no longer matches the ladder
  EXPECT_THROW(decodeSaow(bad), Error);
  bad = bytes;
  bad.pop_back();
  EXPECT_THROW(decodeSaow(bad), Error);
  bad = bytes;
  bad.push_back(0);
  EXPECT_THROW(decodeSaow(bad), Error);
}

TEST(Saoq, RoundTripAndLayout) {
  const auto q = quantize(randomNetwork(Arch::V1, Role::Chroma, 9), 11);
  const auto bytes = encodeSaoq(q);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "SAOQ");
  EXPECT_EQ(bytes[6], 11);
  EXPECT_EQ(bytes[7], 1);
  EXPECT_EQ(bytes[8], 1);
  EXPECT_EQ(bytes[9], 6);
  EXPECT_EQ(bytes[10], q.layers[0].shift);
  EXPECT_EQ(decodeSaoq(bytes), q);
  std::size_t expect = 10;
  for (const auto& l : q.layers) expect += 1 + 2 * l.weights.size() + 4 * l.bias.size();
  EXPECT_EQ(bytes.size(), expect);
  auto bad = bytes;
  bad.resize(bytes.size() - 3);
  EXPECT_THROW(decodeSaoq(bad), Error);
  bad = bytes;
  bad[10] = 16;  // shift out of range
  EXPECT_THROW(decodeSaoq(bad), Error);
}

TEST(Containers, FileRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "saocnn_cnn_io_test";
  std::filesystem::create_directories(dir);
  const auto net = randomNetwork(Arch::V2, Role::Luma, 3);
  writeSaow(net, dir / "n.saow");
  EXPECT_EQ(readSaow(dir / "n.saow").layers[2].weights, net.layers[2].weights);
  const auto q = quantize(net);
  writeSaoq(q, dir / "n.saoq");
  EXPECT_EQ(readSaoq(dir / "n.saoq"), q);
  EXPECT_THROW(readSaoq(dir / "missing.saoq"), Error);
  std::filesystem::remove_all(dir);
}

TEST(ByteIo, LittleEndianAndTruncation) {
  ByteWriter w;
  w.u16(0x1234);
  w.i32(-2);
  w.f64(1.5);
  const auto bytes = w.take();
  EXPECT_EQ(bytes[0], 0x34);
  EXPECT_EQ(bytes[1], 0x12);
  EXPECT_EQ(bytes[2], 0xFE);
  ByteReader r(bytes);
  EXPECT_EQ(r.u16(), 0x1234);
  EXPECT_EQ(r.i32(), -2);
  EXPECT_EQ(r.f64(), 1.5);
  EXPECT_THROW(r.u8(), Error);
}

}  // namespace
}  // namespace saocnn
