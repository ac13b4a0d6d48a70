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

#include "saocnn/cnn_io.hpp"

#include <fstream>
#include <iterator>

#include "saocnn/byte_io.hpp"

namespace saocnn {

namespace {

constexpr std::uint16_t kContainerVersion = 1;

Arch decodeArch(std::uint8_t v) {
  if (v != 1 && v != 2) throw Error("unknown arch id " + std::to_string(v));
  return static_cast<Arch>(v);
}

Role decodeRole(std::uint8_t v) {
  if (v > 1) throw Error("unknown role id " + std::to_string(v));
  return static_cast<Role>(v);
}

void expectEnd(const ByteReader& in) {
  if (in.remaining() != 0) throw Error("trailing bytes after network container");
}

}  // namespace

std::vector<std::uint8_t> readFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void writeFileBytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

std::vector<std::uint8_t> encodeSaow(const NetworkSpec& net) {
  net.validate();
  ByteWriter out;
  out.magic("SAOW");
  out.u16(kContainerVersion);
  out.u8(static_cast<std::uint8_t>(net.arch));
  out.u8(static_cast<std::uint8_t>(net.role));
  out.u8(static_cast<std::uint8_t>(net.layers.size()));
  for (const auto& layer : net.layers) {
    out.u16(static_cast<std::uint16_t>(layer.inChannels));
    out.u16(static_cast<std::uint16_t>(layer.outChannels));
    out.u8(kKernelSize);
    for (double w : layer.weights) out.f64(w);
    for (double b : layer.bias) out.f64(b);
  }
  return out.take();
}

NetworkSpec decodeSaow(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  in.expectMagic("SAOW");
  if (in.u16() != kContainerVersion) throw Error("unsupported SAOW version");
  NetworkSpec net;
  net.arch = decodeArch(in.u8());
  net.role = decodeRole(in.u8());
  const int layers = in.u8();
  if (layers != kNumLayers) throw Error("SAOW layer count must be 6");
  for (int l = 0; l < layers; ++l) {
    const int inCh = in.u16();
    const int outCh = in.u16();
    if (in.u8() != kKernelSize) throw Error("SAOW kernel size must be 3");
    LayerSpec layer(inCh, outCh);
    for (double& w : layer.weights) w = in.f64();
    for (double& b : layer.bias) b = in.f64();
    net.layers.push_back(std::move(layer));
  }
  expectEnd(in);
  net.validate();
  return net;
}

std::vector<std::uint8_t> encodeSaoq(const QuantizedNetwork& net) {
  net.validate();
  ByteWriter out;
  out.magic("SAOQ");
  out.u16(kContainerVersion);
  out.u8(static_cast<std::uint8_t>(net.fracBits));
  out.u8(static_cast<std::uint8_t>(net.arch));
  out.u8(static_cast<std::uint8_t>(net.role));
  out.u8(static_cast<std::uint8_t>(net.layers.size()));
  for (const auto& layer : net.layers) {
    out.u8(static_cast<std::uint8_t>(layer.shift));
    for (auto w : layer.weights) out.i16(w);
    for (auto b : layer.bias) out.i32(b);
  }
  return out.take();
}

QuantizedNetwork decodeSaoq(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  in.expectMagic("SAOQ");
  if (in.u16() != kContainerVersion) throw Error("unsupported SAOQ version");
  QuantizedNetwork net;
  net.fracBits = in.u8();
  net.arch = decodeArch(in.u8());
  net.role = decodeRole(in.u8());
  const int layers = in.u8();
  if (layers != kNumLayers) throw Error("SAOQ layer count must be 6");
  const auto ladder = channelLadder(net.arch, net.role);
  for (int l = 0; l < layers; ++l) {
    QuantizedLayer layer;
    layer.inChannels = ladder[l];
    layer.outChannels = ladder[l + 1];
    layer.shift = in.u8();
    layer.weights.resize(static_cast<std::size_t>(layer.inChannels) * layer.outChannels * kKernelTaps);
    layer.bias.resize(static_cast<std::size_t>(layer.outChannels));
    for (auto& w : layer.weights) w = in.i16();
    for (auto& b : layer.bias) b = in.i32();
    net.layers.push_back(std::move(layer));
  }
  expectEnd(in);
  net.validate();
  return net;
}

void writeSaow(const NetworkSpec& net, const std::filesystem::path& path) { writeFileBytes(path, encodeSaow(net)); }
NetworkSpec readSaow(const std::filesystem::path& path) { return decodeSaow(readFileBytes(path)); }
void writeSaoq(const QuantizedNetwork& net, const std::filesystem::path& path) { writeFileBytes(path, encodeSaoq(net)); }
QuantizedNetwork readSaoq(const std::filesystem::path& path) { return decodeSaoq(readFileBytes(path)); }

}  // namespace saocnn
