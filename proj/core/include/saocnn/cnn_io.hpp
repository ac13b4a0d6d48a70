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

#pragma once

// Network containers.
//
// SAOW (float): "SAOW" u16 version=1, u8 arch (1=v1, 2=v2), u8 role (0=luma,
//   1=chroma), u8 layer count, then per layer u16 in_ch, u16 out_ch, u8 kernel=3,
//   f64 weights [out][in][ky][kx], f64 biases [out].
// SAOQ (16-bit): "SAOQ" u16 version=1, u8 A, u8 arch, u8 role, u8 layer count,
//   then per layer u8 s_l, i16 weights (same order), i32 biases. Channel counts
//   follow from arch and role.
// All multi-byte values are little-endian.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "saocnn/cnn.hpp"

namespace saocnn {

std::vector<std::uint8_t> encodeSaow(const NetworkSpec& net);
NetworkSpec decodeSaow(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encodeSaoq(const QuantizedNetwork& net);
QuantizedNetwork decodeSaoq(std::span<const std::uint8_t> bytes);

void writeSaow(const NetworkSpec& net, const std::filesystem::path& path);
NetworkSpec readSaow(const std::filesystem::path& path);
void writeSaoq(const QuantizedNetwork& net, const std::filesystem::path& path);
QuantizedNetwork readSaoq(const std::filesystem::path& path);

}  // namespace saocnn
