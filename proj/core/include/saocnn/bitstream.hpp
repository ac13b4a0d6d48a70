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

// MSB-first bit packing with order-0 exp-Golomb codes.

#include <cstdint>
#include <span>
#include <vector>

#include "saocnn/array2d.hpp"

namespace saocnn {

/// Number of bits of ue(v).
int ueLength(std::uint32_t v);
/// Number of bits of se(v); zig-zag v <= 0 -> -2v, v > 0 -> 2v - 1.
int seLength(std::int32_t v);

class BitWriter {
 public:
  void bit(bool b);
  void bits(std::uint32_t value, int count);
  void ue(std::uint32_t v);
  void se(std::int32_t v);

  std::size_t bitCount() const { return bitCount_; }
  /// Pads with zero bits to the next byte boundary.
  void alignZero();
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bitCount_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes, std::size_t byteOffset = 0)
      : bytes_(bytes), bitPos_(byteOffset * 8) {}

  bool bit();
  std::uint32_t bits(int count);
  std::uint32_t ue();
  std::int32_t se();

  std::size_t bitPosition() const { return bitPos_; }
  /// Skips to the next byte boundary; returns the byte offset reached.
  std::size_t alignToByte();

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t bitPos_ = 0;
};

}  // namespace saocnn
