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

#include "saocnn/bitstream.hpp"

#include <bit>

namespace saocnn {

namespace {

std::uint32_t zigzag(std::int32_t v) {
  return v <= 0 ? static_cast<std::uint32_t>(-static_cast<std::int64_t>(v)) * 2
                : static_cast<std::uint32_t>(v) * 2 - 1;
}

}  // namespace

int ueLength(std::uint32_t v) {
  const std::uint64_t code = static_cast<std::uint64_t>(v) + 1;
  const int len = 64 - std::countl_zero(code);
  return 2 * len - 1;
}

int seLength(std::int32_t v) { return ueLength(zigzag(v)); }

void BitWriter::bit(bool b) {
  if (bitCount_ % 8 == 0) bytes_.push_back(0);
  if (b) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bitCount_ % 8));
  ++bitCount_;
}

void BitWriter::bits(std::uint32_t value, int count) {
  for (int i = count - 1; i >= 0; --i) bit((value >> i) & 1u);
}

void BitWriter::ue(std::uint32_t v) {
  const std::uint64_t code = static_cast<std::uint64_t>(v) + 1;
  const int len = 64 - std::countl_zero(code);
  for (int i = 1; i < len; ++i) bit(false);
  for (int i = len - 1; i >= 0; --i) bit((code >> i) & 1u);
}

void BitWriter::se(std::int32_t v) { ue(zigzag(v)); }

void BitWriter::alignZero() {
  while (bitCount_ % 8 != 0) bit(false);
}

bool BitReader::bit() {
  if (bitPos_ >= bytes_.size() * 8) throw Error("truncated stream");
  const bool b = (bytes_[bitPos_ / 8] >> (7 - bitPos_ % 8)) & 1u;
  ++bitPos_;
  return b;
}

std::uint32_t BitReader::bits(int count) {
  std::uint32_t v = 0;
  for (int i = 0; i < count; ++i) v = (v << 1) | static_cast<std::uint32_t>(bit());
  return v;
}

std::uint32_t BitReader::ue() {
  int zeros = 0;
  while (!bit()) {
    if (++zeros > 31) throw Error("malformed exp-Golomb prefix");
  }
  std::uint64_t code = 1;
  for (int i = 0; i < zeros; ++i) code = (code << 1) | static_cast<std::uint64_t>(bit());
  return static_cast<std::uint32_t>(code - 1);
}

std::int32_t BitReader::se() {
  const std::uint32_t k = ue();
  if (k % 2 == 1) return static_cast<std::int32_t>((k + 1) / 2);
  return -static_cast<std::int32_t>(k / 2);
}

std::size_t BitReader::alignToByte() {
  bitPos_ = (bitPos_ + 7) / 8 * 8;
  return bitPos_ / 8;
}

}  // namespace saocnn
