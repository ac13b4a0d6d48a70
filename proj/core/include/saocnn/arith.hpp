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

// Fixed-width integer helpers shared by the filter and inference paths.
// Everything here is exact and platform independent.

#include <algorithm>
#include <cstdint>
#include <limits>

namespace saocnn {

constexpr std::int32_t kInt32Max = std::numeric_limits<std::int32_t>::max();
constexpr std::int32_t kInt32Min = std::numeric_limits<std::int32_t>::min();
constexpr std::int16_t kInt16Max = std::numeric_limits<std::int16_t>::max();
constexpr std::int16_t kInt16Min = std::numeric_limits<std::int16_t>::min();

constexpr std::int32_t saturateInt32(std::int64_t v) {
  return static_cast<std::int32_t>(std::clamp<std::int64_t>(v, kInt32Min, kInt32Max));
}

constexpr std::int16_t saturateInt16(std::int64_t v) {
  return static_cast<std::int16_t>(std::clamp<std::int64_t>(v, kInt16Min, kInt16Max));
}

constexpr std::int32_t saturatingAdd(std::int32_t a, std::int32_t b) {
  return saturateInt32(static_cast<std::int64_t>(a) + b);
}

/// (v + 2^(shift-1)) >> shift with an arithmetic shift; identity for shift 0.
constexpr std::int64_t roundShiftHalfUp(std::int64_t v, int shift) {
  if (shift <= 0) return v;
  return (v + (std::int64_t{1} << (shift - 1))) >> shift;
}

/// num / den rounded half away from zero; den > 0.
constexpr std::int64_t divRoundHalfAway(std::int64_t num, std::int64_t den) {
  return num >= 0 ? (2 * num + den) / (2 * den) : -((-2 * num + den) / (2 * den));
}

constexpr int clipSample(std::int64_t v, int maxValue) {
  return static_cast<int>(std::clamp<std::int64_t>(v, 0, maxValue));
}

}  // namespace saocnn
