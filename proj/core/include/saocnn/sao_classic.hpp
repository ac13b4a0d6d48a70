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

#include <algorithm>
#include <array>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "saocnn/frame.hpp"

namespace saocnn {

enum class SaoMode : std::uint8_t { Off = 0, Eo0, Eo90, Eo135, Eo45, Bo };

constexpr int kNumCategories = 5;
constexpr int kNumOffsets = kNumCategories - 1;
constexpr int kNumBands = 32;
constexpr int kMaxBandPosition = kNumBands - kNumOffsets;

constexpr bool isEdgeOffset(SaoMode m) { return m >= SaoMode::Eo0 && m <= SaoMode::Eo45; }
std::string_view toString(SaoMode m);

/// Edge class of the centre sample given its two neighbours along the EO direction.
///   1: local minimum   2: lower edge   3: upper edge   4: local maximum   0: none
constexpr int eoCategory(int p0, int pc, int p1) {
  if (pc < p0 && pc < p1) return 1;
  if ((pc < p0 && pc == p1) || (pc == p0 && pc < p1)) return 2;
  if ((pc > p0 && pc == p1) || (pc == p0 && pc > p1)) return 3;
  if (pc > p0 && pc > p1) return 4;
  return 0;
}

struct Displacement {
  int dx = 0;
  int dy = 0;
  bool operator==(const Displacement&) const = default;
};

std::array<Displacement, 2> eoNeighborOffsets(SaoMode mode);

constexpr int boBand(int sample, int bitDepth) { return sample >> (bitDepth - 5); }

/// Largest admissible offset magnitude: 7 at 8-bit, 31 at 10-bit and above.
constexpr int offsetCap(int bitDepth) { return (1 << (std::min(bitDepth, 10) - 5)) - 1; }

struct ClassicSaoParams {
  SaoMode mode = SaoMode::Off;
  int bandPos = 0;  // BO only, first of four consecutive bands
  std::array<int, kNumOffsets> offsets{};

  bool operator==(const ClassicSaoParams&) const = default;
};

/// Throws if band position, offset range or the EO sign convention is violated.
void validate(const ClassicSaoParams& params, int bitDepth);

/// Encoder statistics of one class: sample count and sum of (orig - rec).
struct CategoryStats {
  std::int64_t count = 0;
  std::int64_t errSum = 0;

  bool operator==(const CategoryStats&) const = default;
};

/// Category (EO) or band (BO) of the sample at (x, y); -1 for OFF. Samples whose
/// EO neighbours fall outside the plane are category 0.
int classifySample(const Plane& rec, int x, int y, SaoMode mode);

/// EO: five entries indexed by category. BO: 32 entries indexed by band.
std::vector<CategoryStats> collectStats(const Plane& orig, const Plane& rec, const Rect& region, SaoMode mode);

/// N*off^2 - 2*off*E: the SSE change of adding `off` to every sample of the class (no clipping).
constexpr std::int64_t deltaDistortion(std::int64_t count, std::int64_t errSum, std::int64_t off) {
  return count * off * off - 2 * off * errSum;
}

/// Offset in [lo, hi] minimising deltaDistortion; ties prefer smaller magnitude, then smaller value.
int bestOffset(const CategoryStats& stats, int lo, int hi);

/// Class statistics that stay exact under clipping: the plain (N, E) pair plus the
/// few samples close enough to the range limits to clip for some |off| <= cap.
struct ClassSamples {
  CategoryStats stats;
  std::vector<std::pair<std::uint16_t, std::uint16_t>> nearLimit;  // (orig, rec)
};

std::vector<ClassSamples> collectClassSamples(const Plane& orig, const Plane& rec, const Rect& region,
                                              SaoMode mode, int cap);

/// Exact SSE change of adding `off` to a class and clipping to [0, maxValue].
std::int64_t clippedDeltaDistortion(const ClassSamples& cls, int off, int maxValue);

/// SSE against `orig` over `region` after filtering, without materialising the output.
std::int64_t filteredSse(const Plane& orig, const Plane& rec, const Rect& region, const ClassicSaoParams& params);

/// Filters `region` of `rec` into the same region of `out`; neighbours are read from `rec` only.
void applyClassicSao(const Plane& rec, const Rect& region, const ClassicSaoParams& params, Plane& out);
Plane applyClassicSao(const Plane& rec, const ClassicSaoParams& params);

}  // namespace saocnn
