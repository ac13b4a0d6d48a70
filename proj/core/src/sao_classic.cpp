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

#include "saocnn/sao_classic.hpp"

#include <cstdlib>

#include "saocnn/arith.hpp"

namespace saocnn {

std::string_view toString(SaoMode m) {
  switch (m) {
    case SaoMode::Off: return "OFF";
    case SaoMode::Eo0: return "EO_0";
    case SaoMode::Eo90: return "EO_90";
    case SaoMode::Eo135: return "EO_135";
    case SaoMode::Eo45: return "EO_45";
    case SaoMode::Bo: return "BO";
  }
  return "?";
}

std::array<Displacement, 2> eoNeighborOffsets(SaoMode mode) {
  switch (mode) {
    case SaoMode::Eo0: return {{{-1, 0}, {1, 0}}};
    case SaoMode::Eo90: return {{{0, -1}, {0, 1}}};
    case SaoMode::Eo135: return {{{-1, -1}, {1, 1}}};
    case SaoMode::Eo45: return {{{1, -1}, {-1, 1}}};
    default: throw Error("eoNeighborOffsets: not an edge-offset mode");
  }
}

void validate(const ClassicSaoParams& p, int bitDepth) {
  const int cap = offsetCap(bitDepth);
  for (int off : p.offsets)
    if (std::abs(off) > cap) throw Error("SAO offset exceeds cap");
  if (p.mode == SaoMode::Bo && (p.bandPos < 0 || p.bandPos > kMaxBandPosition))
    throw Error("band position out of range");
  if (isEdgeOffset(p.mode)) {
    if (p.offsets[0] < 0 || p.offsets[1] < 0 || p.offsets[2] > 0 || p.offsets[3] > 0)
      throw Error("EO offsets violate the sign convention");
  }
}

int classifySample(const Plane& rec, int x, int y, SaoMode mode) {
  if (mode == SaoMode::Off) return -1;
  if (mode == SaoMode::Bo) return boBand(rec.at(x, y), rec.bitDepth());
  const auto nb = eoNeighborOffsets(mode);
  const int x0 = x + nb[0].dx, y0 = y + nb[0].dy;
  const int x1 = x + nb[1].dx, y1 = y + nb[1].dy;
  if (x0 < 0 || y0 < 0 || x1 < 0 || y1 < 0 || x0 >= rec.width() || x1 >= rec.width() || y0 >= rec.height() ||
      y1 >= rec.height())
    return 0;
  return eoCategory(rec.at(x0, y0), rec.at(x, y), rec.at(x1, y1));
}

namespace {

void checkCongruent(const Plane& orig, const Plane& rec, const Rect& r) {
  if (orig.width() != rec.width() || orig.height() != rec.height()) throw Error("collectStats: shape mismatch");
  if (r.x < 0 || r.y < 0 || r.x + r.w > rec.width() || r.y + r.h > rec.height())
    throw Error("collectStats: region outside plane");
}

std::size_t classCount(SaoMode mode) {
  if (mode == SaoMode::Bo) return kNumBands;
  if (isEdgeOffset(mode)) return kNumCategories;
  return 0;
}

}  // namespace

std::vector<CategoryStats> collectStats(const Plane& orig, const Plane& rec, const Rect& r, SaoMode mode) {
  checkCongruent(orig, rec, r);
  std::vector<CategoryStats> stats(classCount(mode));
  if (stats.empty()) return stats;
  for (int y = r.y; y < r.y + r.h; ++y) {
    for (int x = r.x; x < r.x + r.w; ++x) {
      auto& s = stats[classifySample(rec, x, y, mode)];
      ++s.count;
      s.errSum += static_cast<int>(orig.at(x, y)) - static_cast<int>(rec.at(x, y));
    }
  }
  return stats;
}

int bestOffset(const CategoryStats& stats, int lo, int hi) {
  if (lo > hi) throw Error("bestOffset: empty range");
  if (stats.count == 0) return std::clamp(0, lo, hi);
  int best = 0;
  std::int64_t bestCost = 0;
  bool have = false;
  for (int off = lo; off <= hi; ++off) {
    const std::int64_t cost = deltaDistortion(stats.count, stats.errSum, off);
    const bool better = !have || cost < bestCost ||
                        (cost == bestCost && (std::abs(off) < std::abs(best) ||
                                              (std::abs(off) == std::abs(best) && off < best)));
    if (better) {
      best = off;
      bestCost = cost;
      have = true;
    }
  }
  return best;
}

std::vector<ClassSamples> collectClassSamples(const Plane& orig, const Plane& rec, const Rect& r, SaoMode mode,
                                              int cap) {
  checkCongruent(orig, rec, r);
  std::vector<ClassSamples> classes(classCount(mode));
  if (classes.empty()) return classes;
  const int maxv = rec.maxValue();
  for (int y = r.y; y < r.y + r.h; ++y) {
    for (int x = r.x; x < r.x + r.w; ++x) {
      auto& c = classes[classifySample(rec, x, y, mode)];
      const int o = orig.at(x, y);
      const int p = rec.at(x, y);
      ++c.stats.count;
      c.stats.errSum += o - p;
      if (p < cap || p > maxv - cap) c.nearLimit.emplace_back(static_cast<std::uint16_t>(o), static_cast<std::uint16_t>(p));
    }
  }
  return classes;
}

std::int64_t clippedDeltaDistortion(const ClassSamples& cls, int off, int maxValue) {
  std::int64_t d = deltaDistortion(cls.stats.count, cls.stats.errSum, off);
  for (const auto& [o, p] : cls.nearLimit) {
    const std::int64_t unclipped = static_cast<std::int64_t>(o) - (p + off);
    const std::int64_t clipped = static_cast<std::int64_t>(o) - clipSample(static_cast<std::int64_t>(p) + off, maxValue);
    d += clipped * clipped - unclipped * unclipped;
  }
  return d;
}

namespace {

int filteredSample(const Plane& rec, int x, int y, const ClassicSaoParams& params) {
  const int p = rec.at(x, y);
  int off = 0;
  if (params.mode == SaoMode::Bo) {
    const int k = boBand(p, rec.bitDepth()) - params.bandPos;
    if (k >= 0 && k < kNumOffsets) off = params.offsets[k];
  } else if (params.mode != SaoMode::Off) {
    const int cat = classifySample(rec, x, y, params.mode);
    if (cat > 0) off = params.offsets[cat - 1];
  }
  return clipSample(p + off, rec.maxValue());
}

}  // namespace

std::int64_t filteredSse(const Plane& orig, const Plane& rec, const Rect& r, const ClassicSaoParams& params) {
  checkCongruent(orig, rec, r);
  std::int64_t acc = 0;
  for (int y = r.y; y < r.y + r.h; ++y) {
    for (int x = r.x; x < r.x + r.w; ++x) {
      const std::int64_t d = static_cast<int>(orig.at(x, y)) - filteredSample(rec, x, y, params);
      acc += d * d;
    }
  }
  return acc;
}

void applyClassicSao(const Plane& rec, const Rect& r, const ClassicSaoParams& params, Plane& out) {
  if (out.width() != rec.width() || out.height() != rec.height()) throw Error("applyClassicSao: shape mismatch");
  for (int y = r.y; y < r.y + r.h; ++y)
    for (int x = r.x; x < r.x + r.w; ++x) out.at(x, y) = static_cast<std::uint16_t>(filteredSample(rec, x, y, params));
}

Plane applyClassicSao(const Plane& rec, const ClassicSaoParams& params) {
  Plane out = rec;
  applyClassicSao(rec, rec.bounds(), params, out);
  return out;
}

}  // namespace saocnn
