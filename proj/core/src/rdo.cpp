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

#include "saocnn/rdo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "saocnn/arith.hpp"
#include "saocnn/bitstream.hpp"
#include "saocnn/parallel.hpp"

namespace saocnn {

double lambdaFromQp(int qp) {
  if (qp < 0 || qp > 63) throw Error("qp out of range [0, 63]");
  return 0.85 * std::pow(2.0, (qp - 12) / 3.0);
}

Lambda::Lambda(double value) : value_(value) {
  if (!std::isfinite(value) || value < 0.0 || value > kMax) throw Error("lambda out of range");
  fixed_ = std::llround(std::ldexp(value, kFracBits));
}

RdCost RdCost::make(std::int64_t d, std::int64_t r, const Lambda& lambda) {
  RdCost c;
  c.d = d;
  c.r = r;
  c.j = static_cast<double>(d) + lambda.value() * static_cast<double>(r);
  c.key = (d << Lambda::kFracBits) + lambda.fixed() * r;
  return c;
}

std::string_view toString(CtuChoice c) {
  switch (c) {
    case CtuChoice::Off: return "OFF";
    case CtuChoice::MergeLeft: return "MERGE_LEFT";
    case CtuChoice::MergeUp: return "MERGE_UP";
    case CtuChoice::Explicit: return "EXPLICIT";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Least squares

std::vector<double> solveNormalEquations(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  if (a.size() != n) throw Error("solveNormalEquations: dimension mismatch");
  double maxAbs = 0.0;
  for (const auto& row : a) {
    if (row.size() != n) throw Error("solveNormalEquations: matrix not square");
    for (double v : row) maxAbs = std::max(maxAbs, std::abs(v));
  }
  std::vector<double> x(n, 0.0);
  if (maxAbs == 0.0) return x;
  const double tol = 1e-9 * maxAbs;

  std::vector<std::ptrdiff_t> pivotRow(n, -1);
  std::size_t r = 0;
  for (std::size_t k = 0; k < n && r < n; ++k) {
    std::size_t p = r;
    for (std::size_t i = r + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    if (std::abs(a[p][k]) < tol) continue;  // x_k fixed to 0
    std::swap(a[p], a[r]);
    std::swap(b[p], b[r]);
    for (std::size_t i = r + 1; i < n; ++i) {
      const double f = a[i][k] / a[r][k];
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[r][j];
      b[i] -= f * b[r];
    }
    pivotRow[k] = static_cast<std::ptrdiff_t>(r);
    ++r;
  }
  for (std::size_t kk = n; kk-- > 0;) {
    if (pivotRow[kk] < 0) continue;
    const auto row = static_cast<std::size_t>(pivotRow[kk]);
    double s = b[row];
    for (std::size_t j = kk + 1; j < n; ++j) s -= a[row][j] * x[j];
    x[kk] = s / a[row][kk];
  }
  return x;
}

namespace {

/// Normal equations from integer maps: A_ij = sum w_i w_j / 2^2F, b_i = sum w_i e / 2^F.
std::vector<double> lsFromIntegerSums(std::span<const WeightMap* const> maps, std::span<const std::int32_t> err,
                                      int fracBits) {
  const std::size_t m = maps.size();
  std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
  std::vector<double> b(m, 0.0);
  const double s1 = std::ldexp(1.0, -fracBits);
  const double s2 = std::ldexp(1.0, -2 * fracBits);
  for (std::size_t i = 0; i < m; ++i) {
    const auto wi = maps[i]->data();
    std::int64_t bi = 0;
    for (std::size_t k = 0; k < err.size(); ++k) bi += static_cast<std::int64_t>(wi[k]) * err[k];
    b[i] = static_cast<double>(bi) * s1;
    for (std::size_t j = i; j < m; ++j) {
      const auto wj = maps[j]->data();
      std::int64_t aij = 0;
      for (std::size_t k = 0; k < err.size(); ++k) aij += static_cast<std::int64_t>(wi[k]) * wj[k];
      a[i][j] = a[j][i] = static_cast<double>(aij) * s2;
    }
  }
  return solveNormalEquations(std::move(a), std::move(b));
}

}  // namespace

std::vector<double> lsOffsets(std::span<const WeightMap* const> maps, const Array2D<std::int32_t>& err, int fracBits) {
  for (const auto* m : maps)
    if (m->width() != err.width() || m->height() != err.height()) throw Error("lsOffsets: maps not congruent with err");
  return lsFromIntegerSums(maps, err.data(), fracBits);
}

// ---------------------------------------------------------------------------
// Offset search

OffsetSearchResult searchOffsets(std::span<const double> start, int cap, const OffsetCostFn& costFn) {
  const std::size_t m = start.size();
  std::map<std::vector<int>, RdCost> seen;
  OffsetSearchResult best;
  bool have = false;
  auto eval = [&](std::vector<int> v) -> RdCost {
    for (int& o : v) o = std::clamp(o, -cap, cap);
    if (auto it = seen.find(v); it != seen.end()) return it->second;
    const RdCost c = costFn(v);
    seen.emplace(v, c);
    if (!have || c < best.cost) {
      best.offsets = v;
      best.cost = c;
      have = true;
    }
    return c;
  };

  eval(std::vector<int>(m, 0));
  std::vector<int> center(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double s = std::isfinite(start[i]) ? std::clamp(start[i], -1e6, 1e6) : 0.0;
    center[i] = std::clamp(static_cast<int>(std::lround(s)), -cap, cap);
  }

  if (m <= 3) {
    static constexpr int kDeltas[3] = {0, -1, 1};
    std::size_t total = 1;
    for (std::size_t i = 0; i < m; ++i) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      std::vector<int> v = center;
      std::size_t rest = code;
      for (std::size_t i = m; i-- > 0;) {
        v[i] += kDeltas[rest % 3];
        rest /= 3;
      }
      eval(std::move(v));
    }
    return best;
  }

  std::vector<int> cur = center;
  RdCost curCost = eval(cur);
  for (int round = 0; round < 64; ++round) {
    bool improved = false;
    for (std::size_t i = 0; i < m; ++i) {
      for (int d : {-1, 1}) {
        std::vector<int> trial = cur;
        trial[i] = std::clamp(trial[i] + d, -cap, cap);
        const RdCost c = eval(trial);
        if (c < curCost) {
          cur = std::move(trial);
          curCost = c;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  return best;
}

namespace {

std::int64_t correctedSse(const Plane& orig, const Plane& rec, const Rect& region, const Array2D<std::int32_t>& corr) {
  const int maxv = rec.maxValue();
  std::int64_t acc = 0;
  for (int y = 0; y < region.h; ++y) {
    for (int x = 0; x < region.w; ++x) {
      const int r = rec.at(region.x + x, region.y + y);
      const std::int64_t d =
          static_cast<std::int64_t>(orig.at(region.x + x, region.y + y)) - clipSample(static_cast<std::int64_t>(r) + corr.at(x, y), maxv);
      acc += d * d;
    }
  }
  return acc;
}

Array2D<std::int32_t> regionError(const Plane& orig, const Plane& rec, const Rect& region) {
  Array2D<std::int32_t> err(region.w, region.h);
  for (int y = 0; y < region.h; ++y)
    for (int x = 0; x < region.w; ++x)
      err.at(x, y) = static_cast<std::int32_t>(orig.at(region.x + x, region.y + y)) - rec.at(region.x + x, region.y + y);
  return err;
}

/// Chroma search: maps at luma resolution, distortion measured after the 2x2 mean.
OffsetSearchResult searchChromaOffsets(std::span<const WeightMap* const> maps, const Plane& orig, const Plane& rec,
                                       const Rect& lumaCtu, int fracBits, const Lambda& lambda, const RateFn& rate) {
  const Rect cr = chromaRect(lumaCtu);
  const auto err = regionError(orig, rec, cr);
  // Least squares on the real-valued 2x2 means of each map.
  const std::size_t m = maps.size();
  std::vector<std::vector<double>> down(m, std::vector<double>(static_cast<std::size_t>(cr.w) * cr.h, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    const auto& w = *maps[i];
    for (int y = 0; y < cr.h; ++y) {
      for (int x = 0; x < cr.w; ++x) {
        double sum = 0.0;
        int n = 0;
        for (int dy = 0; dy < 2 && 2 * y + dy < w.height(); ++dy)
          for (int dx = 0; dx < 2 && 2 * x + dx < w.width(); ++dx, ++n) sum += w.at(2 * x + dx, 2 * y + dy);
        down[i][static_cast<std::size_t>(y) * cr.w + x] = std::ldexp(sum / n, -fracBits);
      }
    }
  }
  std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
  std::vector<double> b(m, 0.0);
  const auto e = err.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < e.size(); ++k) b[i] += down[i][k] * e[k];
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < e.size(); ++k) a[i][j] += down[i][k] * down[j][k];
  }
  const auto start = solveNormalEquations(std::move(a), std::move(b));
  return searchOffsets(start, kCnnOffsetCap, [&](std::span<const int> offs) {
    const auto corr = downsampleMean(computeCorrection(maps, offs, fracBits));
    return RdCost::make(correctedSse(orig, rec, cr, corr), rate(offs), lambda);
  });
}

}  // namespace

OffsetSearchResult searchCnnOffsets(std::span<const WeightMap* const> maps, const Plane& orig, const Plane& rec,
                                    const Rect& region, int fracBits, const Lambda& lambda, const RateFn& rate) {
  const auto err = regionError(orig, rec, region);
  const auto start = lsOffsets(maps, err, fracBits);
  return searchOffsets(start, kCnnOffsetCap, [&](std::span<const int> offs) {
    const auto corr = computeCorrection(maps, offs, fracBits);
    return RdCost::make(correctedSse(orig, rec, region, corr), rate(offs), lambda);
  });
}

// ---------------------------------------------------------------------------
// Classic component search

namespace {

struct ClassPick {
  int offset = 0;
  std::int64_t key = 0;
};

/// Offset in [lo, hi] minimising exact dD * 2^16 + lambda * bits; ties to smaller |off|, then smaller off.
ClassPick pickClassOffset(const ClassSamples& cls, int lo, int hi, int maxValue, std::int64_t lambdaFixed,
                          bool signBit) {
  ClassPick best;
  bool have = false;
  for (int off = lo; off <= hi; ++off) {
    const std::int64_t bits = ueLength(static_cast<std::uint32_t>(std::abs(off))) + (signBit && off != 0 ? 1 : 0);
    const std::int64_t key = (clippedDeltaDistortion(cls, off, maxValue) << Lambda::kFracBits) + lambdaFixed * bits;
    const bool better = !have || key < best.key ||
                        (key == best.key && (std::abs(off) < std::abs(best.offset) ||
                                             (std::abs(off) == std::abs(best.offset) && off < best.offset)));
    if (better) {
      best = {off, key};
      have = true;
    }
  }
  return best;
}

ClassicComponentChoice finishChoice(const ClassicSaoParams& params, std::int64_t deltaD, int component,
                                    const Lambda& lambda) {
  ClassicComponentChoice c;
  c.params = params;
  c.deltaD = deltaD;
  c.bits = static_cast<std::int64_t>(classicComponentBits(params, component));
  c.key = (deltaD << Lambda::kFracBits) + lambda.fixed() * c.bits;
  return c;
}

}  // namespace

ClassicComponentChoice bestClassicComponent(const Plane& orig, const Plane& rec, const Rect& region, int component,
                                            const Lambda& lambda, std::optional<SaoMode> forcedMode) {
  const int cap = offsetCap(rec.bitDepth());
  const int maxv = rec.maxValue();
  const std::int64_t lf = lambda.fixed();

  std::vector<SaoMode> modes;
  if (forcedMode) {
    modes.push_back(*forcedMode);
  } else {
    modes = {SaoMode::Off, SaoMode::Eo0, SaoMode::Eo90, SaoMode::Eo135, SaoMode::Eo45, SaoMode::Bo};
  }

  ClassicComponentChoice best;
  bool have = false;
  auto consider = [&](const ClassicComponentChoice& c) {
    if (!have || c.key < best.key) {
      best = c;
      have = true;
    }
  };

  for (SaoMode mode : modes) {
    ClassicSaoParams params;
    params.mode = mode;
    if (mode == SaoMode::Off) {
      consider(finishChoice(params, 0, component, lambda));
      continue;
    }
    const auto classes = collectClassSamples(orig, rec, region, mode, cap);
    std::int64_t deltaD = 0;
    if (isEdgeOffset(mode)) {
      for (int cat = 1; cat <= kNumOffsets; ++cat) {
        const bool positive = cat <= 2;
        const auto pick = pickClassOffset(classes[cat], positive ? 0 : -cap, positive ? cap : 0, maxv, lf, false);
        params.offsets[cat - 1] = pick.offset;
        deltaD += clippedDeltaDistortion(classes[cat], pick.offset, maxv);
      }
    } else {
      std::array<ClassPick, kNumBands> picks;
      for (int b = 0; b < kNumBands; ++b) picks[b] = pickClassOffset(classes[b], -cap, cap, maxv, lf, true);
      int bestPos = 0;
      std::int64_t bestSum = 0;
      for (int pos = 0; pos <= kMaxBandPosition; ++pos) {
        std::int64_t sum = 0;
        for (int k = 0; k < kNumOffsets; ++k) sum += picks[pos + k].key;
        if (pos == 0 || sum < bestSum) {
          bestPos = pos;
          bestSum = sum;
        }
      }
      params.bandPos = bestPos;
      for (int k = 0; k < kNumOffsets; ++k) {
        params.offsets[k] = picks[bestPos + k].offset;
        deltaD += clippedDeltaDistortion(classes[bestPos + k], params.offsets[k], maxv);
      }
    }
    consider(finishChoice(params, deltaD, component, lambda));
  }
  return best;
}

// ---------------------------------------------------------------------------
// CTU decisions

std::int64_t ctuSse(const Frame& a, const Frame& b, const Rect& ctu) {
  const Rect cr = chromaRect(ctu);
  return sse(a.y, b.y, ctu) + sse(a.u, b.u, cr) + sse(a.v, b.v, cr);
}

namespace {

std::int64_t classicCtuSse(const Frame& orig, const Frame& rec, const Rect& ctu, const ClassicCtuParams& p) {
  const Rect cr = chromaRect(ctu);
  return filteredSse(orig.y, rec.y, ctu, p.comp[0]) + filteredSse(orig.u, rec.u, cr, p.comp[1]) +
         filteredSse(orig.v, rec.v, cr, p.comp[2]);
}

std::int64_t cnnCtuSse(const Frame& orig, const Frame& rec, CtuWeightMaps& maps, const CnnSaoParams& p) {
  const Rect& ctu = maps.ctu();
  const Rect cr = chromaRect(ctu);
  std::int64_t d = p.lumaOn ? correctedSse(orig.y, rec.y, ctu, lumaCorrection(p, maps)) : sse(orig.y, rec.y, ctu);
  if (p.chromaOn) {
    d += correctedSse(orig.u, rec.u, cr, downsampleMean(chromaCorrection(p, maps, 0)));
    d += correctedSse(orig.v, rec.v, cr, downsampleMean(chromaCorrection(p, maps, 1)));
  } else {
    d += sse(orig.u, rec.u, cr) + sse(orig.v, rec.v, cr);
  }
  return d;
}

template <typename Decision, typename Params, typename CostFn>
void considerMerges(Decision& best, const Params* left, const Params* up, CostFn&& cost) {
  auto tryMerge = [&](const Params* n, Merge merge, CtuChoice choice) {
    if (!n) return;
    Params p = *n;
    p.merge = merge;
    const RdCost c = cost(p);
    if (c < best.cost) {
      best.params = std::move(p);
      best.cost = c;
      best.choice = choice;
    }
  };
  tryMerge(left, Merge::Left, CtuChoice::MergeLeft);
  tryMerge(up, Merge::Up, CtuChoice::MergeUp);
}

}  // namespace

ClassicCtuDecision rdoCtuClassic(const Frame& orig, const Frame& rec, const Rect& ctu, const ClassicCtuParams* left,
                                 const ClassicCtuParams* up, const Lambda& lambda, bool forceOff) {
  const int bd = rec.bitDepth();
  auto cost = [&](const ClassicCtuParams& p) {
    return RdCost::make(classicCtuSse(orig, rec, ctu, p),
                        static_cast<std::int64_t>(classicCtuBits(p, left, up, bd)), lambda);
  };

  ClassicCtuDecision best;
  best.cost = RdCost::make(ctuSse(orig, rec, ctu), static_cast<std::int64_t>(classicCtuBits(best.params, left, up, bd)), lambda);
  best.offCost = best.cost;
  if (forceOff) return best;

  considerMerges(best, left, up, cost);

  ClassicCtuParams explicitParams;
  explicitParams.comp[0] = bestClassicComponent(orig.y, rec.y, ctu, 0, lambda).params;
  const Rect cr = chromaRect(ctu);
  std::int64_t bestChromaKey = 0;
  bool haveChroma = false;
  for (SaoMode m : {SaoMode::Off, SaoMode::Eo0, SaoMode::Eo90, SaoMode::Eo135, SaoMode::Eo45, SaoMode::Bo}) {
    const auto u = bestClassicComponent(orig.u, rec.u, cr, 1, lambda, m);
    const auto v = bestClassicComponent(orig.v, rec.v, cr, 2, lambda, m);
    const std::int64_t key = u.key + v.key;
    if (!haveChroma || key < bestChromaKey) {
      bestChromaKey = key;
      explicitParams.comp[1] = u.params;
      explicitParams.comp[2] = v.params;
      haveChroma = true;
    }
  }
  const RdCost c = cost(explicitParams);
  if (c < best.cost) {
    best.params = explicitParams;
    best.cost = c;
    best.choice = CtuChoice::Explicit;
  }
  return best;
}

namespace {

std::vector<std::vector<int>> allTuples(const std::vector<int>& values, int length) {
  std::vector<std::vector<int>> out{{}};
  for (int pos = 0; pos < length; ++pos) {
    std::vector<std::vector<int>> next;
    next.reserve(out.size() * values.size());
    for (const auto& prefix : out) {
      for (int v : values) {
        auto t = prefix;
        t.push_back(v);
        next.push_back(std::move(t));
      }
    }
    out = std::move(next);
  }
  return out;
}

/// Candidate model tuples: every K^M tuple when small enough, else tuples over the
/// best-ranked single models.
template <typename SingleCost>
std::vector<std::vector<int>> candidateTuples(int candidateCount, int length, const EncoderConfig& cfg,
                                              SingleCost&& singleCost) {
  std::vector<int> all(static_cast<std::size_t>(candidateCount));
  for (int k = 0; k < candidateCount; ++k) all[k] = k;
  double count = std::pow(static_cast<double>(candidateCount), length);
  if (count <= cfg.tupleLimit) return allTuples(all, length);
  std::vector<std::pair<std::int64_t, int>> ranked;
  for (int k = 0; k < candidateCount; ++k) ranked.emplace_back(singleCost(k), k);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  const int keep = std::min(cfg.topSingles, candidateCount);
  std::vector<int> top;
  for (int i = 0; i < keep; ++i) top.push_back(ranked[i].second);
  return allTuples(top, length);
}

}  // namespace

CnnCtuDecision rdoCtuCnn(const Frame& orig, const Frame& rec, CtuWeightMaps& maps, const CnnSaoParams* left,
                         const CnnSaoParams* up, const Lambda& lambda, const PictureHeader& header,
                         const EncoderConfig& config) {
  const Rect& ctu = maps.ctu();
  const Rect cr = chromaRect(ctu);
  const int frac = maps.fracBits();
  const int candidates = static_cast<int>(maps.candidateCount());
  const int m = header.lumaModels;
  const int mc = header.chromaModels;

  auto bits = [&](const CnnSaoParams& p) { return static_cast<std::int64_t>(cnnCtuBits(p, left, up, header)); };
  auto cost = [&](const CnnSaoParams& p) { return RdCost::make(cnnCtuSse(orig, rec, maps, p), bits(p), lambda); };

  CnnCtuDecision best;
  best.cost = RdCost::make(ctuSse(orig, rec, ctu), bits(best.params), lambda);
  best.offCost = best.cost;
  if (config.forceOff || candidates == 0) return best;

  considerMerges(best, left, up, cost);

  // Luma part, chroma off.
  struct LumaResult {
    std::vector<int> offsets;
    RdCost cost;
  };
  auto evalLuma = [&](const std::vector<int>& tuple) {
    std::vector<const WeightMap*> ptrs;
    for (int k : tuple) ptrs.push_back(&maps.luma(k));
    CnnSaoParams p;
    p.lumaOn = true;
    p.lumaModels = tuple;
    auto rate = [&](std::span<const int> offs) {
      p.lumaOffsets.assign(offs.begin(), offs.end());
      return bits(p);
    };
    const auto r = searchCnnOffsets(ptrs, orig.y, rec.y, ctu, frac, lambda, rate);
    return LumaResult{r.offsets, r.cost};
  };

  CnnSaoParams lumaBest;
  RdCost lumaBestCost = RdCost::make(sse(orig.y, rec.y, ctu), bits(CnnSaoParams{}), lambda);
  const auto lumaTuples = candidateTuples(candidates, m, config, [&](int k) {
    return evalLuma(std::vector<int>(static_cast<std::size_t>(m), k)).cost.key;
  });
  for (const auto& tuple : lumaTuples) {
    const auto r = evalLuma(tuple);
    if (r.cost < lumaBestCost) {
      lumaBestCost = r.cost;
      lumaBest.lumaOn = true;
      lumaBest.lumaModels = tuple;
      lumaBest.lumaOffsets = r.offsets;
    }
  }

  // Chroma part, luma off. U and V are separable in both D and R.
  struct ChromaResult {
    std::vector<int> u;
    std::vector<int> v;
    RdCost cost;
  };
  auto evalChroma = [&](const std::vector<int>& tuple) {
    std::array<std::vector<const WeightMap*>, 2> ptrs;
    for (int k : tuple) {
      const auto& pair = maps.chroma(k);
      ptrs[0].push_back(&pair[0]);
      ptrs[1].push_back(&pair[1]);
    }
    CnnSaoParams p;
    p.chromaOn = true;
    p.chromaModels = tuple;
    for (int i = 0; i < mc; ++i) {
      p.chromaOffsetsU.push_back(predictCnnOffset(left, up, 1, i));
      p.chromaOffsetsV.push_back(predictCnnOffset(left, up, 2, i));
    }
    const auto su = searchChromaOffsets(ptrs[0], orig.u, rec.u, ctu, frac, lambda, [&](std::span<const int> offs) {
      CnnSaoParams q = p;
      q.chromaOffsetsU.assign(offs.begin(), offs.end());
      return bits(q);
    });
    const auto sv = searchChromaOffsets(ptrs[1], orig.v, rec.v, ctu, frac, lambda, [&](std::span<const int> offs) {
      CnnSaoParams q = p;
      q.chromaOffsetsV.assign(offs.begin(), offs.end());
      return bits(q);
    });
    p.chromaOffsetsU = su.offsets;
    p.chromaOffsetsV = sv.offsets;
    return ChromaResult{su.offsets, sv.offsets, RdCost::make(su.cost.d + sv.cost.d, bits(p), lambda)};
  };

  CnnSaoParams chromaBest;
  RdCost chromaBestCost =
      RdCost::make(sse(orig.u, rec.u, cr) + sse(orig.v, rec.v, cr), bits(CnnSaoParams{}), lambda);
  const auto chromaTuples = candidateTuples(candidates, mc, config, [&](int k) {
    return evalChroma(std::vector<int>(static_cast<std::size_t>(mc), k)).cost.key;
  });
  for (const auto& tuple : chromaTuples) {
    const auto r = evalChroma(tuple);
    if (r.cost < chromaBestCost) {
      chromaBestCost = r.cost;
      chromaBest.chromaOn = true;
      chromaBest.chromaModels = tuple;
      chromaBest.chromaOffsetsU = r.u;
      chromaBest.chromaOffsetsV = r.v;
    }
  }

  CnnSaoParams explicitParams = lumaBest;
  explicitParams.chromaOn = chromaBest.chromaOn;
  explicitParams.chromaModels = chromaBest.chromaModels;
  explicitParams.chromaOffsetsU = chromaBest.chromaOffsetsU;
  explicitParams.chromaOffsetsV = chromaBest.chromaOffsetsV;
  const RdCost c = cost(explicitParams);
  if (c < best.cost) {
    best.params = std::move(explicitParams);
    best.cost = c;
    best.choice = CtuChoice::Explicit;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Pictures

namespace {

void checkCongruentFrames(const Frame& a, const Frame& b) {
  if (a.width() != b.width() || a.height() != b.height() || a.bitDepth() != b.bitDepth())
    throw Error("frames are not congruent");
}

std::array<std::string, 2> modeLabels(const ClassicCtuParams& p, CtuChoice choice) {
  if (choice == CtuChoice::MergeLeft || choice == CtuChoice::MergeUp)
    return {std::string(toString(choice)), std::string(toString(choice))};
  return {std::string(toString(p.comp[0].mode)), std::string(toString(p.comp[1].mode))};
}

std::array<std::string, 2> modeLabels(const CnnSaoParams& p, CtuChoice choice) {
  if (choice == CtuChoice::MergeLeft || choice == CtuChoice::MergeUp)
    return {std::string(toString(choice)), std::string(toString(choice))};
  return {p.lumaOn ? "CNN" : "OFF", p.chromaOn ? "CNN" : "OFF"};
}

void applyClassicCtu(const Frame& rec, const Rect& ctu, const ClassicCtuParams& p, Frame& out) {
  const Rect cr = chromaRect(ctu);
  applyClassicSao(rec.y, ctu, p.comp[0], out.y);
  applyClassicSao(rec.u, cr, p.comp[1], out.u);
  applyClassicSao(rec.v, cr, p.comp[2], out.v);
}

PictureHeader makeHeader(const Frame& rec, const ModelBank* bank, const EncoderConfig& cfg) {
  PictureHeader h;
  h.width = rec.width();
  h.height = rec.height();
  h.bitDepth = rec.bitDepth();
  h.ctuSize = cfg.ctuSize;
  h.family = cfg.family;
  h.candidateCount = cfg.family == FilterFamily::Cnn ? bank->candidateCount : 1;
  h.lumaModels = cfg.lumaModels;
  h.chromaModels = cfg.chromaModels;
  h.sliceMode = cfg.sliceMode;
  h.qp = cfg.qp;
  return h;
}

}  // namespace

EncodeResult rdoPicture(const Frame& orig, const Frame& rec, const ModelBank* bank, const EncoderConfig& cfg) {
  checkCongruentFrames(orig, rec);
  if (cfg.lumaModels < 1 || cfg.chromaModels < 1) throw Error("M must be at least 1");
  if (cfg.family == FilterFamily::Cnn) {
    if (!bank) throw Error("CNN mode requires a model bank");
    bank->validate();
  }
  const Lambda lambda = cfg.effectiveLambda();
  EncodeResult result;
  result.params.header = makeHeader(rec, bank, cfg);
  const auto& header = result.params.header;
  const auto grid = ctuPartition(rec.width(), rec.height(), cfg.ctuSize);
  result.filtered = rec;
  auto& report = result.report;
  report.lambda = lambda.value();

  std::vector<std::size_t> candidates;
  if (cfg.family == FilterFamily::Cnn) {
    candidates = selectModels(*bank, cfg.sliceMode, rec.width(), cfg.qp);
    result.params.cnn.reserve(grid.count());
  } else {
    result.params.classic.reserve(grid.count());
  }

  for (std::size_t i = 0; i < grid.count(); ++i) {
    const Rect& ctu = grid.rects[i];
    const bool hasLeft = i % grid.columns != 0;
    const bool hasUp = i >= static_cast<std::size_t>(grid.columns);
    CtuReport line;
    line.index = i;
    line.rect = ctu;
    if (cfg.family == FilterFamily::Cnn) {
      auto& decided = result.params.cnn;
      CtuWeightMaps maps(rec, ctu, *bank, candidates, cfg.threads);
      auto d = rdoCtuCnn(orig, rec, maps, hasLeft ? &decided[i - 1] : nullptr,
                         hasUp ? &decided[i - grid.columns] : nullptr, lambda, header, cfg);
      applyCnnSao(rec, d.params, maps, result.filtered);
      line.choice = d.choice;
      line.modes = modeLabels(d.params, d.choice);
      line.cost = d.cost;
      line.offCost = d.offCost;
      decided.push_back(std::move(d.params));
    } else {
      auto& decided = result.params.classic;
      auto d = rdoCtuClassic(orig, rec, ctu, hasLeft ? &decided[i - 1] : nullptr,
                             hasUp ? &decided[i - grid.columns] : nullptr, lambda, cfg.forceOff);
      applyClassicCtu(rec, ctu, d.params, result.filtered);
      line.choice = d.choice;
      line.modes = modeLabels(d.params, d.choice);
      line.cost = d.cost;
      line.offCost = d.offCost;
      decided.push_back(std::move(d.params));
    }
    report.totalD += line.cost.d;
    report.totalR += line.cost.r;
    ++report.modeHistogram[0][line.modes[0]];
    ++report.modeHistogram[1][line.modes[1]];
    report.ctus.push_back(std::move(line));
  }
  report.totalJ = static_cast<double>(report.totalD) + lambda.value() * static_cast<double>(report.totalR);

  result.stream = writePicture(result.params);
  report.streamBits = result.stream.size() * 8;
  for (int c = 0; c < 3; ++c) {
    const auto comp = static_cast<Component>(c);
    report.psnrBefore[c] = psnr(orig.plane(comp), rec.plane(comp));
    report.psnrAfter[c] = psnr(orig.plane(comp), result.filtered.plane(comp));
  }
  return result;
}

Frame applyPicture(const Frame& rec, const PictureParams& params, const ModelBank* bank, int threads) {
  const auto& h = params.header;
  if (h.width != rec.width() || h.height != rec.height() || h.bitDepth != rec.bitDepth())
    throw Error("picture parameters do not match the reconstruction");
  const auto grid = ctuPartition(h.width, h.height, h.ctuSize);
  Frame out = rec;
  if (h.family == FilterFamily::Cnn) {
    if (!bank) throw Error("CNN stream requires a model bank");
    bank->validate();
    if (bank->candidateCount != h.candidateCount) throw Error("model bank K does not match the stream");
    if (params.cnn.size() != grid.count()) throw Error("CTU count mismatch");
    const auto candidates = selectModels(*bank, h.sliceMode, h.width, h.qp);
    parallelFor(grid.count(), threads, [&](std::size_t i) {
      const auto& p = params.cnn[i];
      validate(p, h.lumaModels, h.chromaModels, candidates.size());
      CtuWeightMaps maps(rec, grid.rects[i], *bank, candidates);
      applyCnnSao(rec, p, maps, out);
    });
  } else {
    if (params.classic.size() != grid.count()) throw Error("CTU count mismatch");
    parallelFor(grid.count(), threads, [&](std::size_t i) {
      validate(params.classic[i], h.bitDepth);
      applyClassicCtu(rec, grid.rects[i], params.classic[i], out);
    });
  }
  return out;
}

}  // namespace saocnn
