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

#include "saocnn/sao_cnn.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "saocnn/arith.hpp"

namespace saocnn {

std::string_view toString(SliceMode m) { return m == SliceMode::Intra ? "intra" : "inter"; }
std::string_view toString(SizeClass s) { return s == SizeClass::AB ? "AB" : "CD"; }

void ModelBank::validate() const {
  if (candidateCount < 1) throw Error("model bank: K must be at least 1");
  if (entries.empty()) throw Error("model bank is empty");
  std::set<std::tuple<int, int, int>> seen;
  const int frac = entries.front().luma ? entries.front().luma->fracBits : 0;
  for (const auto& e : entries) {
    if (!seen.emplace(static_cast<int>(e.mode), static_cast<int>(e.sizeClass), e.qp).second)
      throw Error("model bank: duplicate (mode, size class, qp) entry");
    if (!e.luma || !e.chroma) throw Error("model bank: entry without networks");
    if (e.luma->role != Role::Luma || e.chroma->role != Role::Chroma) throw Error("model bank: network role mismatch");
    if (e.luma->fracBits != frac || e.chroma->fracBits != frac)
      throw Error("model bank: networks disagree on activation fraction bits");
  }
}

int ModelBank::fracBits() const {
  if (entries.empty() || !entries.front().luma) throw Error("model bank is empty");
  return entries.front().luma->fracBits;
}

std::vector<std::size_t> selectModels(const ModelBank& bank, SliceMode mode, int lumaWidth, int qp) {
  if (bank.entries.empty()) throw Error("model bank is empty");
  const SizeClass size = bank.sizeClassFor(lumaWidth);
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < bank.entries.size(); ++i)
    if (bank.entries[i].mode == mode && bank.entries[i].sizeClass == size) picked.push_back(i);
  if (picked.empty()) throw Error("empty candidate set");
  std::stable_sort(picked.begin(), picked.end(), [&](std::size_t a, std::size_t b) {
    const int qa = bank.entries[a].qp;
    const int qb = bank.entries[b].qp;
    const int da = std::abs(qa - qp);
    const int db = std::abs(qb - qp);
    return da != db ? da < db : qa < qb;
  });
  if (picked.size() > static_cast<std::size_t>(bank.candidateCount)) picked.resize(bank.candidateCount);
  return picked;
}

bool CnnSaoParams::sameFilter(const CnnSaoParams& o) const {
  if (lumaOn != o.lumaOn || chromaOn != o.chromaOn) return false;
  if (lumaOn && (lumaModels != o.lumaModels || lumaOffsets != o.lumaOffsets)) return false;
  if (chromaOn && (chromaModels != o.chromaModels || chromaOffsetsU != o.chromaOffsetsU ||
                   chromaOffsetsV != o.chromaOffsetsV))
    return false;
  return true;
}

void validate(const CnnSaoParams& p, int lumaModels, int chromaModels, std::size_t candidateCount) {
  auto checkModels = [&](const std::vector<int>& models, int expected) {
    if (models.size() != static_cast<std::size_t>(expected)) throw Error("CNN SAO: wrong number of model indices");
    for (int m : models)
      if (m < 0 || static_cast<std::size_t>(m) >= candidateCount) throw Error("CNN SAO: invalid model index");
  };
  auto checkOffsets = [&](const std::vector<int>& offsets, int expected) {
    if (offsets.size() != static_cast<std::size_t>(expected)) throw Error("CNN SAO: wrong number of offsets");
    for (int o : offsets)
      if (std::abs(o) > kCnnOffsetCap) throw Error("CNN SAO: offset out of range");
  };
  if (p.lumaOn) {
    checkModels(p.lumaModels, lumaModels);
    checkOffsets(p.lumaOffsets, lumaModels);
  }
  if (p.chromaOn) {
    checkModels(p.chromaModels, chromaModels);
    checkOffsets(p.chromaOffsetsU, chromaModels);
    checkOffsets(p.chromaOffsetsV, chromaModels);
  }
}

Array2D<std::int32_t> computeCorrection(std::span<const WeightMap* const> maps, std::span<const int> offsets,
                                        int fracBits) {
  if (maps.size() != offsets.size()) throw Error("computeCorrection: map/offset count mismatch");
  if (maps.empty()) throw Error("computeCorrection: no maps");
  const int w = maps[0]->width();
  const int h = maps[0]->height();
  for (const auto* m : maps)
    if (m->width() != w || m->height() != h) throw Error("computeCorrection: maps not congruent");
  Array2D<std::int32_t> corr(w, h);
  auto out = corr.data();
  const std::int32_t half = fracBits > 0 ? (std::int32_t{1} << (fracBits - 1)) : 0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::int32_t acc = 0;
    for (std::size_t i = 0; i < maps.size(); ++i)
      acc = saturatingAdd(acc, static_cast<std::int32_t>(maps[i]->data()[k]) * offsets[i]);
    out[k] = saturatingAdd(acc, half) >> fracBits;
  }
  return corr;
}

namespace {

WeightMap toWeightMap(const Tensor<std::int16_t>& t, int channel) {
  WeightMap m(t.width, t.height);
  const auto src = t.channel(channel);
  std::copy(src.begin(), src.end(), m.data().begin());
  return m;
}

}  // namespace

WeightMap lumaWeightMap(const Frame& rec, const Rect& ctu, const QuantizedNetwork& net, int threads) {
  if (net.role != Role::Luma) throw Error("lumaWeightMap: not a luma network");
  const std::array<Plane, 1> planes{rec.y.crop(ctu)};
  return toWeightMap(inferInt(net, toFixedInput(planes, net.fracBits), threads), 0);
}

std::array<WeightMap, 2> chromaWeightMaps(const Frame& rec, const Rect& ctu, const QuantizedNetwork& net, int threads) {
  if (net.role != Role::Chroma) throw Error("chromaWeightMaps: not a chroma network");
  const auto planes = upsampleChromaNn(rec, ctu);
  const auto out = inferInt(net, toFixedInput(planes, net.fracBits), threads);
  return {toWeightMap(out, 0), toWeightMap(out, 1)};
}

CtuWeightMaps::CtuWeightMaps(const Frame& rec, const Rect& ctu, const ModelBank& bank,
                             std::span<const std::size_t> candidates, int threads)
    : rec_(rec), ctu_(ctu), bank_(bank), candidates_(candidates.begin(), candidates.end()), threads_(threads) {}

const BankEntry& CtuWeightMaps::entry(int candidate) const {
  if (candidate < 0 || static_cast<std::size_t>(candidate) >= candidates_.size())
    throw Error("CNN SAO: invalid model index");
  return bank_.entries.at(candidates_[candidate]);
}

const WeightMap& CtuWeightMaps::luma(int candidate) {
  auto it = luma_.find(candidate);
  if (it == luma_.end()) it = luma_.emplace(candidate, lumaWeightMap(rec_, ctu_, *entry(candidate).luma, threads_)).first;
  return it->second;
}

const std::array<WeightMap, 2>& CtuWeightMaps::chroma(int candidate) {
  auto it = chroma_.find(candidate);
  if (it == chroma_.end())
    it = chroma_.emplace(candidate, chromaWeightMaps(rec_, ctu_, *entry(candidate).chroma, threads_)).first;
  return it->second;
}

void addLumaCorrection(const Plane& rec, const Rect& ctu, const Array2D<std::int32_t>& corr, Plane& out) {
  if (corr.width() != ctu.w || corr.height() != ctu.h) throw Error("luma correction does not match the CTU");
  const int maxv = rec.maxValue();
  for (int y = 0; y < ctu.h; ++y)
    for (int x = 0; x < ctu.w; ++x)
      out.at(ctu.x + x, ctu.y + y) =
          static_cast<std::uint16_t>(clipSample(static_cast<std::int64_t>(rec.at(ctu.x + x, ctu.y + y)) + corr.at(x, y), maxv));
}

void addChromaCorrection(const Plane& rec, const Rect& lumaCtu, const Array2D<std::int32_t>& corr, Plane& out) {
  if (corr.width() != lumaCtu.w || corr.height() != lumaCtu.h) throw Error("chroma correction does not match the CTU");
  const auto small = downsampleMean(corr);
  const Rect c = chromaRect(lumaCtu);
  addLumaCorrection(rec, c, small, out);
}

Array2D<std::int32_t> lumaCorrection(const CnnSaoParams& params, CtuWeightMaps& maps) {
  std::vector<const WeightMap*> ptrs;
  for (int m : params.lumaModels) ptrs.push_back(&maps.luma(m));
  return computeCorrection(ptrs, params.lumaOffsets, maps.fracBits());
}

Array2D<std::int32_t> chromaCorrection(const CnnSaoParams& params, CtuWeightMaps& maps, int plane) {
  std::vector<const WeightMap*> ptrs;
  for (int m : params.chromaModels) ptrs.push_back(&maps.chroma(m)[plane]);
  return computeCorrection(ptrs, plane == 0 ? params.chromaOffsetsU : params.chromaOffsetsV, maps.fracBits());
}

void applyCnnSao(const Frame& rec, const CnnSaoParams& params, CtuWeightMaps& maps, Frame& out) {
  const Rect& ctu = maps.ctu();
  if (params.lumaOn) {
    addLumaCorrection(rec.y, ctu, lumaCorrection(params, maps), out.y);
  } else {
    out.y.paste(rec.y.crop(ctu), ctu.x, ctu.y);
  }
  const Rect c = chromaRect(ctu);
  if (params.chromaOn) {
    addChromaCorrection(rec.u, ctu, chromaCorrection(params, maps, 0), out.u);
    addChromaCorrection(rec.v, ctu, chromaCorrection(params, maps, 1), out.v);
  } else {
    out.u.paste(rec.u.crop(c), c.x, c.y);
    out.v.paste(rec.v.crop(c), c.x, c.y);
  }
}

void applyCnnSao(const Frame& rec, const Rect& ctu, const CnnSaoParams& params, const ModelBank& bank,
                 std::span<const std::size_t> candidates, Frame& out, int threads) {
  CtuWeightMaps maps(rec, ctu, bank, candidates, threads);
  applyCnnSao(rec, params, maps, out);
}

}  // namespace saocnn
