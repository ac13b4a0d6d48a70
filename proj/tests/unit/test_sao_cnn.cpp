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

#include <random>

#include "saocnn/harness.hpp"
#include "saocnn/sao_cnn.hpp"
#include "test_support.hpp"

namespace saocnn {
namespace {

using testing::randomFrame;

ModelBank constantBank(int value = 1) {
  ModelBank bank;
  bank.candidateCount = 1;
  bank.entries.push_back({SliceMode::Intra, SizeClass::CD, 32,
                          std::make_shared<const QuantizedNetwork>(quantize(constantNetwork(Arch::V2, Role::Luma, value))),
                          std::make_shared<const QuantizedNetwork>(quantize(constantNetwork(Arch::V2, Role::Chroma, value)))});
  return bank;
}

TEST(SelectModels, Examples) {
  auto bank = fixtureBank(Arch::V2, 1);
  auto picked = selectModels(bank, SliceMode::Inter, 1920, 27);
  ASSERT_EQ(picked.size(), 1u);
  EXPECT_EQ(bank.entries[picked[0]].mode, SliceMode::Inter);
  EXPECT_EQ(bank.entries[picked[0]].sizeClass, SizeClass::AB);
  EXPECT_EQ(bank.entries[picked[0]].qp, 27);

  bank.candidateCount = 2;
  picked = selectModels(bank, SliceMode::Intra, 832, 30);
  ASSERT_EQ(picked.size(), 2u);
  EXPECT_EQ(bank.entries[picked[0]].sizeClass, SizeClass::CD);
  EXPECT_EQ(bank.entries[picked[0]].qp, 32);
  EXPECT_EQ(bank.entries[picked[1]].qp, 27);

  picked = selectModels(bank, SliceMode::Intra, 832, 24);
  EXPECT_EQ(bank.entries[picked[0]].qp, 22);
  EXPECT_EQ(bank.entries[picked[1]].qp, 27);

  bank.candidateCount = 8;
  EXPECT_EQ(selectModels(bank, SliceMode::Intra, 832, 24).size(), 4u);
}

TEST(SelectModels, EmptyCandidateSetThrows) {
  auto bank = constantBank();
  EXPECT_THROW(selectModels(bank, SliceMode::Inter, 832, 32), Error);
  EXPECT_THROW(selectModels(bank, SliceMode::Intra, 3840, 32), Error);
  EXPECT_THROW(selectModels(ModelBank{}, SliceMode::Intra, 832, 32), Error);
}

TEST(ModelBankValidate, RejectsBadBanks) {
  auto bank = fixtureBank(Arch::V1);
  EXPECT_NO_THROW(bank.validate());
  auto dup = bank;
  dup.entries.push_back(dup.entries.front());
  EXPECT_THROW(dup.validate(), Error);
  auto noK = bank;
  noK.candidateCount = 0;
  EXPECT_THROW(noK.validate(), Error);
  auto swapped = bank;
  std::swap(swapped.entries[0].luma, swapped.entries[0].chroma);
  EXPECT_THROW(swapped.validate(), Error);
  auto frac = bank;
  frac.entries[1].luma = std::make_shared<const QuantizedNetwork>(quantize(passThroughNetwork(Arch::V1, Role::Luma), 8));
  EXPECT_THROW(frac.validate(), Error);
  EXPECT_THROW(ModelBank{}.validate(), Error);
}

TEST(CnnParams, ValidateAndSameFilter) {
  CnnSaoParams p;
  EXPECT_NO_THROW(validate(p, 2, 1, 2));
  p.lumaOn = true;
  p.lumaModels = {0, 1};
  p.lumaOffsets = {3, -31};
  EXPECT_NO_THROW(validate(p, 2, 1, 2));
  EXPECT_THROW(validate(p, 1, 1, 2), Error);
  EXPECT_THROW(validate(p, 2, 1, 1), Error);
  p.lumaOffsets[1] = 32;
  EXPECT_THROW(validate(p, 2, 1, 2), Error);
  p.lumaOffsets[1] = -4;

  CnnSaoParams q = p;
  q.merge = Merge::Left;
  EXPECT_TRUE(p.sameFilter(q));
  q.chromaModels = {1};  // ignored while chroma is off
  EXPECT_TRUE(p.sameFilter(q));
  q.lumaOffsets[0] = 2;
  EXPECT_FALSE(p.sameFilter(q));
}

TEST(ComputeCorrection, Examples) {
  constexpr int F = 12;
  WeightMap one(4, 3, 1 << F);
  const WeightMap* maps1[] = {&one};
  const int off3[] = {3};
  auto corr = computeCorrection(maps1, off3, F);
  for (auto v : corr.data()) EXPECT_EQ(v, 3);

  WeightMap zero(4, 3, 0);
  const WeightMap* zeros[] = {&zero};
  const auto zc = computeCorrection(zeros, off3, F);
  for (auto v : zc.data()) EXPECT_EQ(v, 0);

  WeightMap half(4, 3, 1 << (F - 1));
  const WeightMap* maps2[] = {&one, &half};
  const int offs[] = {4, -8};
  const auto mc = computeCorrection(maps2, offs, F);
  for (auto v : mc.data()) EXPECT_EQ(v, 0);

  const int mismatch[] = {1, 2, 3};
  EXPECT_THROW(computeCorrection(maps2, mismatch, F), Error);
}

TEST(ComputeCorrection, RoundsHalfUp) {
  WeightMap w(1, 1, 2048);  // 0.5 at F = 12
  const WeightMap* maps[] = {&w};
  const int pos[] = {1}, neg[] = {-1};
  EXPECT_EQ(computeCorrection(maps, pos, 12).at(0, 0), 1);
  EXPECT_EQ(computeCorrection(maps, neg, 12).at(0, 0), 0);
}

TEST(ComputeCorrection, LinearWithinOne) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    WeightMap a(8, 8), b(8, 8);
    for (auto& v : a.data()) v = static_cast<std::int16_t>(static_cast<int>(rng() % 16001) - 8000);
    for (auto& v : b.data()) v = static_cast<std::int16_t>(static_cast<int>(rng() % 16001) - 8000);
    const int oa = static_cast<int>(rng() % 63) - 31, ob = static_cast<int>(rng() % 63) - 31;
    const WeightMap* pa[] = {&a};
    const WeightMap* pb[] = {&b};
    const WeightMap* pab[] = {&a, &b};
    const int va[] = {oa}, vb[] = {ob}, vab[] = {oa, ob};
    const auto ca = computeCorrection(pa, va, 12), cb = computeCorrection(pb, vb, 12);
    const auto cab = computeCorrection(pab, vab, 12);
    for (std::size_t k = 0; k < cab.size(); ++k) EXPECT_LE(std::abs(cab.data()[k] - ca.data()[k] - cb.data()[k]), 1);
  }
}

TEST(ApplyCnnSao, OffAndZeroNetworkAreIdentity) {
  std::mt19937_64 rng(2);
  const auto rec = randomFrame(40, 24, 8, rng);
  const auto bank = constantBank(0);
  const std::vector<std::size_t> cands{0};
  const Rect ctu{0, 0, 40, 24};
  Frame out(40, 24, 8);
  applyCnnSao(rec, ctu, CnnSaoParams{}, bank, cands, out);
  EXPECT_TRUE(testing::sameFrame(out, rec));

  CnnSaoParams on;
  on.lumaOn = on.chromaOn = true;
  on.lumaModels = on.chromaModels = {0};
  on.lumaOffsets = {17};
  on.chromaOffsetsU = {-9};
  on.chromaOffsetsV = {31};
  Frame out2(40, 24, 8);
  applyCnnSao(rec, ctu, on, bank, cands, out2);
  EXPECT_TRUE(testing::sameFrame(out2, rec));
}

TEST(ApplyCnnSao, ConstantNetworkAddsOffsetAndClips) {
  Frame rec(32, 16, 8);
  for (auto* p : {&rec.y, &rec.u, &rec.v})
    for (auto& s : p->samples().data()) s = 250;
  rec.u.at(0, 0) = 10;
  const auto bank = constantBank(1);
  const std::vector<std::size_t> cands{0};
  CnnSaoParams p;
  p.lumaOn = p.chromaOn = true;
  p.lumaModels = p.chromaModels = {0};
  p.lumaOffsets = {5};
  p.chromaOffsetsU = {3};
  p.chromaOffsetsV = {-7};
  Frame out(32, 16, 8);
  applyCnnSao(rec, Rect{0, 0, 32, 16}, p, bank, cands, out);
  for (auto s : out.y.samples().data()) EXPECT_EQ(s, 255);
  EXPECT_EQ(out.u.at(0, 0), 13);
  EXPECT_EQ(out.u.at(5, 5), 253);
  for (auto s : out.v.samples().data()) EXPECT_EQ(s, 243);
}

TEST(ApplyCnnSao, OnlyTouchesTheCtuAndStaysInRange) {
  std::mt19937_64 rng(8);
  const auto rec = randomFrame(48, 40, 10, rng);
  ModelBank bank;
  bank.candidateCount = 2;
  bank.entries.push_back({SliceMode::Intra, SizeClass::CD, 22,
                          std::make_shared<const QuantizedNetwork>(quantize(randomNetwork(Arch::V2, Role::Luma, 1))),
                          std::make_shared<const QuantizedNetwork>(quantize(randomNetwork(Arch::V2, Role::Chroma, 2)))});
  bank.entries.push_back({SliceMode::Intra, SizeClass::CD, 27,
                          std::make_shared<const QuantizedNetwork>(quantize(randomNetwork(Arch::V1, Role::Luma, 3))),
                          std::make_shared<const QuantizedNetwork>(quantize(randomNetwork(Arch::V1, Role::Chroma, 4)))});
  const std::vector<std::size_t> cands{0, 1};
  CnnSaoParams p;
  p.lumaOn = p.chromaOn = true;
  p.lumaModels = {1, 0};
  p.lumaOffsets = {31, -31};
  p.chromaModels = {1};
  p.chromaOffsetsU = {-31};
  p.chromaOffsetsV = {31};
  Frame out = rec;
  const Rect ctu{16, 8, 21, 19};
  applyCnnSao(rec, ctu, p, bank, cands, out);
  const Rect c = chromaRect(ctu);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 48; ++x) {
      const bool inside = x >= ctu.x && x < ctu.x + ctu.w && y >= ctu.y && y < ctu.y + ctu.h;
      if (!inside) EXPECT_EQ(out.y.at(x, y), rec.y.at(x, y));
      EXPECT_LE(out.y.at(x, y), 1023);
    }
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 24; ++x) {
      const bool inside = x >= c.x && x < c.x + c.w && y >= c.y && y < c.y + c.h;
      if (!inside) {
        EXPECT_EQ(out.u.at(x, y), rec.u.at(x, y));
        EXPECT_EQ(out.v.at(x, y), rec.v.at(x, y));
      }
    }
}

TEST(CtuWeightMaps, InvalidIndexThrows) {
  std::mt19937_64 rng(1);
  const auto rec = randomFrame(16, 16, 8, rng);
  const auto bank = constantBank();
  const std::vector<std::size_t> cands{0};
  CtuWeightMaps maps(rec, Rect{0, 0, 16, 16}, bank, cands);
  EXPECT_EQ(maps.luma(0).at(3, 3), 4096);
  EXPECT_THROW(maps.luma(1), Error);
  EXPECT_THROW(maps.chroma(-1), Error);
}

}  // namespace
}  // namespace saocnn
