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

#include <cmath>
#include <filesystem>
#include <fstream>

#include "saocnn/frame.hpp"
#include "test_support.hpp"

namespace saocnn {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("saocnn_frame_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" + std::to_string(counter_++))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& n) const { return path_ / n; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

void writeBytes(const fs::path& p, const std::vector<std::uint8_t>& b) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

TEST(Plane, RejectsBadConstruction) {
  EXPECT_THROW(Plane(0, 4, 8), Error);
  EXPECT_THROW(Plane(4, 4, 7), Error);
  EXPECT_THROW(Plane::fromSamples(2, 1, 8, {1, 256}), Error);
  EXPECT_THROW(Plane::fromSamples(2, 2, 8, {1, 2, 3}), Error);
}

TEST(Frame, ChromaIsCeilSized) {
  Frame f(5, 3, 10);
  EXPECT_EQ(f.u.width(), 3);
  EXPECT_EQ(f.u.height(), 2);
  EXPECT_EQ(f.v.width(), 3);
  EXPECT_EQ(f.v.bitDepth(), 10);
}

TEST(Yuv, LoadsTwoByTwoLayout) {
  TempDir dir;
  writeBytes(dir / "a.yuv", {1, 2, 3, 4, 5, 6});
  const Frame f = loadYuv(dir / "a.yuv", 2, 2, 8, 0);
  EXPECT_EQ(f.y.at(0, 0), 1);
  EXPECT_EQ(f.y.at(1, 0), 2);
  EXPECT_EQ(f.y.at(0, 1), 3);
  EXPECT_EQ(f.y.at(1, 1), 4);
  EXPECT_EQ(f.u.at(0, 0), 5);
  EXPECT_EQ(f.v.at(0, 0), 6);
  try {
    loadYuv(dir / "a.yuv", 2, 2, 8, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("file too short"), std::string::npos);
  }
}

TEST(Yuv, RejectsOutOfRangeTenBit) {
  TempDir dir;
  // 1024 little-endian in the first luma sample.
  writeBytes(dir / "b.yuv", {0x00, 0x04, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  try {
    loadYuv(dir / "b.yuv", 2, 2, 10, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("sample out of range"), std::string::npos);
  }
}

TEST(Yuv, RoundTripAndAppend) {
  TempDir dir;
  std::mt19937_64 rng(7);
  for (int bd : {8, 10}) {
    const Frame a = testing::randomFrame(7, 5, bd, rng);
    const Frame b = testing::randomFrame(7, 5, bd, rng);
    const auto path = dir / ("rt" + std::to_string(bd) + ".yuv");
    saveYuv(a, path, false);
    saveYuv(b, path, true);
    EXPECT_EQ(countYuvFrames(path, 7, 5, bd), 2u);
    EXPECT_EQ(loadYuv(path, 7, 5, bd, 0), a);
    EXPECT_EQ(loadYuv(path, 7, 5, bd, 1), b);
    const std::uintmax_t perFrame = (bd == 8 ? 1 : 2) * (7 * 5 + 2 * 4 * 3);
    EXPECT_EQ(fs::file_size(path), 2 * perFrame);
    EXPECT_EQ(yuvFrameBytes(7, 5, bd), perFrame);
  }
}

TEST(CtuGrid, Hd1080) {
  const auto g = ctuPartition(1920, 1080, 128);
  EXPECT_EQ(g.count(), 135u);
  EXPECT_EQ(g.columns, 15);
  EXPECT_EQ(g.rows, 9);
  EXPECT_EQ(g.rects.back().h, 56);
  EXPECT_EQ(g.rects.back().w, 128);
}

TEST(CtuGrid, SmallCases) {
  const auto one = ctuPartition(128, 128, 128);
  ASSERT_EQ(one.count(), 1u);
  EXPECT_EQ(one.rects[0].area(), 128 * 128);
  const auto two = ctuPartition(130, 1, 128);
  ASSERT_EQ(two.count(), 2u);
  EXPECT_EQ(two.rects[0].w, 128);
  EXPECT_EQ(two.rects[1].w, 2);
  EXPECT_EQ(two.rects[1].x, 128);
}

TEST(CtuGrid, TilesExactly) {
  for (int w : {1, 7, 64, 130, 257})
    for (int h : {1, 9, 128, 200})
      for (int s : {1, 8, 64, 128}) {
        const auto g = ctuPartition(w, h, s);
        std::int64_t area = 0;
        std::vector<int> cover(static_cast<std::size_t>(w) * h, 0);
        for (const auto& r : g.rects) {
          area += r.area();
          ASSERT_GE(r.x, 0);
          ASSERT_LE(r.x + r.w, w);
          ASSERT_LE(r.y + r.h, h);
          for (int y = r.y; y < r.y + r.h; ++y)
            for (int x = r.x; x < r.x + r.w; ++x) ++cover[static_cast<std::size_t>(y) * w + x];
        }
        EXPECT_EQ(area, static_cast<std::int64_t>(w) * h);
        EXPECT_TRUE(std::all_of(cover.begin(), cover.end(), [](int c) { return c == 1; }));
        EXPECT_EQ(g.count(), static_cast<std::size_t>(((w + s - 1) / s) * ((h + s - 1) / s)));
      }
}

TEST(Psnr, LosslessMarker) {
  const Plane a(4, 4, 8, 9);
  const Psnr p = psnr(a, a);
  EXPECT_TRUE(p.isLossless());
  EXPECT_THROW((void)p.db(), Error);
  EXPECT_EQ(p.toString(), "lossless");
  EXPECT_GT(p, Psnr::fromDb(99.0));
}

TEST(Psnr, OffByOneEverywhere) {
  const Plane a(8, 8, 8, 10), b(8, 8, 8, 11);
  EXPECT_NEAR(psnr(a, b).db(), 10.0 * std::log10(255.0 * 255.0), 1e-12);
  EXPECT_NEAR(psnr(a, b).db(), 48.131, 1e-3);
}

TEST(Psnr, SingleSampleOffByTwo) {
  const Plane a(2, 2, 8, 10);
  Plane b = a;
  b.at(1, 1) = 12;
  EXPECT_NEAR(psnr(a, b).db(), 48.131, 1e-3);
}

TEST(Psnr, SymmetricAndRejectsMismatch) {
  std::mt19937_64 rng(3);
  const auto a = testing::randomPlane(9, 4, 10, rng), b = testing::randomPlane(9, 4, 10, rng);
  EXPECT_EQ(psnr(a, b).db(), psnr(b, a).db());
  EXPECT_THROW(psnr(a, Plane(4, 9, 10)), Error);
  EXPECT_THROW(psnr(a, Plane(9, 4, 8)), Error);
}

TEST(Sse, Basics) {
  const std::vector<std::uint16_t> a{0, 0}, b{1, 3};
  EXPECT_EQ(sse(a, b), 10);
  EXPECT_EQ(sse(a, a), 0);
  EXPECT_THROW(sse(std::span<const std::uint16_t>(a), std::span<const std::uint16_t>(b).first(1)), Error);
}

TEST(Sse, AdditiveOverTilesAndTranslationInvariant) {
  std::mt19937_64 rng(11);
  const auto a = testing::randomPlane(50, 37, 10, rng), b = testing::randomPlane(50, 37, 10, rng);
  std::int64_t total = 0;
  for (const auto& r : ctuPartition(50, 37, 16).rects) total += sse(a, b, r);
  EXPECT_EQ(total, sse(a, b));

  const Rect r{3, 4, 10, 6};
  Plane a2(60, 50, 10), b2(60, 50, 10);
  a2.paste(a.crop(r), 20, 30);
  b2.paste(b.crop(r), 20, 30);
  EXPECT_EQ(sse(a, b, r), sse(a2, b2, Rect{20, 30, 10, 6}));
}

TEST(ChromaResample, ReplicatesAndClamps) {
  Frame f(2, 2, 8);
  f.u.at(0, 0) = 7;
  const auto up = upsampleChromaNn(f);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) EXPECT_EQ(up[1].at(x, y), 7);

  Frame odd(3, 1, 8);
  odd.u.at(0, 0) = 4;
  odd.u.at(1, 0) = 9;
  const auto up3 = upsampleChromaNn(odd);
  EXPECT_EQ(up3[1].width(), 3);
  EXPECT_EQ(up3[1].at(0, 0), 4);
  EXPECT_EQ(up3[1].at(1, 0), 4);
  EXPECT_EQ(up3[1].at(2, 0), 9);
}

TEST(ChromaResample, DownOfUpIsIdentity) {
  std::mt19937_64 rng(5);
  for (auto [w, h] : {std::pair{8, 6}, {7, 5}, {1, 1}, {3, 8}}) {
    const Frame f = testing::randomFrame(w, h, 10, rng);
    const auto up = upsampleChromaNn(f);
    EXPECT_EQ(downsampleMean(up[1]), f.u);
    EXPECT_EQ(downsampleMean(up[2]), f.v);
    EXPECT_EQ(up[0], f.y);
  }
}

TEST(ChromaResample, DownsampleRounding) {
  const Plane block = Plane::fromSamples(2, 2, 8, {0, 0, 0, 4});
  EXPECT_EQ(downsampleMean(block).at(0, 0), 1);
  const Plane column = Plane::fromSamples(1, 2, 8, {3, 4});  // mean 3.5
  const Plane d = downsampleMean(column);
  EXPECT_EQ(d.width(), 1);
  EXPECT_EQ(d.at(0, 0), 4);
  EXPECT_EQ(downsampleMean(Plane(6, 6, 8, 77)), Plane(3, 3, 8, 77));

  Array2D<std::int32_t> neg(2, 2);
  neg.at(0, 0) = -1;
  neg.at(1, 0) = -1;  // mean -0.5 rounds away from zero
  EXPECT_EQ(downsampleMean(neg).at(0, 0), -1);
}

TEST(ChromaRect, CoversHalfResolution) {
  EXPECT_EQ(chromaRect({0, 0, 128, 128}).w, 64);
  const Rect edge = chromaRect({128, 64, 3, 5});
  EXPECT_EQ(edge.x, 64);
  EXPECT_EQ(edge.y, 32);
  EXPECT_EQ(edge.w, 2);
  EXPECT_EQ(edge.h, 3);
}

}  // namespace
}  // namespace saocnn
