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

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "saocnn/array2d.hpp"

namespace saocnn {

enum class Component : int { Y = 0, U = 1, V = 2 };

/// One colour plane of integer samples at a fixed bit depth (8..12).
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, int bitDepth, std::uint16_t fill = 0);

  /// Takes ownership of row-major samples; throws if any sample exceeds the bit depth.
  static Plane fromSamples(int width, int height, int bitDepth, std::vector<std::uint16_t> samples);

  int width() const { return samples_.width(); }
  int height() const { return samples_.height(); }
  int bitDepth() const { return bitDepth_; }
  int maxValue() const { return (1 << bitDepth_) - 1; }
  Rect bounds() const { return {0, 0, width(), height()}; }

  std::uint16_t at(int x, int y) const { return samples_.at(x, y); }
  std::uint16_t& at(int x, int y) { return samples_.at(x, y); }

  const Array2D<std::uint16_t>& samples() const { return samples_; }
  Array2D<std::uint16_t>& samples() { return samples_; }

  Plane crop(const Rect& r) const;
  /// Copies `src` into this plane with its top-left corner at (x, y).
  void paste(const Plane& src, int x, int y);

  bool operator==(const Plane&) const = default;

 private:
  int bitDepth_ = 8;
  Array2D<std::uint16_t> samples_;
};

/// 4:2:0 frame; chroma planes use ceiling division of the luma size.
struct Frame {
  Plane y;
  Plane u;
  Plane v;

  Frame() = default;
  Frame(int width, int height, int bitDepth);
  Frame(Plane luma, Plane cb, Plane cr);

  int width() const { return y.width(); }
  int height() const { return y.height(); }
  int bitDepth() const { return y.bitDepth(); }

  Plane& plane(Component c);
  const Plane& plane(Component c) const;

  bool operator==(const Frame&) const = default;
};

/// Chroma rectangle covered by a luma rectangle whose origin is even.
Rect chromaRect(const Rect& lumaRect);

struct CtuGrid {
  int ctuSize = 128;
  int columns = 0;
  int rows = 0;
  std::vector<Rect> rects;  // raster order

  std::size_t count() const { return rects.size(); }
};

CtuGrid ctuPartition(int width, int height, int ctuSize);

std::uintmax_t yuvFrameBytes(int width, int height, int bitDepth);
Frame loadYuv(const std::filesystem::path& path, int width, int height, int bitDepth, std::size_t frameIndex);
std::size_t countYuvFrames(const std::filesystem::path& path, int width, int height, int bitDepth);
void saveYuv(const Frame& frame, const std::filesystem::path& path, bool append);

/// PSNR in dB, or a lossless marker when the planes are identical.
class Psnr {
 public:
  static Psnr lossless() { return Psnr(true, 0.0); }
  static Psnr fromDb(double db) { return Psnr(false, db); }

  bool isLossless() const { return lossless_; }
  /// Throws for the lossless marker.
  double db() const;
  std::string toString() const;

  // Lossless orders above every finite value.
  std::partial_ordering operator<=>(const Psnr& other) const;
  bool operator==(const Psnr& other) const = default;

 private:
  Psnr(bool lossless, double db) : lossless_(lossless), db_(db) {}
  bool lossless_ = false;
  double db_ = 0.0;
};

Psnr psnr(const Plane& a, const Plane& b);
Psnr psnrFromSse(std::int64_t sse, std::int64_t sampleCount, int bitDepth);

std::int64_t sse(std::span<const std::uint16_t> a, std::span<const std::uint16_t> b);
std::int64_t sse(const Plane& a, const Plane& b, const Rect& region);
std::int64_t sse(const Plane& a, const Plane& b);

/// Y plus nearest-neighbour upsampled U and V over a luma rectangle.
std::array<Plane, 3> upsampleChromaNn(const Frame& frame, const Rect& lumaRect);
std::array<Plane, 3> upsampleChromaNn(const Frame& frame);

/// Rounded (half away from zero) mean over 2x2 blocks, edge blocks clipped.
Array2D<std::int32_t> downsampleMean(const Array2D<std::int32_t>& full);
Plane downsampleMean(const Plane& full);

}  // namespace saocnn
