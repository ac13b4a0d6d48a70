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

#include "saocnn/frame.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "saocnn/arith.hpp"

namespace saocnn {

namespace {

void checkBitDepth(int bitDepth) {
  if (bitDepth < 8 || bitDepth > 12) throw Error("unsupported bit depth " + std::to_string(bitDepth));
}

int ceilHalf(int v) { return (v + 1) / 2; }

}  // namespace

Plane::Plane(int width, int height, int bitDepth, std::uint16_t fill) : bitDepth_(bitDepth) {
  checkBitDepth(bitDepth);
  if (width < 1 || height < 1) throw Error("plane dimensions must be positive");
  if (fill > maxValue()) throw Error("fill value exceeds bit depth");
  samples_ = Array2D<std::uint16_t>(width, height, fill);
}

Plane Plane::fromSamples(int width, int height, int bitDepth, std::vector<std::uint16_t> samples) {
  Plane p(width, height, bitDepth);
  if (samples.size() != p.samples_.size()) throw Error("sample count does not match plane size");
  auto dst = p.samples_.data();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i] > p.maxValue()) throw Error("sample out of range");
    dst[i] = samples[i];
  }
  return p;
}

Plane Plane::crop(const Rect& r) const {
  if (r.x < 0 || r.y < 0 || r.w < 1 || r.h < 1 || r.x + r.w > width() || r.y + r.h > height())
    throw Error("crop rectangle outside plane");
  Plane out(r.w, r.h, bitDepth_);
  for (int y = 0; y < r.h; ++y)
    for (int x = 0; x < r.w; ++x) out.at(x, y) = at(r.x + x, r.y + y);
  return out;
}

void Plane::paste(const Plane& src, int x0, int y0) {
  if (x0 < 0 || y0 < 0 || x0 + src.width() > width() || y0 + src.height() > height())
    throw Error("paste rectangle outside plane");
  for (int y = 0; y < src.height(); ++y)
    for (int x = 0; x < src.width(); ++x) at(x0 + x, y0 + y) = src.at(x, y);
}

Frame::Frame(int width, int height, int bitDepth)
    : y(width, height, bitDepth), u(ceilHalf(width), ceilHalf(height), bitDepth),
      v(ceilHalf(width), ceilHalf(height), bitDepth) {}

Frame::Frame(Plane luma, Plane cb, Plane cr) : y(std::move(luma)), u(std::move(cb)), v(std::move(cr)) {
  const int cw = ceilHalf(y.width());
  const int ch = ceilHalf(y.height());
  if (u.width() != cw || u.height() != ch || v.width() != cw || v.height() != ch)
    throw Error("chroma planes do not match 4:2:0 geometry");
  if (u.bitDepth() != y.bitDepth() || v.bitDepth() != y.bitDepth()) throw Error("planes disagree on bit depth");
}

Plane& Frame::plane(Component c) {
  switch (c) {
    case Component::Y: return y;
    case Component::U: return u;
    default: return v;
  }
}

const Plane& Frame::plane(Component c) const { return const_cast<Frame*>(this)->plane(c); }

Rect chromaRect(const Rect& lumaRect) {
  const int x0 = lumaRect.x / 2;
  const int y0 = lumaRect.y / 2;
  return {x0, y0, ceilHalf(lumaRect.x + lumaRect.w) - x0, ceilHalf(lumaRect.y + lumaRect.h) - y0};
}

CtuGrid ctuPartition(int width, int height, int ctuSize) {
  if (ctuSize < 1) throw Error("ctu size must be positive");
  if (width < 0 || height < 0) throw Error("negative picture size");
  CtuGrid grid;
  grid.ctuSize = ctuSize;
  grid.columns = (width + ctuSize - 1) / ctuSize;
  grid.rows = (height + ctuSize - 1) / ctuSize;
  grid.rects.reserve(static_cast<std::size_t>(grid.columns) * grid.rows);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.columns; ++c) {
      const int x = c * ctuSize;
      const int y = r * ctuSize;
      grid.rects.push_back({x, y, std::min(ctuSize, width - x), std::min(ctuSize, height - y)});
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Raw YUV

std::uintmax_t yuvFrameBytes(int width, int height, int bitDepth) {
  const std::uintmax_t bytesPerSample = bitDepth > 8 ? 2 : 1;
  const std::uintmax_t luma = static_cast<std::uintmax_t>(width) * height;
  const std::uintmax_t chroma = static_cast<std::uintmax_t>(ceilHalf(width)) * ceilHalf(height);
  return bytesPerSample * (luma + 2 * chroma);
}

std::size_t countYuvFrames(const std::filesystem::path& path, int width, int height, int bitDepth) {
  checkBitDepth(bitDepth);
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw Error("cannot stat " + path.string() + ": " + ec.message());
  return static_cast<std::size_t>(size / yuvFrameBytes(width, height, bitDepth));
}

namespace {

void readPlane(std::istream& in, Plane& p, const std::string& name) {
  const bool wide = p.bitDepth() > 8;
  const std::size_t count = p.samples().size();
  std::vector<unsigned char> raw(count * (wide ? 2 : 1));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw Error(name + ": file too short");
  auto dst = p.samples().data();
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned v = wide ? (raw[2 * i] | (raw[2 * i + 1] << 8)) : raw[i];
    if (v > static_cast<unsigned>(p.maxValue())) throw Error(name + ": sample out of range");
    dst[i] = static_cast<std::uint16_t>(v);
  }
}

void writePlane(std::ostream& out, const Plane& p) {
  const bool wide = p.bitDepth() > 8;
  const auto src = p.samples().data();
  std::vector<unsigned char> raw;
  raw.reserve(src.size() * (wide ? 2 : 1));
  for (auto s : src) {
    raw.push_back(static_cast<unsigned char>(s & 0xff));
    if (wide) raw.push_back(static_cast<unsigned char>(s >> 8));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

}  // namespace

Frame loadYuv(const std::filesystem::path& path, int width, int height, int bitDepth, std::size_t frameIndex) {
  Frame frame(width, height, bitDepth);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  const auto offset = static_cast<std::streamoff>(yuvFrameBytes(width, height, bitDepth) * frameIndex);
  in.seekg(offset);
  if (!in) throw Error(path.string() + ": file too short");
  const std::string name = path.string();
  readPlane(in, frame.y, name);
  readPlane(in, frame.u, name);
  readPlane(in, frame.v, name);
  return frame;
}

void saveYuv(const Frame& frame, const std::filesystem::path& path, bool append) {
  std::ofstream out(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  writePlane(out, frame.y);
  writePlane(out, frame.u);
  writePlane(out, frame.v);
  if (!out) throw Error("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Metrics

double Psnr::db() const {
  if (lossless_) throw Error("lossless PSNR has no finite value");
  return db_;
}

std::string Psnr::toString() const {
  if (lossless_) return "lossless";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << db_;
  return os.str();
}

std::partial_ordering Psnr::operator<=>(const Psnr& other) const {
  if (lossless_ || other.lossless_) return lossless_ <=> other.lossless_;
  return db_ <=> other.db_;
}

Psnr psnrFromSse(std::int64_t sseValue, std::int64_t sampleCount, int bitDepth) {
  if (sseValue == 0) return Psnr::lossless();
  const double maxv = (1 << bitDepth) - 1;
  const double mse = static_cast<double>(sseValue) / static_cast<double>(sampleCount);
  return Psnr::fromDb(10.0 * std::log10(maxv * maxv / mse));
}

Psnr psnr(const Plane& a, const Plane& b) {
  if (a.bitDepth() != b.bitDepth()) throw Error("psnr: bit depth mismatch");
  return psnrFromSse(sse(a, b), static_cast<std::int64_t>(a.samples().size()), a.bitDepth());
}

std::int64_t sse(std::span<const std::uint16_t> a, std::span<const std::uint16_t> b) {
  if (a.size() != b.size()) throw Error("sse: shape mismatch");
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::int64_t d = static_cast<std::int64_t>(a[i]) - b[i];
    acc += d * d;
  }
  return acc;
}

std::int64_t sse(const Plane& a, const Plane& b, const Rect& r) {
  if (a.width() != b.width() || a.height() != b.height()) throw Error("sse: dimension mismatch");
  if (r.x < 0 || r.y < 0 || r.x + r.w > a.width() || r.y + r.h > a.height()) throw Error("sse: region outside plane");
  std::int64_t acc = 0;
  for (int y = r.y; y < r.y + r.h; ++y)
    acc += sse(a.samples().row(y).subspan(r.x, r.w), b.samples().row(y).subspan(r.x, r.w));
  return acc;
}

std::int64_t sse(const Plane& a, const Plane& b) {
  if (a.width() != b.width() || a.height() != b.height()) throw Error("sse: dimension mismatch");
  return sse(a.samples().data(), b.samples().data());
}

// ---------------------------------------------------------------------------
// 4:2:0 <-> 4:4:4

std::array<Plane, 3> upsampleChromaNn(const Frame& frame, const Rect& r) {
  std::array<Plane, 3> out{frame.y.crop(r), Plane(r.w, r.h, frame.bitDepth()), Plane(r.w, r.h, frame.bitDepth())};
  const int cw = frame.u.width();
  const int ch = frame.u.height();
  for (int y = 0; y < r.h; ++y) {
    const int cy = std::min((r.y + y) / 2, ch - 1);
    for (int x = 0; x < r.w; ++x) {
      const int cx = std::min((r.x + x) / 2, cw - 1);
      out[1].at(x, y) = frame.u.at(cx, cy);
      out[2].at(x, y) = frame.v.at(cx, cy);
    }
  }
  return out;
}

std::array<Plane, 3> upsampleChromaNn(const Frame& frame) { return upsampleChromaNn(frame, frame.y.bounds()); }

Array2D<std::int32_t> downsampleMean(const Array2D<std::int32_t>& full) {
  const int w = (full.width() + 1) / 2;
  const int h = (full.height() + 1) / 2;
  Array2D<std::int32_t> out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int64_t sum = 0;
      int n = 0;
      for (int dy = 0; dy < 2; ++dy) {
        const int sy = 2 * y + dy;
        if (sy >= full.height()) break;
        for (int dx = 0; dx < 2; ++dx) {
          const int sx = 2 * x + dx;
          if (sx >= full.width()) break;
          sum += full.at(sx, sy);
          ++n;
        }
      }
      out.at(x, y) = static_cast<std::int32_t>(divRoundHalfAway(sum, n));
    }
  }
  return out;
}

Plane downsampleMean(const Plane& full) {
  Array2D<std::int32_t> wide(full.width(), full.height());
  for (int y = 0; y < full.height(); ++y)
    for (int x = 0; x < full.width(); ++x) wide.at(x, y) = full.at(x, y);
  const auto small = downsampleMean(wide);
  Plane out(small.width(), small.height(), full.bitDepth());
  for (int y = 0; y < small.height(); ++y)
    for (int x = 0; x < small.width(); ++x) out.at(x, y) = static_cast<std::uint16_t>(small.at(x, y));
  return out;
}

}  // namespace saocnn
