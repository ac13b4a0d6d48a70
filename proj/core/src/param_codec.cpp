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

#include "saocnn/param_codec.hpp"

#include <cstdlib>

#include "saocnn/byte_io.hpp"

namespace saocnn {

namespace {

constexpr std::uint16_t kStreamVersion = 1;

const std::vector<int>& offsetGroup(const CnnSaoParams& p, int group) {
  return group == 0 ? p.lumaOffsets : group == 1 ? p.chromaOffsetsU : p.chromaOffsetsV;
}

bool groupActive(const CnnSaoParams& p, int group) { return group == 0 ? p.lumaOn : p.chromaOn; }

template <typename Params>
void writeMergeFlags(BitWriter& out, const Params& params, const Params* left, const Params* up) {
  if (params.merge == Merge::Left) {
    if (!left) throw Error("merge-left without a left neighbour");
    if (!params.sameFilter(*left)) throw Error("merge-left parameters differ from the left neighbour");
    out.bit(true);
    return;
  }
  if (left) out.bit(false);
  if (params.merge == Merge::Up) {
    if (!up) throw Error("merge-up without an upper neighbour");
    if (!params.sameFilter(*up)) throw Error("merge-up parameters differ from the upper neighbour");
    out.bit(true);
    return;
  }
  if (up) out.bit(false);
}

template <typename Params>
bool readMergeFlags(BitReader& in, const Params* left, const Params* up, Params& result) {
  if (left && in.bit()) {
    result = *left;
    result.merge = Merge::Left;
    return true;
  }
  if (up && in.bit()) {
    result = *up;
    result.merge = Merge::Up;
    return true;
  }
  return false;
}

}  // namespace

void validate(const ClassicCtuParams& p, int bitDepth) {
  for (const auto& c : p.comp) validate(c, bitDepth);
  if (p.comp[1].mode != p.comp[2].mode) throw Error("U and V must share the SAO mode");
}

int modelIndexBits(int candidateCount) {
  if (candidateCount < 1) throw Error("K must be at least 1");
  int bits = 0;
  while ((1 << bits) < candidateCount) ++bits;
  return bits;
}

int predictCnnOffset(const CnnSaoParams* left, const CnnSaoParams* up, int group, int slot) {
  for (const CnnSaoParams* n : {left, up}) {
    if (!n || !groupActive(*n, group)) continue;
    const auto& offs = offsetGroup(*n, group);
    if (static_cast<std::size_t>(slot) < offs.size()) return offs[slot];
  }
  return 0;
}

// ---------------------------------------------------------------------------
// CNN syntax

std::size_t writeCtuCnn(BitWriter& out, const CnnSaoParams& p, const CnnSaoParams* left, const CnnSaoParams* up,
                        const PictureHeader& h) {
  const std::size_t start = out.bitCount();
  writeMergeFlags(out, p, left, up);
  if (p.merge != Merge::None) return out.bitCount() - start;
  validate(p, h.lumaModels, h.chromaModels, static_cast<std::size_t>(h.candidateCount));
  const int idxBits = modelIndexBits(h.candidateCount);

  out.bit(p.lumaOn);
  if (p.lumaOn) {
    for (int m : p.lumaModels) out.bits(static_cast<std::uint32_t>(m), idxBits);
    for (int i = 0; i < h.lumaModels; ++i) out.se(p.lumaOffsets[i] - predictCnnOffset(left, up, 0, i));
  }
  out.bit(p.chromaOn);
  if (p.chromaOn) {
    for (int m : p.chromaModels) out.bits(static_cast<std::uint32_t>(m), idxBits);
    for (int i = 0; i < h.chromaModels; ++i) out.se(p.chromaOffsetsU[i] - predictCnnOffset(left, up, 1, i));
    for (int i = 0; i < h.chromaModels; ++i) out.se(p.chromaOffsetsV[i] - predictCnnOffset(left, up, 2, i));
  }
  return out.bitCount() - start;
}

CnnSaoParams readCtuCnn(BitReader& in, const CnnSaoParams* left, const CnnSaoParams* up, const PictureHeader& h) {
  CnnSaoParams p;
  if (readMergeFlags(in, left, up, p)) return p;
  const int idxBits = modelIndexBits(h.candidateCount);
  auto readOffset = [&](int group, int slot) {
    const std::int64_t v = static_cast<std::int64_t>(in.se()) + predictCnnOffset(left, up, group, slot);
    if (std::abs(v) > kCnnOffsetCap) throw Error("corrupt stream: CNN offset out of range");
    return static_cast<int>(v);
  };
  auto readModel = [&] {
    const auto m = in.bits(idxBits);
    if (m >= static_cast<std::uint32_t>(h.candidateCount)) throw Error("corrupt stream: model index out of range");
    return static_cast<int>(m);
  };
  p.lumaOn = in.bit();
  if (p.lumaOn) {
    for (int i = 0; i < h.lumaModels; ++i) p.lumaModels.push_back(readModel());
    for (int i = 0; i < h.lumaModels; ++i) p.lumaOffsets.push_back(readOffset(0, i));
  }
  p.chromaOn = in.bit();
  if (p.chromaOn) {
    for (int i = 0; i < h.chromaModels; ++i) p.chromaModels.push_back(readModel());
    for (int i = 0; i < h.chromaModels; ++i) p.chromaOffsetsU.push_back(readOffset(1, i));
    for (int i = 0; i < h.chromaModels; ++i) p.chromaOffsetsV.push_back(readOffset(2, i));
  }
  return p;
}

std::size_t cnnCtuBits(const CnnSaoParams& params, const CnnSaoParams* left, const CnnSaoParams* up,
                       const PictureHeader& header) {
  BitWriter scratch;
  return writeCtuCnn(scratch, params, left, up, header);
}

// ---------------------------------------------------------------------------
// Classic syntax

namespace {

int eoClassCode(SaoMode m) { return static_cast<int>(m) - static_cast<int>(SaoMode::Eo0); }

void writeClassicComponent(BitWriter& out, const ClassicSaoParams& p, int component) {
  if (component < 2) {
    const std::uint32_t type = p.mode == SaoMode::Off ? 0 : isEdgeOffset(p.mode) ? 1 : 2;
    out.ue(type);
  }
  if (p.mode == SaoMode::Off) return;
  for (int off : p.offsets) out.ue(static_cast<std::uint32_t>(std::abs(off)));
  if (p.mode == SaoMode::Bo) {
    for (int off : p.offsets)
      if (off != 0) out.bit(off < 0);
    out.bits(static_cast<std::uint32_t>(p.bandPos), 5);
  } else if (component < 2) {
    out.bits(static_cast<std::uint32_t>(eoClassCode(p.mode)), 2);
  }
}

}  // namespace

std::size_t classicComponentBits(const ClassicSaoParams& params, int component) {
  BitWriter scratch;
  writeClassicComponent(scratch, params, component);
  return scratch.bitCount();
}

std::size_t writeCtuClassic(BitWriter& out, const ClassicCtuParams& p, const ClassicCtuParams* left,
                            const ClassicCtuParams* up, int bitDepth) {
  const std::size_t start = out.bitCount();
  writeMergeFlags(out, p, left, up);
  if (p.merge != Merge::None) return out.bitCount() - start;
  validate(p, bitDepth);
  for (int c = 0; c < 3; ++c) writeClassicComponent(out, p.comp[c], c);
  return out.bitCount() - start;
}

ClassicCtuParams readCtuClassic(BitReader& in, const ClassicCtuParams* left, const ClassicCtuParams* up,
                                int bitDepth) {
  ClassicCtuParams p;
  if (readMergeFlags(in, left, up, p)) return p;
  const int cap = offsetCap(bitDepth);
  for (int c = 0; c < 3; ++c) {
    auto& comp = p.comp[c];
    if (c < 2) {
      const auto type = in.ue();
      if (type > 2) throw Error("corrupt stream: SAO type out of range");
      comp.mode = type == 0 ? SaoMode::Off : type == 1 ? SaoMode::Eo0 : SaoMode::Bo;
    } else {
      comp.mode = p.comp[1].mode;
    }
    if (comp.mode == SaoMode::Off) continue;
    for (int& off : comp.offsets) {
      const auto mag = in.ue();
      if (mag > static_cast<std::uint32_t>(cap)) throw Error("corrupt stream: SAO offset out of range");
      off = static_cast<int>(mag);
    }
    if (comp.mode == SaoMode::Bo) {
      for (int& off : comp.offsets)
        if (off != 0 && in.bit()) off = -off;
      comp.bandPos = static_cast<int>(in.bits(5));
      if (comp.bandPos > kMaxBandPosition) throw Error("corrupt stream: band position out of range");
    } else {
      if (c < 2) comp.mode = static_cast<SaoMode>(static_cast<int>(SaoMode::Eo0) + static_cast<int>(in.bits(2)));
      else comp.mode = p.comp[1].mode;
      comp.offsets[2] = -comp.offsets[2];
      comp.offsets[3] = -comp.offsets[3];
    }
  }
  return p;
}

std::size_t classicCtuBits(const ClassicCtuParams& params, const ClassicCtuParams* left, const ClassicCtuParams* up,
                           int bitDepth) {
  BitWriter scratch;
  return writeCtuClassic(scratch, params, left, up, bitDepth);
}

// ---------------------------------------------------------------------------
// Pictures

std::vector<std::uint8_t> writePicture(const PictureParams& pic, std::vector<std::size_t>* ctuBits) {
  const auto& h = pic.header;
  const auto grid = ctuPartition(h.width, h.height, h.ctuSize);
  const bool cnn = h.family == FilterFamily::Cnn;
  if ((cnn ? pic.cnn.size() : pic.classic.size()) != grid.count())
    throw Error("writePicture: CTU count does not match the picture geometry");
  if (h.candidateCount < 1 || h.candidateCount > 255 || h.lumaModels < 1 || h.chromaModels < 1)
    throw Error("writePicture: invalid K/M in header");

  ByteWriter head;
  head.magic("SAOP");
  head.u16(kStreamVersion);
  head.u32(static_cast<std::uint32_t>(h.width));
  head.u32(static_cast<std::uint32_t>(h.height));
  head.u8(static_cast<std::uint8_t>(h.bitDepth));
  head.u16(static_cast<std::uint16_t>(h.ctuSize));
  head.u8(static_cast<std::uint8_t>(h.family));
  head.u8(static_cast<std::uint8_t>(h.candidateCount));
  head.u8(static_cast<std::uint8_t>(h.lumaModels));
  head.u8(static_cast<std::uint8_t>(h.chromaModels));
  head.u8(static_cast<std::uint8_t>(h.sliceMode));
  head.u8(static_cast<std::uint8_t>(h.qp));

  BitWriter body;
  if (ctuBits) ctuBits->clear();
  for (std::size_t i = 0; i < grid.count(); ++i) {
    const int col = static_cast<int>(i % grid.columns);
    const int row = static_cast<int>(i / grid.columns);
    const std::size_t leftIdx = i - 1;
    const std::size_t upIdx = i - grid.columns;
    std::size_t bits = 0;
    if (cnn) {
      bits = writeCtuCnn(body, pic.cnn[i], col > 0 ? &pic.cnn[leftIdx] : nullptr, row > 0 ? &pic.cnn[upIdx] : nullptr, h);
    } else {
      bits = writeCtuClassic(body, pic.classic[i], col > 0 ? &pic.classic[leftIdx] : nullptr,
                             row > 0 ? &pic.classic[upIdx] : nullptr, h.bitDepth);
    }
    if (ctuBits) ctuBits->push_back(bits);
  }
  body.alignZero();
  head.append(body.bytes());
  return head.take();
}

PictureParams readPicture(std::span<const std::uint8_t> bytes, std::size_t& offset, std::vector<std::size_t>* ctuBits) {
  ByteReader in(bytes, offset);
  in.expectMagic("SAOP");
  if (in.u16() != kStreamVersion) throw Error("unsupported SAOP version");
  PictureParams pic;
  auto& h = pic.header;
  h.width = static_cast<int>(in.u32());
  h.height = static_cast<int>(in.u32());
  h.bitDepth = in.u8();
  h.ctuSize = in.u16();
  const auto family = in.u8();
  if (family > 1) throw Error("corrupt stream: unknown filter family");
  h.family = static_cast<FilterFamily>(family);
  h.candidateCount = in.u8();
  h.lumaModels = in.u8();
  h.chromaModels = in.u8();
  const auto slice = in.u8();
  if (slice > 1) throw Error("corrupt stream: unknown slice mode");
  h.sliceMode = static_cast<SliceMode>(slice);
  h.qp = in.u8();
  if (h.bitDepth < 8 || h.bitDepth > 12 || h.ctuSize < 1 || h.candidateCount < 1 || h.lumaModels < 1 ||
      h.chromaModels < 1)
    throw Error("corrupt stream: invalid header field");

  const auto grid = ctuPartition(h.width, h.height, h.ctuSize);
  BitReader body(bytes, in.position());
  if (ctuBits) ctuBits->clear();
  const bool cnn = h.family == FilterFamily::Cnn;
  if (cnn) {
    pic.cnn.reserve(grid.count());
  } else {
    pic.classic.reserve(grid.count());
  }
  for (std::size_t i = 0; i < grid.count(); ++i) {
    const int col = static_cast<int>(i % grid.columns);
    const int row = static_cast<int>(i / grid.columns);
    const std::size_t before = body.bitPosition();
    if (cnn) {
      const CnnSaoParams* left = col > 0 ? &pic.cnn[i - 1] : nullptr;
      const CnnSaoParams* up = row > 0 ? &pic.cnn[i - grid.columns] : nullptr;
      pic.cnn.push_back(readCtuCnn(body, left, up, h));
    } else {
      const ClassicCtuParams* left = col > 0 ? &pic.classic[i - 1] : nullptr;
      const ClassicCtuParams* up = row > 0 ? &pic.classic[i - grid.columns] : nullptr;
      pic.classic.push_back(readCtuClassic(body, left, up, h.bitDepth));
    }
    if (ctuBits) ctuBits->push_back(body.bitPosition() - before);
  }
  offset = body.alignToByte();
  if (offset > bytes.size()) throw Error("truncated stream");
  return pic;
}

std::vector<PictureParams> readStream(std::span<const std::uint8_t> bytes) {
  std::vector<PictureParams> pictures;
  std::size_t offset = 0;
  while (offset < bytes.size()) pictures.push_back(readPicture(bytes, offset));
  return pictures;
}

}  // namespace saocnn
