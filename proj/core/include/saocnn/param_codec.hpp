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

// "SAOP" per-picture filter parameter stream.
//
// Header (little-endian): "SAOP", u16 version=1, u32 width, u32 height, u8 bit_depth,
// u16 ctu_size, u8 family (0=classic, 1=cnn), u8 K, u8 M, u8 chroma M,
// u8 slice mode (0=intra, 1=inter), u8 qp. The body holds the per-CTU syntax in
// raster order, MSB-first, zero padded to a byte boundary. Pictures concatenate.

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "saocnn/bitstream.hpp"
#include "saocnn/sao_classic.hpp"
#include "saocnn/sao_cnn.hpp"

namespace saocnn {

enum class FilterFamily : std::uint8_t { Classic = 0, Cnn = 1 };

/// Classic SAO for Y, U and V. U and V share the mode (and EO class); offsets and
/// band positions are per component.
struct ClassicCtuParams {
  Merge merge = Merge::None;
  std::array<ClassicSaoParams, 3> comp{};

  bool sameFilter(const ClassicCtuParams& o) const { return comp == o.comp; }
  bool operator==(const ClassicCtuParams&) const = default;
};

void validate(const ClassicCtuParams& params, int bitDepth);

struct PictureHeader {
  int width = 0;
  int height = 0;
  int bitDepth = 8;
  int ctuSize = 128;
  FilterFamily family = FilterFamily::Classic;
  int candidateCount = 1;  // K
  int lumaModels = 1;      // M
  int chromaModels = 1;    // Mc
  SliceMode sliceMode = SliceMode::Intra;
  int qp = 32;

  bool operator==(const PictureHeader&) const = default;
};

constexpr std::size_t kPictureHeaderBytes = 23;

struct PictureParams {
  PictureHeader header;
  std::vector<ClassicCtuParams> classic;  // family == Classic
  std::vector<CnnSaoParams> cnn;          // family == Cnn

  bool operator==(const PictureParams&) const = default;
};

/// ceil(log2 K) bits per model index.
int modelIndexBits(int candidateCount);

/// Offset predictor used for CNN offsets: left's value when left has the slot
/// active, else up's, else 0. `group` 0 = luma, 1 = chroma U, 2 = chroma V.
int predictCnnOffset(const CnnSaoParams* left, const CnnSaoParams* up, int group, int slot);

std::size_t writeCtuCnn(BitWriter& out, const CnnSaoParams& params, const CnnSaoParams* left,
                        const CnnSaoParams* up, const PictureHeader& header);
CnnSaoParams readCtuCnn(BitReader& in, const CnnSaoParams* left, const CnnSaoParams* up, const PictureHeader& header);
std::size_t cnnCtuBits(const CnnSaoParams& params, const CnnSaoParams* left, const CnnSaoParams* up,
                       const PictureHeader& header);

std::size_t writeCtuClassic(BitWriter& out, const ClassicCtuParams& params, const ClassicCtuParams* left,
                            const ClassicCtuParams* up, int bitDepth);
ClassicCtuParams readCtuClassic(BitReader& in, const ClassicCtuParams* left, const ClassicCtuParams* up,
                                int bitDepth);
std::size_t classicCtuBits(const ClassicCtuParams& params, const ClassicCtuParams* left,
                           const ClassicCtuParams* up, int bitDepth);

/// Bits of one classic component group, excluding merge flags.
std::size_t classicComponentBits(const ClassicSaoParams& params, int component);

/// Serialises one picture; optionally reports the body bits of every CTU.
std::vector<std::uint8_t> writePicture(const PictureParams& picture, std::vector<std::size_t>* ctuBits = nullptr);
/// Parses one picture starting at `offset`, advancing it past the padded body.
/// Merges are resolved, so every returned CTU carries concrete parameters.
PictureParams readPicture(std::span<const std::uint8_t> bytes, std::size_t& offset,
                          std::vector<std::size_t>* ctuBits = nullptr);
std::vector<PictureParams> readStream(std::span<const std::uint8_t> bytes);

}  // namespace saocnn
