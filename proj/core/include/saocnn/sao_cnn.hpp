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
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "saocnn/cnn.hpp"
#include "saocnn/frame.hpp"

namespace saocnn {

enum class SliceMode : std::uint8_t { Intra = 0, Inter = 1 };
enum class SizeClass : std::uint8_t { AB = 0, CD = 1 };

std::string_view toString(SliceMode m);
std::string_view toString(SizeClass s);

constexpr std::array<int, 4> kBankQps{22, 27, 32, 37};
constexpr int kCnnOffsetCap = 31;

struct BankEntry {
  SliceMode mode = SliceMode::Intra;
  SizeClass sizeClass = SizeClass::AB;
  int qp = 22;
  std::shared_ptr<const QuantizedNetwork> luma;
  std::shared_ptr<const QuantizedNetwork> chroma;
};

/// Up to sixteen (mode, size class, qp) models; K candidates are offered per picture.
struct ModelBank {
  std::vector<BankEntry> entries;
  int candidateCount = 1;            // K
  int sizeClassThreshold = 1920;     // luma width >= threshold selects AB

  SizeClass sizeClassFor(int lumaWidth) const {
    return lumaWidth >= sizeClassThreshold ? SizeClass::AB : SizeClass::CD;
  }
  /// Throws on duplicate triples, K < 1, missing networks, wrong network roles or
  /// networks that disagree on activation fraction bits.
  void validate() const;
  /// Activation fraction bits shared by every network of the bank.
  int fracBits() const;
};

/// Entries matching mode and size class ordered by |qp - entry.qp| (ties to the lower
/// entry qp), truncated to K. Returned values index `bank.entries`.
std::vector<std::size_t> selectModels(const ModelBank& bank, SliceMode mode, int lumaWidth, int qp);

/// Per-sample network output w(s) with `fracBits` fraction bits.
using WeightMap = Array2D<std::int16_t>;

enum class Merge : std::uint8_t { None = 0, Left, Up };

/// Filter decision for one CTU. Model indices point into the picture's candidate list.
/// Luma carries M models and offsets; chroma carries Mc models shared by U and V
/// and separate U and V offsets.
struct CnnSaoParams {
  Merge merge = Merge::None;
  bool lumaOn = false;
  bool chromaOn = false;
  std::vector<int> lumaModels;
  std::vector<int> lumaOffsets;
  std::vector<int> chromaModels;
  std::vector<int> chromaOffsetsU;
  std::vector<int> chromaOffsetsV;

  /// Same filtering effect, merge flag ignored.
  bool sameFilter(const CnnSaoParams& other) const;
  bool operator==(const CnnSaoParams&) const = default;
};

/// Throws unless the on/off gated vectors have sizes M / Mc, indices are below
/// `candidateCount` and offsets are within +-31.
void validate(const CnnSaoParams& params, int lumaModels, int chromaModels, std::size_t candidateCount);

/// corr(s) = (sum_i w_i(s) * off_i + 2^(F-1)) >> F with saturating 32-bit sums.
Array2D<std::int32_t> computeCorrection(std::span<const WeightMap* const> maps, std::span<const int> offsets,
                                        int fracBits);

WeightMap lumaWeightMap(const Frame& rec, const Rect& ctu, const QuantizedNetwork& net, int threads = 1);
/// U and V weight maps at luma resolution from the 4:4:4 (Y, U, V) CTU input.
std::array<WeightMap, 2> chromaWeightMaps(const Frame& rec, const Rect& ctu, const QuantizedNetwork& net,
                                          int threads = 1);

/// Lazily evaluated weight maps of every candidate model on one CTU.
class CtuWeightMaps {
 public:
  CtuWeightMaps(const Frame& rec, const Rect& ctu, const ModelBank& bank, std::span<const std::size_t> candidates,
                int threads = 1);

  const WeightMap& luma(int candidate);
  const std::array<WeightMap, 2>& chroma(int candidate);
  std::size_t candidateCount() const { return candidates_.size(); }
  int fracBits() const { return bank_.fracBits(); }
  const Rect& ctu() const { return ctu_; }

 private:
  const BankEntry& entry(int candidate) const;

  const Frame& rec_;
  Rect ctu_;
  const ModelBank& bank_;
  std::vector<std::size_t> candidates_;
  int threads_;
  std::map<int, WeightMap> luma_;
  std::map<int, std::array<WeightMap, 2>> chroma_;
};

/// Adds a luma-resolution correction to `ctu` of `rec` and clips into `out`.
void addLumaCorrection(const Plane& rec, const Rect& ctu, const Array2D<std::int32_t>& corr, Plane& out);
/// Downsamples a luma-resolution correction to the CTU's chroma rectangle, adds and clips.
void addChromaCorrection(const Plane& rec, const Rect& lumaCtu, const Array2D<std::int32_t>& corr, Plane& out);

Array2D<std::int32_t> lumaCorrection(const CnnSaoParams& params, CtuWeightMaps& maps);
/// Luma-resolution correction of chroma plane 0 (U) or 1 (V).
Array2D<std::int32_t> chromaCorrection(const CnnSaoParams& params, CtuWeightMaps& maps, int plane);

/// Filters one CTU of `rec` into `out` (all three planes). Reads only the CTU of `rec`.
void applyCnnSao(const Frame& rec, const CnnSaoParams& params, CtuWeightMaps& maps, Frame& out);
void applyCnnSao(const Frame& rec, const Rect& ctu, const CnnSaoParams& params, const ModelBank& bank,
                 std::span<const std::size_t> candidates, Frame& out, int threads = 1);

}  // namespace saocnn
