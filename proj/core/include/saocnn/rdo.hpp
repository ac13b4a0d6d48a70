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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "saocnn/param_codec.hpp"
#include "saocnn/sao_classic.hpp"
#include "saocnn/sao_cnn.hpp"

namespace saocnn {

/// 0.85 * 2^((qp - 12) / 3)
double lambdaFromQp(int qp);

/// Lagrange multiplier. Costs compare on the integer key D * 2^16 + round(lambda * 2^16) * R.
class Lambda {
 public:
  static constexpr int kFracBits = 16;
  static constexpr double kMax = 1e9;

  explicit Lambda(double value);
  static Lambda fromQp(int qp) { return Lambda(lambdaFromQp(qp)); }

  double value() const { return value_; }
  std::int64_t fixed() const { return fixed_; }

 private:
  double value_;
  std::int64_t fixed_;
};

struct RdCost {
  std::int64_t d = 0;  // SSE
  std::int64_t r = 0;  // bits
  double j = 0.0;      // d + lambda * r
  std::int64_t key = 0;

  static RdCost make(std::int64_t d, std::int64_t r, const Lambda& lambda);
  bool operator<(const RdCost& o) const { return key < o.key; }
  bool operator<=(const RdCost& o) const { return key <= o.key; }
};

// ---------------------------------------------------------------------------
// Offset derivation for CNN mode

/// Solves the normal equations A x = b by Gaussian elimination with partial pivoting.
/// A column whose best pivot is below 1e-9 * max|A| is fixed to 0.
std::vector<double> solveNormalEquations(std::vector<std::vector<double>> a, std::vector<double> b);

/// Least-squares offsets for maps w_i(s) = int / 2^F against err(s) = orig - rec.
std::vector<double> lsOffsets(std::span<const WeightMap* const> maps, const Array2D<std::int32_t>& err, int fracBits);

using OffsetCostFn = std::function<RdCost(std::span<const int>)>;
using RateFn = std::function<std::int64_t(std::span<const int>)>;

struct OffsetSearchResult {
  std::vector<int> offsets;
  RdCost cost;
};

/// Evaluates the zero vector, then round(start) refined by {-1, 0, +1} per coordinate
/// (full grid for up to three coordinates, coordinate descent beyond), all clamped to
/// [-cap, cap]. The first minimum in evaluation order wins.
OffsetSearchResult searchOffsets(std::span<const double> start, int cap, const OffsetCostFn& cost);

/// Same-resolution search: exact D of adding the CNN correction to `region` of `rec`
/// (with clipping) against `orig`, exact R from `rate`.
OffsetSearchResult searchCnnOffsets(std::span<const WeightMap* const> maps, const Plane& orig, const Plane& rec,
                                    const Rect& region, int fracBits, const Lambda& lambda, const RateFn& rate);

// ---------------------------------------------------------------------------
// Classic SAO search

struct ClassicComponentChoice {
  ClassicSaoParams params;
  std::int64_t deltaD = 0;  // exact SSE change versus unfiltered
  std::int64_t bits = 0;    // classicComponentBits
  std::int64_t key = 0;     // deltaD * 2^16 + lambda_fixed * bits
};

/// Exact rate-distortion optimal classic parameters of one component (Y: 0, U: 1,
/// V: 2) over `region`, found from class statistics. `forcedMode` restricts the
/// search to one mode (used for V, which inherits U's mode).
ClassicComponentChoice bestClassicComponent(const Plane& orig, const Plane& rec, const Rect& region, int component,
                                            const Lambda& lambda, std::optional<SaoMode> forcedMode = std::nullopt);

// ---------------------------------------------------------------------------
// CTU and picture decisions

struct EncoderConfig {
  FilterFamily family = FilterFamily::Classic;
  SliceMode sliceMode = SliceMode::Intra;
  int qp = 32;
  int ctuSize = 128;
  int lumaModels = 1;    // M
  int chromaModels = 1;  // Mc
  std::optional<double> lambda;  // overrides lambdaFromQp
  int tupleLimit = 64;
  int topSingles = 8;
  bool forceOff = false;
  int threads = 1;

  Lambda effectiveLambda() const { return lambda ? Lambda(*lambda) : Lambda::fromQp(qp); }
};

enum class CtuChoice : std::uint8_t { Off, MergeLeft, MergeUp, Explicit };
std::string_view toString(CtuChoice c);

struct ClassicCtuDecision {
  ClassicCtuParams params;
  CtuChoice choice = CtuChoice::Off;
  RdCost cost;
  RdCost offCost;
};

struct CnnCtuDecision {
  CnnSaoParams params;
  CtuChoice choice = CtuChoice::Off;
  RdCost cost;
  RdCost offCost;
};

/// Evaluates OFF, merge-left, merge-up and the best explicit parameters with exact
/// D (filtering applied) and exact R (bit counting); first minimum wins.
ClassicCtuDecision rdoCtuClassic(const Frame& orig, const Frame& rec, const Rect& ctu, const ClassicCtuParams* left,
                                 const ClassicCtuParams* up, const Lambda& lambda, bool forceOff = false);

CnnCtuDecision rdoCtuCnn(const Frame& orig, const Frame& rec, CtuWeightMaps& maps, const CnnSaoParams* left,
                         const CnnSaoParams* up, const Lambda& lambda, const PictureHeader& header,
                         const EncoderConfig& config);

/// Total SSE of Y, U and V between two frames over a CTU and its chroma rectangle.
std::int64_t ctuSse(const Frame& a, const Frame& b, const Rect& ctu);

struct CtuReport {
  std::size_t index = 0;
  Rect rect;
  CtuChoice choice = CtuChoice::Off;
  std::array<std::string, 2> modes;  // luma, chroma
  RdCost cost;
  RdCost offCost;
};

struct PictureReport {
  std::vector<CtuReport> ctus;
  std::int64_t totalD = 0;
  std::int64_t totalR = 0;  // CTU body bits
  double totalJ = 0.0;
  std::size_t streamBits = 0;  // header + body + padding
  std::array<Psnr, 3> psnrBefore{Psnr::lossless(), Psnr::lossless(), Psnr::lossless()};
  std::array<Psnr, 3> psnrAfter{Psnr::lossless(), Psnr::lossless(), Psnr::lossless()};
  std::array<std::map<std::string, int>, 2> modeHistogram;  // luma, chroma
  double lambda = 0.0;
};

struct EncodeResult {
  PictureParams params;
  std::vector<std::uint8_t> stream;
  Frame filtered;
  PictureReport report;
};

/// Raster-order CTU decisions, filtered output and the serialised "SAOP" picture.
/// `bank` is required for the CNN family.
EncodeResult rdoPicture(const Frame& orig, const Frame& rec, const ModelBank* bank, const EncoderConfig& config);

/// Decoder side: applies decoded picture parameters to a reconstruction.
Frame applyPicture(const Frame& rec, const PictureParams& params, const ModelBank* bank, int threads = 1);

}  // namespace saocnn
