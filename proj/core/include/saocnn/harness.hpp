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

// Desk-scale experiment support: coding-artifact simulator, BD-rate, synthetic
// content, model bank fixtures and experiment reports.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "saocnn/cnn.hpp"
#include "saocnn/frame.hpp"
#include "saocnn/rdo.hpp"
#include "saocnn/sao_cnn.hpp"

namespace saocnn {

// ---------------------------------------------------------------------------
// Degradation

/// 2^((qp - 4) / 6)
double quantStep(int qp);

struct DegradeResult {
  Frame frame;
  std::int64_t coefBits = 0;  // sum of se() lengths of all quantised levels
};

/// Per plane and 8x8 block (zero padded at the edges): orthonormal DCT-II, uniform
/// reconstruction Delta * round(c / Delta), inverse DCT, round and clip.
DegradeResult degradeWithRate(const Frame& frame, int qp);
/// `seed` is reserved for dithering, which is off.
Frame degrade(const Frame& frame, int qp, std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// BD-rate

struct RdPoint {
  double rate = 0.0;
  double psnr = 0.0;
};

/// Cubic fits of log10(rate) over PSNR, integrated over the common PSNR interval.
/// Points are sorted by rate; rates and PSNRs must then both strictly increase.
double bdRate(std::span<const RdPoint> anchor, std::span<const RdPoint> test);

// ---------------------------------------------------------------------------
// Synthetic content

enum class Pattern { Gradient, Noise, Edges, Texture };
std::string_view toString(Pattern p);
Pattern patternFromString(std::string_view name);

Frame synthesize(Pattern pattern, int width, int height, int bitDepth, std::uint64_t seed);

/// rec = clip(frame + delta) on every plane.
Frame addBias(const Frame& frame, int delta);
/// rec = clip(frame - round(gain * frame)) on every plane.
Frame addGain(const Frame& frame, double gain);

// ---------------------------------------------------------------------------
// Model banks

/// Sixteen entries (intra/inter, AB/CD, four qps). qp 22 and 32 carry pass-through
/// networks, qp 27 and 37 constant-one networks.
ModelBank fixtureBank(Arch arch, int candidateCount = 2, int fracBits = kDefaultFracBits);

struct FixturePair {
  int qp = 32;
  Frame orig;
  Frame rec;
};

/// Per bank qp: least-squares fit of the residual (orig - rec) / maxValue against the
/// normalised reconstruction, a * x + b per plane over every fixture of that qp,
/// rescaled to unit peak on [0, 1] and realised as affine networks. Every qp in
/// {22, 27, 32, 37} needs at least one fixture.
ModelBank fitAffineBank(Arch arch, std::span<const FixturePair> fixtures, int candidateCount = 2,
                        int fracBits = kDefaultFracBits);

/// bank.json: {"k", "size_class_threshold", "frac_bits", "entries": [{"mode",
/// "size_class", "qp", "luma", "chroma"}]}. Network files are .saoq, or .saow which
/// are quantised with frac_bits on load.
ModelBank loadBankDir(const std::filesystem::path& dir);
void saveBankDir(const ModelBank& bank, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Experiments

struct Sequence {
  std::string name;
  std::string cls;  // reporting class
  std::vector<Frame> frames;
};

struct ExperimentConfig {
  std::vector<int> qps{22, 27, 32, 37};
  EncoderConfig encoder;
  Arch arch = Arch::V1;
  int threads = 1;  // parallel (sequence, qp) runs
};

struct ComponentStats {
  std::int64_t sseBefore = 0;
  std::int64_t sseAfter = 0;
  std::int64_t samples = 0;
  int bitDepth = 8;

  Psnr psnrBefore() const { return psnrFromSse(sseBefore, samples, bitDepth); }
  Psnr psnrAfter() const { return psnrFromSse(sseAfter, samples, bitDepth); }
};

struct RunRecord {
  std::string sequence;
  std::string cls;
  int qp = 0;
  std::int64_t paramBits = 0;  // serialised SAOP bits, all frames
  std::int64_t coefBits = 0;   // degrade() level bits, all frames
  std::array<ComponentStats, 3> components;
  std::array<std::map<std::string, int>, 2> modeHistogram;
  std::int64_t ctuCount = 0;
  std::int64_t chosenKeySum = 0;
  std::int64_t offKeySum = 0;
  bool neverWorse = true;  // every picture's chosen J <= J(OFF)
};

struct BdRateRow {
  std::string sequence;
  std::array<std::optional<double>, 3> percent;  // per component, empty when undefined
  std::array<std::string, 3> note;
};

struct ExperimentReport {
  std::vector<RunRecord> runs;
  std::vector<BdRateRow> bdRates;
  Arch arch = Arch::V1;
  int lumaModels = 1;
  FilterFamily family = FilterFamily::Classic;
};

ExperimentReport runExperiment(const std::vector<Sequence>& sequences, const ExperimentConfig& config,
                               const ModelBank* bank);

std::string experimentJson(const ExperimentReport& report);
std::string experimentTable(const ExperimentReport& report);
/// MAC per pel of v1 and v2, luma (M models) and chroma.
std::string macSummary(int lumaModels);

}  // namespace saocnn
