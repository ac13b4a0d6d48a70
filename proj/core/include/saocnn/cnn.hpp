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
#include <span>
#include <string_view>
#include <vector>

#include "saocnn/frame.hpp"

namespace saocnn {

enum class Arch : std::uint8_t { V1 = 1, V2 = 2 };
enum class Role : std::uint8_t { Luma = 0, Chroma = 1 };

constexpr int kKernelSize = 3;
constexpr int kKernelTaps = kKernelSize * kKernelSize;
constexpr int kNumLayers = 6;
constexpr int kDefaultFracBits = 12;

std::string_view toString(Arch a);
std::string_view toString(Role r);

/// Channel counts n(0..L): {ni, hidden..., no}.
std::array<int, kNumLayers + 1> channelLadder(Arch arch, Role role);

/// Channel-major tensor [channel][y][x].
template <typename T>
struct Tensor {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<T> data;

  Tensor() = default;
  Tensor(int c, int h, int w, T fill = T{})
      : channels(c), height(h), width(w), data(static_cast<std::size_t>(c) * h * w, fill) {}

  T& at(int c, int y, int x) { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }
  const T& at(int c, int y, int x) const { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }
  std::span<T> channel(int c) { return {data.data() + static_cast<std::size_t>(c) * height * width, static_cast<std::size_t>(height) * width}; }
  std::span<const T> channel(int c) const {
    return {data.data() + static_cast<std::size_t>(c) * height * width, static_cast<std::size_t>(height) * width};
  }

  bool operator==(const Tensor&) const = default;
};

struct LayerSpec {
  int inChannels = 0;
  int outChannels = 0;
  std::vector<double> weights;  // [out][in][ky][kx]
  std::vector<double> bias;     // [out]

  LayerSpec() = default;
  LayerSpec(int in, int out);

  double& weight(int o, int i, int ky, int kx) { return weights[((static_cast<std::size_t>(o) * inChannels + i) * kKernelSize + ky) * kKernelSize + kx]; }
  double weight(int o, int i, int ky, int kx) const {
    return weights[((static_cast<std::size_t>(o) * inChannels + i) * kKernelSize + ky) * kKernelSize + kx];
  }
};

/// Floating-point reference network: L = 6 layers of 3x3 convolutions.
struct NetworkSpec {
  Arch arch = Arch::V1;
  Role role = Role::Luma;
  std::vector<LayerSpec> layers;

  /// All weights and biases zero, channel ladder per arch/role.
  static NetworkSpec zeros(Arch arch, Role role);

  int inputChannels() const { return layers.front().inChannels; }
  int outputChannels() const { return layers.back().outChannels; }
  /// Throws unless the layer chain matches the arch/role ladder and all values are finite.
  void validate() const;
};

struct QuantizedLayer {
  int inChannels = 0;
  int outChannels = 0;
  int shift = 0;                     // weight fraction bits s_l
  std::vector<std::int16_t> weights;  // [out][in][ky][kx] at 2^shift
  std::vector<std::int32_t> bias;     // at 2^(fracBits + shift)

  bool operator==(const QuantizedLayer&) const = default;
};

/// 16-bit fixed-point network; activations carry `fracBits` fraction bits.
struct QuantizedNetwork {
  Arch arch = Arch::V1;
  Role role = Role::Luma;
  int fracBits = kDefaultFracBits;
  std::vector<QuantizedLayer> layers;

  int inputChannels() const { return layers.front().inChannels; }
  int outputChannels() const { return layers.back().outChannels; }
  void validate() const;

  bool operator==(const QuantizedNetwork&) const = default;
};

/// Hidden layers use ReLU, the last layer is linear; 3x3 stride 1 with replicate padding.
Tensor<double> inferFloat(const NetworkSpec& net, const Tensor<double>& input);

/// Largest s in [0, 15] with round(maxAbs * 2^s) <= 32767 (0 when none fits).
int chooseWeightShift(double maxAbs);
QuantizedNetwork quantize(const NetworkSpec& net, int fracBits = kDefaultFracBits);

/// Integer inference. Per layer and output sample: the 32-bit accumulator starts at 0
/// and takes every product w*x with a saturating add in (in, ky, kx) order, then the
/// bias (saturating), then a round-half-up arithmetic shift by s_l, then int16
/// saturation and, on hidden layers, ReLU. `threads` splits output channels only and
/// never changes the result.
Tensor<std::int16_t> inferInt(const QuantizedNetwork& net, const Tensor<std::int16_t>& input, int threads = 1);

/// round(sample / (2^bitDepth - 1) * 2^fracBits)
std::int16_t toFixedSample(int sample, int bitDepth, int fracBits);
Tensor<std::int16_t> toFixedInput(std::span<const Plane> planes, int fracBits);
Tensor<double> toFloatInput(std::span<const Plane> planes);

/// Dense-convolution MACs per output pixel: M * 9 * sum n(l) n(l+1).
std::int64_t macPerPel(const NetworkSpec& net, int modelCount = 1);
std::int64_t macPerPel(Arch arch, Role role, int modelCount = 1);

// Constructed networks for fixtures, tests and benchmarks.

/// Luma output reproduces Y; chroma outputs reproduce U and V. Unit centre taps, zero bias.
NetworkSpec passThroughNetwork(Arch arch, Role role);
/// Output is the constant `value` everywhere (last-layer bias only).
NetworkSpec constantNetwork(Arch arch, Role role, double value);
/// Pass-through routing with output r equal to gain[r] * input + bias[r] (luma uses entry 0).
NetworkSpec affineNetwork(Arch arch, Role role, std::array<double, 2> gain, std::array<double, 2> bias);
/// Seeded uniform weights within +-sqrt(6 / fan_in) (always inside [-1, 1]) and small biases.
NetworkSpec randomNetwork(Arch arch, Role role, std::uint64_t seed);

}  // namespace saocnn
