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

#include "saocnn/cnn.hpp"

#include <cmath>
#include <random>

#include "saocnn/arith.hpp"
#include "saocnn/parallel.hpp"

namespace saocnn {

std::string_view toString(Arch a) { return a == Arch::V1 ? "v1" : "v2"; }
std::string_view toString(Role r) { return r == Role::Luma ? "luma" : "chroma"; }

std::array<int, kNumLayers + 1> channelLadder(Arch arch, Role role) {
  const int ni = role == Role::Luma ? 1 : 3;
  const int no = role == Role::Luma ? 1 : 2;
  if (arch == Arch::V1) return {ni, 16, 32, 64, 32, 16, no};
  if (arch == Arch::V2) return {ni, 16, 16, 32, 16, 16, no};
  throw Error("unknown network architecture");
}

LayerSpec::LayerSpec(int in, int out)
    : inChannels(in), outChannels(out), weights(static_cast<std::size_t>(in) * out * kKernelTaps, 0.0),
      bias(static_cast<std::size_t>(out), 0.0) {}

NetworkSpec NetworkSpec::zeros(Arch arch, Role role) {
  const auto ladder = channelLadder(arch, role);
  NetworkSpec net;
  net.arch = arch;
  net.role = role;
  for (int l = 0; l < kNumLayers; ++l) net.layers.emplace_back(ladder[l], ladder[l + 1]);
  return net;
}

void NetworkSpec::validate() const {
  const auto ladder = channelLadder(arch, role);
  if (layers.size() != kNumLayers) throw Error("network must have 6 layers");
  for (int l = 0; l < kNumLayers; ++l) {
    const auto& layer = layers[l];
    if (layer.inChannels != ladder[l] || layer.outChannels != ladder[l + 1])
      throw Error("layer " + std::to_string(l) + " does not match the channel ladder");
    if (layer.weights.size() != static_cast<std::size_t>(layer.inChannels) * layer.outChannels * kKernelTaps ||
        layer.bias.size() != static_cast<std::size_t>(layer.outChannels))
      throw Error("layer " + std::to_string(l) + " has inconsistent parameter counts");
    for (double w : layer.weights)
      if (!std::isfinite(w)) throw Error("non-finite weight");
    for (double b : layer.bias)
      if (!std::isfinite(b)) throw Error("non-finite bias");
  }
}

void QuantizedNetwork::validate() const {
  const auto ladder = channelLadder(arch, role);
  if (layers.size() != kNumLayers) throw Error("network must have 6 layers");
  if (fracBits < 0 || fracBits > 15) throw Error("activation fraction bits out of range");
  for (int l = 0; l < kNumLayers; ++l) {
    const auto& layer = layers[l];
    if (layer.inChannels != ladder[l] || layer.outChannels != ladder[l + 1])
      throw Error("layer " + std::to_string(l) + " does not match the channel ladder");
    if (layer.shift < 0 || layer.shift > 15) throw Error("layer shift out of range");
    if (layer.weights.size() != static_cast<std::size_t>(layer.inChannels) * layer.outChannels * kKernelTaps ||
        layer.bias.size() != static_cast<std::size_t>(layer.outChannels))
      throw Error("layer " + std::to_string(l) + " has inconsistent parameter counts");
  }
}

namespace {

/// Replicate-padded copy of one channel: (h + 2) x (w + 2).
template <typename T>
std::vector<T> padReplicate(std::span<const T> src, int h, int w) {
  const int pw = w + 2;
  std::vector<T> out(static_cast<std::size_t>(h + 2) * pw);
  for (int y = -1; y <= h; ++y) {
    const int sy = std::clamp(y, 0, h - 1);
    for (int x = -1; x <= w; ++x) {
      const int sx = std::clamp(x, 0, w - 1);
      out[static_cast<std::size_t>(y + 1) * pw + (x + 1)] = src[static_cast<std::size_t>(sy) * w + sx];
    }
  }
  return out;
}

template <typename T>
std::vector<std::vector<T>> padAll(const Tensor<T>& t) {
  std::vector<std::vector<T>> padded;
  padded.reserve(t.channels);
  for (int c = 0; c < t.channels; ++c) padded.push_back(padReplicate<T>(t.channel(c), t.height, t.width));
  return padded;
}

}  // namespace

Tensor<double> inferFloat(const NetworkSpec& net, const Tensor<double>& input) {
  net.validate();
  if (input.channels != net.inputChannels()) throw Error("inferFloat: input channel mismatch");
  if (input.height < 1 || input.width < 1) throw Error("inferFloat: empty input");
  const int h = input.height;
  const int w = input.width;
  const int pw = w + 2;
  Tensor<double> cur = input;
  for (int l = 0; l < kNumLayers; ++l) {
    const auto& layer = net.layers[l];
    const bool hidden = l + 1 < kNumLayers;
    const auto padded = padAll(cur);
    Tensor<double> next(layer.outChannels, h, w);
    for (int o = 0; o < layer.outChannels; ++o) {
      auto out = next.channel(o);
      std::fill(out.begin(), out.end(), layer.bias[o]);
      for (int i = 0; i < layer.inChannels; ++i) {
        const auto& src = padded[i];
        for (int ky = 0; ky < kKernelSize; ++ky) {
          for (int kx = 0; kx < kKernelSize; ++kx) {
            const double wt = layer.weight(o, i, ky, kx);
            if (wt == 0.0) continue;
            for (int y = 0; y < h; ++y) {
              const double* s = src.data() + static_cast<std::size_t>(y + ky) * pw + kx;
              double* d = out.data() + static_cast<std::size_t>(y) * w;
              for (int x = 0; x < w; ++x) d[x] += wt * s[x];
            }
          }
        }
      }
      if (hidden)
        for (double& v : out) v = std::max(v, 0.0);
    }
    cur = std::move(next);
  }
  return cur;
}

int chooseWeightShift(double maxAbs) {
  for (int s = 15; s >= 0; --s)
    if (std::round(maxAbs * std::ldexp(1.0, s)) <= kInt16Max) return s;
  return 0;
}

QuantizedNetwork quantize(const NetworkSpec& net, int fracBits) {
  net.validate();
  if (fracBits < 0 || fracBits > 15) throw Error("activation fraction bits out of range");
  QuantizedNetwork q;
  q.arch = net.arch;
  q.role = net.role;
  q.fracBits = fracBits;
  for (const auto& layer : net.layers) {
    double maxAbs = 0.0;
    for (double w : layer.weights) maxAbs = std::max(maxAbs, std::abs(w));
    QuantizedLayer ql;
    ql.inChannels = layer.inChannels;
    ql.outChannels = layer.outChannels;
    ql.shift = chooseWeightShift(maxAbs);
    const double wScale = std::ldexp(1.0, ql.shift);
    const double bScale = std::ldexp(1.0, fracBits + ql.shift);
    ql.weights.reserve(layer.weights.size());
    for (double w : layer.weights) ql.weights.push_back(saturateInt16(std::llround(w * wScale)));
    for (double b : layer.bias) {
      const double scaled = std::round(b * bScale);
      ql.bias.push_back(scaled >= kInt32Max ? kInt32Max : scaled <= kInt32Min ? kInt32Min : static_cast<std::int32_t>(scaled));
    }
    q.layers.push_back(std::move(ql));
  }
  return q;
}

Tensor<std::int16_t> inferInt(const QuantizedNetwork& net, const Tensor<std::int16_t>& input, int threads) {
  net.validate();
  if (input.channels != net.inputChannels()) throw Error("inferInt: input channel mismatch");
  if (input.height < 1 || input.width < 1) throw Error("inferInt: empty input");
  const int h = input.height;
  const int w = input.width;
  const int pw = w + 2;
  Tensor<std::int16_t> cur = input;
  for (int l = 0; l < kNumLayers; ++l) {
    const auto& layer = net.layers[l];
    const bool hidden = l + 1 < kNumLayers;
    const auto padded = padAll(cur);
    Tensor<std::int16_t> next(layer.outChannels, h, w);
    parallelFor(static_cast<std::size_t>(layer.outChannels), threads, [&](std::size_t oc) {
      const int o = static_cast<int>(oc);
      std::vector<std::int32_t> acc(static_cast<std::size_t>(h) * w, 0);
      for (int i = 0; i < layer.inChannels; ++i) {
        const auto& src = padded[i];
        for (int ky = 0; ky < kKernelSize; ++ky) {
          for (int kx = 0; kx < kKernelSize; ++kx) {
            const std::int32_t wt =
                layer.weights[((static_cast<std::size_t>(o) * layer.inChannels + i) * kKernelSize + ky) * kKernelSize + kx];
            // Adding zero never changes a saturated accumulator.
            if (wt == 0) continue;
            for (int y = 0; y < h; ++y) {
              const std::int16_t* s = src.data() + static_cast<std::size_t>(y + ky) * pw + kx;
              std::int32_t* a = acc.data() + static_cast<std::size_t>(y) * w;
              for (int x = 0; x < w; ++x) {
                const std::int64_t sum = static_cast<std::int64_t>(a[x]) + wt * static_cast<std::int32_t>(s[x]);
                a[x] = saturateInt32(sum);
              }
            }
          }
        }
      }
      const std::int32_t bias = layer.bias[o];
      auto out = next.channel(o);
      for (std::size_t k = 0; k < acc.size(); ++k) {
        const std::int32_t withBias = saturatingAdd(acc[k], bias);
        std::int16_t v = saturateInt16(roundShiftHalfUp(withBias, layer.shift));
        if (hidden && v < 0) v = 0;
        out[k] = v;
      }
    });
    cur = std::move(next);
  }
  return cur;
}

std::int16_t toFixedSample(int sample, int bitDepth, int fracBits) {
  const std::int64_t maxv = (std::int64_t{1} << bitDepth) - 1;
  return saturateInt16(divRoundHalfAway(static_cast<std::int64_t>(sample) << fracBits, maxv));
}

Tensor<std::int16_t> toFixedInput(std::span<const Plane> planes, int fracBits) {
  if (planes.empty()) throw Error("toFixedInput: no planes");
  const int h = planes[0].height();
  const int w = planes[0].width();
  Tensor<std::int16_t> t(static_cast<int>(planes.size()), h, w);
  for (std::size_t c = 0; c < planes.size(); ++c) {
    const auto& p = planes[c];
    if (p.width() != w || p.height() != h) throw Error("toFixedInput: plane size mismatch");
    // Small lookup table: sample values are bounded by the bit depth.
    std::vector<std::int16_t> lut(static_cast<std::size_t>(p.maxValue()) + 1);
    for (int v = 0; v <= p.maxValue(); ++v) lut[v] = toFixedSample(v, p.bitDepth(), fracBits);
    auto dst = t.channel(static_cast<int>(c));
    const auto src = p.samples().data();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = lut[src[k]];
  }
  return t;
}

Tensor<double> toFloatInput(std::span<const Plane> planes) {
  if (planes.empty()) throw Error("toFloatInput: no planes");
  const int h = planes[0].height();
  const int w = planes[0].width();
  Tensor<double> t(static_cast<int>(planes.size()), h, w);
  for (std::size_t c = 0; c < planes.size(); ++c) {
    const auto& p = planes[c];
    if (p.width() != w || p.height() != h) throw Error("toFloatInput: plane size mismatch");
    const double scale = 1.0 / p.maxValue();
    auto dst = t.channel(static_cast<int>(c));
    const auto src = p.samples().data();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k] * scale;
  }
  return t;
}

std::int64_t macPerPel(const NetworkSpec& net, int modelCount) {
  std::int64_t sum = 0;
  for (const auto& layer : net.layers) sum += static_cast<std::int64_t>(layer.inChannels) * layer.outChannels;
  return static_cast<std::int64_t>(modelCount) * kKernelTaps * sum;
}

std::int64_t macPerPel(Arch arch, Role role, int modelCount) {
  const auto ladder = channelLadder(arch, role);
  std::int64_t sum = 0;
  for (int l = 0; l < kNumLayers; ++l) sum += static_cast<std::int64_t>(ladder[l]) * ladder[l + 1];
  return static_cast<std::int64_t>(modelCount) * kKernelTaps * sum;
}

NetworkSpec passThroughNetwork(Arch arch, Role role) {
  NetworkSpec net = NetworkSpec::zeros(arch, role);
  // Luma routes Y through hidden channel 0; chroma routes U and V through hidden 0 and 1.
  const int routes = role == Role::Luma ? 1 : 2;
  const int firstInput = role == Role::Luma ? 0 : 1;
  for (int r = 0; r < routes; ++r) {
    net.layers.front().weight(r, firstInput + r, 1, 1) = 1.0;
    for (int l = 1; l < kNumLayers; ++l) net.layers[l].weight(r, r, 1, 1) = 1.0;
  }
  return net;
}

NetworkSpec constantNetwork(Arch arch, Role role, double value) {
  NetworkSpec net = NetworkSpec::zeros(arch, role);
  for (double& b : net.layers.back().bias) b = value;
  return net;
}

NetworkSpec affineNetwork(Arch arch, Role role, std::array<double, 2> gain, std::array<double, 2> bias) {
  NetworkSpec net = passThroughNetwork(arch, role);
  auto& last = net.layers.back();
  for (int r = 0; r < last.outChannels; ++r) {
    last.weight(r, r, 1, 1) = gain[r];
    last.bias[r] = bias[r];
  }
  return net;
}

NetworkSpec randomNetwork(Arch arch, Role role, std::uint64_t seed) {
  NetworkSpec net = NetworkSpec::zeros(arch, role);
  std::mt19937_64 rng(seed);
  // Explicit mapping to [-1, 1) keeps the weights identical across standard libraries.
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0; };
  for (auto& layer : net.layers) {
    const double bound = std::min(1.0, std::sqrt(6.0 / (layer.inChannels * kKernelTaps)));
    for (double& w : layer.weights) w = bound * uniform();
    for (double& b : layer.bias) b = 0.05 * uniform();
  }
  return net;
}

}  // namespace saocnn
