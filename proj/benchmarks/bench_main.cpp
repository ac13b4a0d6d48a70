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

#include <benchmark/benchmark.h>

#include <random>

#include "saocnn/harness.hpp"
#include "saocnn/rdo.hpp"

namespace saocnn {
namespace {

Tensor<std::int16_t> lumaInput(int size) {
  const auto f = synthesize(Pattern::Texture, size, size, 8, 1);
  const std::array<Plane, 1> planes{f.y};
  return toFixedInput(planes, kDefaultFracBits);
}

void BM_InferInt(benchmark::State& state) {
  const auto arch = state.range(0) == 1 ? Arch::V1 : Arch::V2;
  const auto net = quantize(randomNetwork(arch, Role::Luma, 7));
  const auto input = lumaInput(128);
  for (auto _ : state) benchmark::DoNotOptimize(inferInt(net, input));
  state.SetItemsProcessed(state.iterations() * 128 * 128);
}
BENCHMARK(BM_InferInt)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_ClassicApply(benchmark::State& state) {
  const auto f = synthesize(Pattern::Edges, 128, 128, 10, 2);
  ClassicSaoParams p;
  p.mode = static_cast<SaoMode>(state.range(0));
  p.offsets = p.mode == SaoMode::Bo ? std::array<int, 4>{3, -2, 1, -1} : std::array<int, 4>{3, 1, -1, -3};
  p.bandPos = 10;
  for (auto _ : state) benchmark::DoNotOptimize(applyClassicSao(f.y, p));
  state.SetItemsProcessed(state.iterations() * 128 * 128);
}
BENCHMARK(BM_ClassicApply)->Arg(static_cast<int>(SaoMode::Eo135))->Arg(static_cast<int>(SaoMode::Bo));

void BM_RdoCtuClassic(benchmark::State& state) {
  const auto orig = synthesize(Pattern::Texture, 128, 128, 8, 3);
  const auto rec = degrade(orig, 37);
  const Lambda lambda = Lambda::fromQp(37);
  for (auto _ : state)
    benchmark::DoNotOptimize(rdoCtuClassic(orig, rec, Rect{0, 0, 128, 128}, nullptr, nullptr, lambda));
}
BENCHMARK(BM_RdoCtuClassic)->Unit(benchmark::kMillisecond);

void BM_Degrade(benchmark::State& state) {
  const auto f = synthesize(Pattern::Gradient, 256, 256, 8, 4);
  for (auto _ : state) benchmark::DoNotOptimize(degradeWithRate(f, 32));
}
BENCHMARK(BM_Degrade)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace saocnn

BENCHMARK_MAIN();
