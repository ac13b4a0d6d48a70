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

// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "classic_oracle.hpp"
#include "cnn_oracle.hpp"
#include "saocnn/harness.hpp"
#include "saocnn/rdo.hpp"
#include "test_support.hpp"

namespace saocnn {
namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1 ---------------------------------------------------------------------------

Outcome macAccounting() {
  const std::int64_t v1 = macPerPel(Arch::V1, Role::Luma, 1);
  const std::int64_t v2 = macPerPel(Arch::V2, Role::Luma, 1);
  Outcome o;
  o.pass = v1 == 46368 && v2 == 14112 && std::abs(v1 - 50000) <= 5000 && std::abs(v2 - 15000) <= 1500;
  o.detail = fmt("v1 luma %lld, v2 luma %lld MAC/pel", static_cast<long long>(v1), static_cast<long long>(v2));
  return o;
}

// 2 ---------------------------------------------------------------------------

Outcome edgeTruthTable() {
  // Expected category per (sign(pc - p0), sign(pc - p1)), rows and columns ordered -1, 0, +1.
  constexpr int kTable[3][3] = {{1, 2, 0}, {2, 0, 3}, {0, 3, 4}};
  int mismatches = 0, patterns = 0;
  for (int p0 = 0; p0 < 3; ++p0)
    for (int pc = 0; pc < 3; ++pc)
      for (int p1 = 0; p1 < 3; ++p1) {
        ++patterns;
        const int s0 = (pc > p0) - (pc < p0), s1 = (pc > p1) - (pc < p1);
        if (eoCategory(p0, pc, p1) != kTable[s0 + 1][s1 + 1]) ++mismatches;
        if (eoCategory(p0 * 100, pc * 100, p1 * 100) != kTable[s0 + 1][s1 + 1]) ++mismatches;
      }
  return {mismatches == 0, fmt("%d patterns, %d mismatches", patterns, mismatches)};
}

// 3 ---------------------------------------------------------------------------

Outcome deltaDistortionIdentity() {
  std::mt19937_64 rng(3);
  int failures = 0, clippedFailures = 0;
  for (int i = 0; i < 1000; ++i) {
    const int bd = i % 2 ? 10 : 8;
    const int w = 4 + static_cast<int>(rng() % 29), h = 4 + static_cast<int>(rng() % 29);
    const Plane rec = testing::randomPlane(w, h, bd, rng);
    const Plane orig = testing::perturb(rec, 1 << (bd - 5), rng);
    const int cap = offsetCap(bd);
    const int off = static_cast<int>(rng() % (2 * cap + 1)) - cap;
    // Random class membership.
    std::vector<bool> member(static_cast<std::size_t>(w) * h);
    std::int64_t n = 0, e = 0, before = 0, afterRaw = 0, afterClipped = 0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const bool in = rng() % 3 == 0;
        const std::int64_t o = orig.at(x, y), r = rec.at(x, y);
        before += (o - r) * (o - r);
        if (!in) {
          afterRaw += (o - r) * (o - r);
          afterClipped += (o - r) * (o - r);
          continue;
        }
        ++n;
        e += o - r;
        afterRaw += (o - r - off) * (o - r - off);
        const std::int64_t f = std::clamp<std::int64_t>(r + off, 0, rec.maxValue());
        afterClipped += (o - f) * (o - f);
      }
    if (deltaDistortion(n, e, off) != afterRaw - before) ++failures;

    // Clipping-exact variant through the class statistics of a real BO band.
    const Rect region = rec.bounds();
    const auto classes = collectClassSamples(orig, rec, region, SaoMode::Bo, cap);
    const int band = static_cast<int>(rng() % kNumBands);
    std::int64_t b = 0, a = 0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::int64_t o = orig.at(x, y), r = rec.at(x, y);
        const std::int64_t f = boBand(static_cast<int>(r), bd) == band
                                   ? std::clamp<std::int64_t>(r + off, 0, rec.maxValue())
                                   : r;
        b += (o - r) * (o - r);
        a += (o - f) * (o - f);
      }
    if (clippedDeltaDistortion(classes[band], off, rec.maxValue()) != a - b) ++clippedFailures;
  }
  return {failures == 0 && clippedFailures == 0,
          fmt("1000 cases, %d unclipped and %d clipped mismatches", failures, clippedFailures)};
}

// 4 ---------------------------------------------------------------------------

Frame randomCtuContent(std::mt19937_64& rng, int trial) {
  switch (trial % 4) {
    case 0: {
      const auto orig = testing::smoothFrame(64, 64, 8, rng);
      return orig;
    }
    case 1:
      return testing::randomFrame(64, 64, 8, rng);
    case 2:
      return synthesize(Pattern::Edges, 64, 64, 8, rng());
    default:
      return synthesize(Pattern::Texture, 64, 64, 8, rng());
  }
}

Outcome classicOracle() {
  std::mt19937_64 rng(4);
  int keyMismatch = 0, paramMismatch = 0;
  const auto start = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 100; ++trial) {
    const Frame orig = randomCtuContent(rng, trial);
    Frame rec;
    switch (trial % 3) {
      case 0: rec = testing::perturbFrame(orig, 6, rng); break;
      case 1: rec = degrade(orig, 32 + static_cast<int>(rng() % 6)); break;
      default: rec = addBias(testing::perturbFrame(orig, 2, rng), static_cast<int>(rng() % 9) - 4); break;
    }
    const Lambda lambda = Lambda::fromQp(22 + static_cast<int>(rng() % 18));
    const Rect ctu{0, 0, 64, 64};
    const auto fast = rdoCtuClassic(orig, rec, ctu, nullptr, nullptr, lambda);

    // Exhaustive reference: OFF, then luma best plus the best shared chroma mode.
    const std::int64_t lf = lambda.fixed();
    const std::int64_t offKey = (ctuSse(orig, rec, ctu) << Lambda::kFracBits) + lf * 2;
    const Rect c = chromaRect(ctu);
    const auto luma = testing::oracleBestComponent(orig.y, rec.y, ctu, 0, lf, testing::allModes());
    std::int64_t chromaKey = 0;
    ClassicSaoParams bestU, bestV;
    bool have = false;
    for (SaoMode m : testing::allModes()) {
      const auto u = testing::oracleBestComponent(orig.u, rec.u, c, 1, lf, {m});
      const auto v = testing::oracleBestComponent(orig.v, rec.v, c, 2, lf, {m});
      if (!have || u.key + v.key < chromaKey) {
        chromaKey = u.key + v.key;
        bestU = u.params;
        bestV = v.params;
        have = true;
      }
    }
    const std::int64_t explicitKey = luma.key + chromaKey;
    ClassicCtuParams expected;
    std::int64_t expectedKey = offKey;
    if (explicitKey < offKey) {
      expected.comp = {luma.params, bestU, bestV};
      expectedKey = explicitKey;
    }
    if (fast.cost.key != expectedKey) ++keyMismatch;
    if (fast.params != expected) ++paramMismatch;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {keyMismatch == 0 && paramMismatch == 0,
          fmt("100 CTUs, %d cost and %d parameter mismatches (%.1f s)", keyMismatch, paramMismatch, secs)};
}

// 5 ---------------------------------------------------------------------------

Outcome integerInference() {
  double worst = 0.0;
  int nondeterministic = 0, oracleMismatch = 0;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const Arch arch = i % 2 ? Arch::V2 : Arch::V1;
    const Role role = (i / 2) % 2 ? Role::Chroma : Role::Luma;
    const auto net = randomNetwork(arch, role, 1000 + i);
    const auto q = quantize(net);
    const int bd = i % 3 ? 8 : 10;
    std::vector<Plane> planes;
    for (int c = 0; c < net.inputChannels(); ++c) planes.push_back(testing::smoothPlane(24, 20, bd, rng));
    const auto fl = inferFloat(net, toFloatInput(planes));
    const auto in = toFixedInput(planes, q.fracBits);
    const auto a = inferInt(q, in, 1);
    const auto b = inferInt(q, in, 1);
    const auto c = inferInt(q, in, 4);
    if (!(a == b) || !(a == c)) ++nondeterministic;
    if (!(a == testing::oracleInferInt(q, in))) ++oracleMismatch;
    for (std::size_t k = 0; k < a.data.size(); ++k)
      worst = std::max(worst, std::abs(a.data[k] / 4096.0 - fl.data[k]));
  }
  return {worst <= 0.02 && nondeterministic == 0 && oracleMismatch == 0,
          fmt("50 nets, max error %.5f, %d nondeterministic, %d differ from the reference loop", worst,
              nondeterministic, oracleMismatch)};
}

// Desk corpus shared by criteria 6, 7 and 8 ----------------------------------

struct CorpusRun {
  std::string label;
  Frame orig;
  Frame rec;
  int qp;
  const ModelBank* bank;
  EncoderConfig cfg;
};

std::vector<CorpusRun> deskCorpus(const ModelBank& bank) {
  struct Seq {
    const char* name;
    Pattern pattern;
    int width, height, bitDepth;
  };
  const Seq seqs[] = {{"gradient", Pattern::Gradient, 96, 64, 8},
                      {"edges", Pattern::Edges, 80, 72, 10},
                      {"texture", Pattern::Texture, 100, 60, 8}};
  std::vector<CorpusRun> runs;
  for (const auto& s : seqs) {
    const Frame orig = synthesize(s.pattern, s.width, s.height, s.bitDepth, 6);
    for (int qp : kBankQps) {
      const Frame rec = degrade(orig, qp);
      for (auto family : {FilterFamily::Classic, FilterFamily::Cnn}) {
        EncoderConfig cfg;
        cfg.family = family;
        cfg.qp = qp;
        cfg.ctuSize = 32;
        cfg.lumaModels = family == FilterFamily::Cnn ? 2 : 1;
        runs.push_back({fmt("%s qp%d %s", s.name, qp, family == FilterFamily::Cnn ? "cnn" : "classic"), orig, rec, qp,
                        family == FilterFamily::Cnn ? &bank : nullptr, cfg});
      }
    }
  }
  return runs;
}

Outcome conformanceRoundTrip(const std::vector<CorpusRun>& corpus) {
  int failures = 0;
  std::string first;
  for (const auto& run : corpus) {
    const auto res = rdoPicture(run.orig, run.rec, run.bank, run.cfg);
    const auto pics = readStream(res.stream);
    const bool ok = pics.size() == 1 && testing::sameFrame(applyPicture(run.rec, pics[0], run.bank), res.filtered);
    if (!ok) {
      ++failures;
      if (first.empty()) first = ", first failure: " + run.label;
    }
  }
  return {failures == 0, fmt("%zu encodes, %d mismatching decodes%s", corpus.size(), failures, first.c_str())};
}

Outcome neverWorse(const std::vector<CorpusRun>& corpus) {
  std::size_t ctus = 0;
  int worse = 0, zeroLambdaWorse = 0;
  for (const auto& run : corpus) {
    const auto res = rdoPicture(run.orig, run.rec, run.bank, run.cfg);
    for (const auto& c : res.report.ctus) {
      ++ctus;
      if (c.cost.key > c.offCost.key || c.cost.j > c.offCost.j + 1e-6) ++worse;
    }
    auto free = run.cfg;
    free.lambda = 0.0;
    const auto res0 = rdoPicture(run.orig, run.rec, run.bank, free);
    for (const auto& c : res0.report.ctus)
      if (ctuSse(run.orig, res0.filtered, c.rect) > ctuSse(run.orig, run.rec, c.rect)) ++zeroLambdaWorse;
  }
  return {worse == 0 && zeroLambdaWorse == 0,
          fmt("%zu CTUs, %d with J > J(OFF), %d with higher SSE at lambda 0", ctus, worse, zeroLambdaWorse)};
}

Outcome rateExactness(const std::vector<CorpusRun>& corpus) {
  std::size_t ctus = 0;
  int mismatches = 0;
  for (const auto& run : corpus) {
    const auto res = rdoPicture(run.orig, run.rec, run.bank, run.cfg);
    std::vector<std::size_t> written, parsed;
    writePicture(res.params, &written);
    std::size_t offset = 0;
    readPicture(res.stream, offset, &parsed);
    const auto& h = res.params.header;
    const auto grid = ctuPartition(h.width, h.height, h.ctuSize);
    for (std::size_t i = 0; i < grid.count(); ++i) {
      ++ctus;
      const bool hasLeft = i % grid.columns != 0;
      const bool hasUp = i >= static_cast<std::size_t>(grid.columns);
      std::size_t predicted = 0;
      if (h.family == FilterFamily::Cnn) {
        const auto& p = res.params.cnn;
        predicted = cnnCtuBits(p[i], hasLeft ? &p[i - 1] : nullptr, hasUp ? &p[i - grid.columns] : nullptr, h);
      } else {
        const auto& p = res.params.classic;
        predicted =
            classicCtuBits(p[i], hasLeft ? &p[i - 1] : nullptr, hasUp ? &p[i - grid.columns] : nullptr, h.bitDepth);
      }
      const auto reported = static_cast<std::size_t>(res.report.ctus[i].cost.r);
      if (predicted != written[i] || predicted != parsed[i] || predicted != reported) ++mismatches;
    }
  }
  return {mismatches == 0, fmt("%zu CTUs, %d bit count mismatches", ctus, mismatches)};
}

// 9 ---------------------------------------------------------------------------

Outcome bdRateOracle() {
  const std::vector<RdPoint> anchor{{1000, 30.0}, {1800, 32.5}, {3300, 35.0}, {6100, 37.5}};
  auto shifted = [&](double f) {
    auto t = anchor;
    for (auto& p : t) p.rate *= f;
    return t;
  };
  const double same = bdRate(anchor, anchor);
  const double down = bdRate(anchor, shifted(0.9));
  const double up = bdRate(anchor, shifted(1.0 / 0.9));
  const bool sameOk = fmt("%.3f", same) == "0.000" || fmt("%.3f", same) == "-0.000";
  return {sameOk && std::abs(down + 10.0) <= 1e-6 && std::abs(up - 100.0 / 9.0) <= 1e-4,
          fmt("identical %.3f%%, 0.9x %.6f%%, 1/0.9x %.4f%%", std::abs(same), down, up)};
}

// 10 --------------------------------------------------------------------------

std::vector<std::pair<std::string, Frame>> fixtureResiduals(const Frame& degraded) {
  return {{"bias -3", addBias(degraded, -3)}, {"bias +4", addBias(degraded, 4)}, {"gradient", addGain(degraded, 0.04)}};
}

Outcome endToEndImprovement() {
  // Training fixtures and evaluation fixtures use different content seeds.
  std::vector<FixturePair> training;
  for (int qp : kBankQps)
    for (auto pattern : {Pattern::Gradient, Pattern::Texture})
      for (const auto& [name, rec] : fixtureResiduals(degrade(synthesize(pattern, 64, 64, 8, 100), qp)))
        training.push_back({qp, synthesize(pattern, 64, 64, 8, 100), rec});
  const auto bank = fitAffineBank(Arch::V2, training, 2);

  int worse = 0, cases = 0;
  double minGain = 1e9;
  for (int qp : kBankQps) {
    for (auto pattern : {Pattern::Gradient, Pattern::Texture}) {
      const Frame orig = synthesize(pattern, 96, 64, 8, 200);
      for (const auto& [name, rec] : fixtureResiduals(degrade(orig, qp))) {
        EncoderConfig cfg;
        cfg.family = FilterFamily::Cnn;
        cfg.qp = qp;
        cfg.ctuSize = 32;
        const auto res = rdoPicture(orig, rec, &bank, cfg);
        for (int c = 0; c < 3; ++c) {
          ++cases;
          const auto& before = res.report.psnrBefore[c];
          const auto& after = res.report.psnrAfter[c];
          if (after < before) ++worse;
          if (!after.isLossless() && !before.isLossless()) minGain = std::min(minGain, after.db() - before.db());
        }
      }
    }
  }
  return {worse == 0, fmt("%d plane results over qp 22..37, %d worse, smallest gain %.3f dB", cases, worse, minGain)};
}

}  // namespace
}  // namespace saocnn

int main() {
  using namespace saocnn;
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const auto bank = fixtureBank(Arch::V2, 2);
  const auto corpus = deskCorpus(bank);
  const Criterion criteria[] = {
      {1, "MAC accounting", macAccounting},
      {2, "edge category truth table", edgeTruthTable},
      {3, "distortion change identity", deltaDistortionIdentity},
      {4, "classic SAO exhaustive oracle", classicOracle},
      {5, "integer inference accuracy and determinism", integerInference},
      {6, "encoder/decoder round trip", [&] { return conformanceRoundTrip(corpus); }},
      {7, "never-worse RDO", [&] { return neverWorse(corpus); }},
      {8, "rate exactness", [&] { return rateExactness(corpus); }},
      {9, "BD-rate oracle", bdRateOracle},
      {10, "end-to-end improvement", endToEndImprovement},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
