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

#include "saocnn/harness.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <random>
#include <sstream>

#include "saocnn/bitstream.hpp"
#include "saocnn/cnn_io.hpp"
#include "saocnn/parallel.hpp"

namespace saocnn {

using json = nlohmann::ordered_json;

namespace {

template <typename... Args>
std::string format(const char* fmt, Args... args) {
  const int n = std::snprintf(nullptr, 0, fmt, args...);
  std::string s(static_cast<std::size_t>(n) + 1, '\0');
  std::snprintf(s.data(), s.size(), fmt, args...);
  s.resize(static_cast<std::size_t>(n));
  return s;
}

using Block = std::array<std::array<double, 8>, 8>;

const Block& dctBasis() {
  static const Block basis = [] {
    Block b{};
    for (int k = 0; k < 8; ++k) {
      const double a = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int n = 0; n < 8; ++n) b[k][n] = a * std::cos(std::numbers::pi * (2 * n + 1) * k / 16.0);
    }
    return b;
  }();
  return basis;
}

// out = B * in * B^T
Block forward(const Block& in) {
  const auto& b = dctBasis();
  Block tmp{}, out{};
  for (int k = 0; k < 8; ++k)
    for (int x = 0; x < 8; ++x)
      for (int y = 0; y < 8; ++y) tmp[k][x] += b[k][y] * in[y][x];
  for (int k = 0; k < 8; ++k)
    for (int l = 0; l < 8; ++l)
      for (int x = 0; x < 8; ++x) out[k][l] += tmp[k][x] * b[l][x];
  return out;
}

// out = B^T * in * B
Block inverse(const Block& in) {
  const auto& b = dctBasis();
  Block tmp{}, out{};
  for (int y = 0; y < 8; ++y)
    for (int l = 0; l < 8; ++l)
      for (int k = 0; k < 8; ++k) tmp[y][l] += b[k][y] * in[k][l];
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x)
      for (int l = 0; l < 8; ++l) out[y][x] += tmp[y][l] * b[l][x];
  return out;
}

std::int64_t degradePlane(const Plane& in, double step, Plane& out) {
  std::int64_t bits = 0;
  const int maxv = in.maxValue();
  for (int by = 0; by < in.height(); by += 8) {
    for (int bx = 0; bx < in.width(); bx += 8) {
      Block blk{};
      for (int y = 0; y < 8 && by + y < in.height(); ++y)
        for (int x = 0; x < 8 && bx + x < in.width(); ++x) blk[y][x] = in.at(bx + x, by + y);
      Block coef = forward(blk);
      for (auto& row : coef) {
        for (double& c : row) {
          const double level = std::round(c / step);
          bits += seLength(static_cast<std::int32_t>(level));
          c = level * step;
        }
      }
      const Block rec = inverse(coef);
      for (int y = 0; y < 8 && by + y < in.height(); ++y)
        for (int x = 0; x < 8 && bx + x < in.width(); ++x)
          out.at(bx + x, by + y) = static_cast<std::uint16_t>(std::clamp<double>(std::round(rec[y][x]), 0, maxv));
    }
  }
  return bits;
}

}  // namespace

double quantStep(int qp) {
  if (qp < 0) throw Error("qp must be non-negative");
  return std::pow(2.0, (qp - 4) / 6.0);
}

DegradeResult degradeWithRate(const Frame& frame, int qp) {
  const double step = quantStep(qp);
  DegradeResult r{frame, 0};
  for (auto c : {Component::Y, Component::U, Component::V})
    r.coefBits += degradePlane(frame.plane(c), step, r.frame.plane(c));
  return r;
}

Frame degrade(const Frame& frame, int qp, std::uint64_t /*seed*/) { return degradeWithRate(frame, qp).frame; }

// ---------------------------------------------------------------------------

namespace {

std::vector<RdPoint> checkedCurve(std::span<const RdPoint> pts, const char* name) {
  if (pts.size() < 4) throw Error(std::string(name) + " curve needs at least 4 points");
  std::vector<RdPoint> v(pts.begin(), pts.end());
  for (const auto& p : v)
    if (!(p.rate > 0.0) || !std::isfinite(p.rate) || !std::isfinite(p.psnr))
      throw Error(std::string(name) + " curve has a non-positive rate or non-finite value");
  std::sort(v.begin(), v.end(), [](const RdPoint& a, const RdPoint& b) { return a.rate < b.rate; });
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i].rate > v[i - 1].rate) || !(v[i].psnr > v[i - 1].psnr))
      throw Error(std::string(name) + " curve is not monotone");
  return v;
}

Eigen::Vector4d fitCubic(const std::vector<RdPoint>& pts, double center, double scale) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(pts.size()), 4);
  Eigen::VectorXd b(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double t = (pts[i].psnr - center) / scale;
    const auto r = static_cast<Eigen::Index>(i);
    a(r, 0) = 1.0;
    a(r, 1) = t;
    a(r, 2) = t * t;
    a(r, 3) = t * t * t;
    b(r) = std::log10(pts[i].rate);
  }
  return a.colPivHouseholderQr().solve(b);
}

double integrate(const Eigen::Vector4d& p, double lo, double hi) {
  double s = 0.0;
  for (int k = 0; k < 4; ++k) s += p(k) * (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / (k + 1);
  return s;
}

}  // namespace

double bdRate(std::span<const RdPoint> anchor, std::span<const RdPoint> test) {
  const auto a = checkedCurve(anchor, "anchor");
  const auto t = checkedCurve(test, "test");
  const double lo = std::max(a.front().psnr, t.front().psnr);
  const double hi = std::min(a.back().psnr, t.back().psnr);
  if (!(hi > lo)) throw Error("BD-rate: empty PSNR overlap");
  const double center = 0.5 * (lo + hi);
  const double scale = 0.5 * (hi - lo);
  const auto pa = fitCubic(a, center, scale);
  const auto pt = fitCubic(t, center, scale);
  const double avg = (integrate(pt, -1.0, 1.0) - integrate(pa, -1.0, 1.0)) / 2.0;
  return (std::pow(10.0, avg) - 1.0) * 100.0;
}

// ---------------------------------------------------------------------------

std::string_view toString(Pattern p) {
  switch (p) {
    case Pattern::Gradient: return "gradient";
    case Pattern::Noise: return "noise";
    case Pattern::Edges: return "edges";
    case Pattern::Texture: return "texture";
  }
  return "?";
}

Pattern patternFromString(std::string_view name) {
  for (auto p : {Pattern::Gradient, Pattern::Noise, Pattern::Edges, Pattern::Texture})
    if (toString(p) == name) return p;
  throw Error("unknown pattern: " + std::string(name));
}

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void fillPlane(Plane& plane, Pattern pattern, std::mt19937_64& rng) {
  const int w = plane.width();
  const int h = plane.height();
  const double maxv = plane.maxValue();
  auto put = [&](int x, int y, double v) {
    plane.at(x, y) = static_cast<std::uint16_t>(std::clamp(std::round(v * maxv), 0.0, maxv));
  };
  const double fx = (1.0 + 3.0 * unit(rng)) / w;
  const double fy = (1.0 + 3.0 * unit(rng)) / h;
  const double phase = 2.0 * std::numbers::pi * unit(rng);
  auto smooth = [&](int x, int y) {
    return 0.45 + 0.3 * std::sin(2.0 * std::numbers::pi * (x * fx + y * fy) + phase) + 0.2 * (x + y) / (w + h);
  };
  switch (pattern) {
    case Pattern::Gradient:
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) put(x, y, smooth(x, y));
      break;
    case Pattern::Noise:
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) put(x, y, unit(rng));
      break;
    case Pattern::Edges: {
      const double bg = 0.2 + 0.6 * unit(rng);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) put(x, y, bg);
      const int shapes = 6 + static_cast<int>(rng() % 6);
      for (int s = 0; s < shapes; ++s) {
        const double level = unit(rng);
        const double cx = unit(rng) * w, cy = unit(rng) * h;
        const double rx = (0.05 + 0.25 * unit(rng)) * w, ry = (0.05 + 0.25 * unit(rng)) * h;
        const bool disk = (rng() & 1) != 0;
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) {
            const double dx = (x - cx) / rx, dy = (y - cy) / ry;
            const bool inside = disk ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
            if (inside) put(x, y, level);
          }
        }
      }
      break;
    }
    case Pattern::Texture: {
      const double period = 3.0 + 5.0 * unit(rng);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          put(x, y, smooth(x, y) + 0.08 * std::sin(2.0 * std::numbers::pi * x / period) + 0.06 * (unit(rng) - 0.5));
      break;
    }
  }
}

Frame mapFrame(const Frame& frame, auto&& fn) {
  Frame out = frame;
  for (auto c : {Component::Y, Component::U, Component::V}) {
    auto& p = out.plane(c);
    const int maxv = p.maxValue();
    for (int y = 0; y < p.height(); ++y)
      for (int x = 0; x < p.width(); ++x) p.at(x, y) = static_cast<std::uint16_t>(std::clamp(fn(int{p.at(x, y)}), 0, maxv));
  }
  return out;
}

}  // namespace

Frame synthesize(Pattern pattern, int width, int height, int bitDepth, std::uint64_t seed) {
  Frame f(width, height, bitDepth);
  std::mt19937_64 rng(seed);
  for (auto c : {Component::Y, Component::U, Component::V}) fillPlane(f.plane(c), pattern, rng);
  return f;
}

Frame addBias(const Frame& frame, int delta) {
  return mapFrame(frame, [delta](int v) { return v + delta; });
}

Frame addGain(const Frame& frame, double gain) {
  return mapFrame(frame, [gain](int v) { return v - static_cast<int>(std::lround(gain * v)); });
}

// ---------------------------------------------------------------------------

ModelBank fixtureBank(Arch arch, int candidateCount, int fracBits) {
  auto net = [&](Role role, bool passThrough) {
    return std::make_shared<const QuantizedNetwork>(
        quantize(passThrough ? passThroughNetwork(arch, role) : constantNetwork(arch, role, 1.0), fracBits));
  };
  const auto lumaPass = net(Role::Luma, true), chromaPass = net(Role::Chroma, true);
  const auto lumaConst = net(Role::Luma, false), chromaConst = net(Role::Chroma, false);
  ModelBank bank;
  bank.candidateCount = candidateCount;
  for (auto mode : {SliceMode::Intra, SliceMode::Inter}) {
    for (auto sc : {SizeClass::AB, SizeClass::CD}) {
      for (int qp : kBankQps) {
        const bool pass = qp == 22 || qp == 32;
        bank.entries.push_back({mode, sc, qp, pass ? lumaPass : lumaConst, pass ? chromaPass : chromaConst});
      }
    }
  }
  return bank;
}

namespace {

struct AffineFit {
  double sxx = 0, sx = 0, n = 0, sxr = 0, sr = 0;

  void add(const Plane& orig, const Plane& rec) {
    const double scale = 1.0 / rec.maxValue();
    for (int y = 0; y < rec.height(); ++y)
      for (int x = 0; x < rec.width(); ++x) {
        const double v = rec.at(x, y) * scale;
        const double r = (static_cast<int>(orig.at(x, y)) - static_cast<int>(rec.at(x, y))) * scale;
        sxx += v * v;
        sx += v;
        n += 1;
        sxr += v * r;
        sr += r;
      }
  }

  /// (gain, bias) with max |gain * x + bias| over [0, 1] equal to 1.
  std::pair<double, double> solve() const {
    double a = 0.0, b = 0.0;
    const double det = sxx * n - sx * sx;
    if (n > 0 && std::abs(det) > 1e-9 * std::max(1.0, sxx * n)) {
      a = (sxr * n - sx * sr) / det;
      b = (sxx * sr - sx * sxr) / det;
    } else if (n > 0) {
      b = sr / n;
    }
    const double peak = std::max(std::abs(b), std::abs(a + b));
    if (peak < 1e-12) return {0.0, 1.0};
    return {a / peak, b / peak};
  }
};

}  // namespace

ModelBank fitAffineBank(Arch arch, std::span<const FixturePair> fixtures, int candidateCount, int fracBits) {
  ModelBank bank;
  bank.candidateCount = candidateCount;
  std::vector<std::pair<std::shared_ptr<const QuantizedNetwork>, std::shared_ptr<const QuantizedNetwork>>> nets;
  for (int qp : kBankQps) {
    std::array<AffineFit, 3> fit;
    bool any = false;
    for (const auto& f : fixtures) {
      if (f.qp != qp) continue;
      any = true;
      for (int c = 0; c < 3; ++c) {
        const auto comp = static_cast<Component>(c);
        fit[c].add(f.orig.plane(comp), f.rec.plane(comp));
      }
    }
    if (!any) throw Error("fitAffineBank: no fixture for qp " + std::to_string(qp));
    const auto [gy, by] = fit[0].solve();
    const auto [gu, bu] = fit[1].solve();
    const auto [gv, bv] = fit[2].solve();
    nets.emplace_back(
        std::make_shared<const QuantizedNetwork>(quantize(affineNetwork(arch, Role::Luma, {gy, 0.0}, {by, 0.0}), fracBits)),
        std::make_shared<const QuantizedNetwork>(quantize(affineNetwork(arch, Role::Chroma, {gu, gv}, {bu, bv}), fracBits)));
  }
  for (auto mode : {SliceMode::Intra, SliceMode::Inter})
    for (auto sc : {SizeClass::AB, SizeClass::CD})
      for (std::size_t q = 0; q < kBankQps.size(); ++q)
        bank.entries.push_back({mode, sc, kBankQps[q], nets[q].first, nets[q].second});
  return bank;
}

namespace {

std::shared_ptr<const QuantizedNetwork> loadNetwork(const std::filesystem::path& path, int fracBits) {
  const auto ext = path.extension().string();
  if (ext == ".saoq") return std::make_shared<const QuantizedNetwork>(readSaoq(path));
  if (ext == ".saow") return std::make_shared<const QuantizedNetwork>(quantize(readSaow(path), fracBits));
  throw Error("unknown network file type: " + path.string());
}

SliceMode sliceModeFrom(const std::string& s) {
  if (s == "intra") return SliceMode::Intra;
  if (s == "inter") return SliceMode::Inter;
  throw Error("bank.json: bad mode '" + s + "'");
}

SizeClass sizeClassFrom(const std::string& s) {
  if (s == "AB") return SizeClass::AB;
  if (s == "CD") return SizeClass::CD;
  throw Error("bank.json: bad size_class '" + s + "'");
}

}  // namespace

ModelBank loadBankDir(const std::filesystem::path& dir) {
  const auto manifest = dir / "bank.json";
  std::ifstream in(manifest);
  if (!in) throw Error("cannot open " + manifest.string());
  json doc;
  try {
    doc = json::parse(in);
    ModelBank bank;
    bank.candidateCount = doc.at("k").get<int>();
    bank.sizeClassThreshold = doc.value("size_class_threshold", 1920);
    const int frac = doc.value("frac_bits", kDefaultFracBits);
    for (const auto& e : doc.at("entries")) {
      BankEntry entry;
      entry.mode = sliceModeFrom(e.at("mode").get<std::string>());
      entry.sizeClass = sizeClassFrom(e.at("size_class").get<std::string>());
      entry.qp = e.at("qp").get<int>();
      entry.luma = loadNetwork(dir / e.at("luma").get<std::string>(), frac);
      entry.chroma = loadNetwork(dir / e.at("chroma").get<std::string>(), frac);
      bank.entries.push_back(std::move(entry));
    }
    bank.validate();
    return bank;
  } catch (const json::exception& e) {
    throw Error("bank.json: " + std::string(e.what()));
  }
}

void saveBankDir(const ModelBank& bank, const std::filesystem::path& dir) {
  bank.validate();
  std::filesystem::create_directories(dir);
  json doc;
  doc["k"] = bank.candidateCount;
  doc["size_class_threshold"] = bank.sizeClassThreshold;
  doc["frac_bits"] = bank.fracBits();
  doc["entries"] = json::array();
  for (const auto& e : bank.entries) {
    const std::string stem = format("%s_%s_%d", std::string(toString(e.mode)).c_str(),
                                    std::string(toString(e.sizeClass)).c_str(), e.qp);
    writeSaoq(*e.luma, dir / (stem + "_luma.saoq"));
    writeSaoq(*e.chroma, dir / (stem + "_chroma.saoq"));
    doc["entries"].push_back({{"mode", toString(e.mode)},
                              {"size_class", toString(e.sizeClass)},
                              {"qp", e.qp},
                              {"luma", stem + "_luma.saoq"},
                              {"chroma", stem + "_chroma.saoq"}});
  }
  std::ofstream out(dir / "bank.json");
  out << doc.dump(2) << '\n';
  if (!out) throw Error("cannot write " + (dir / "bank.json").string());
}

// ---------------------------------------------------------------------------

namespace {

RunRecord runOne(const Sequence& seq, int qp, const ExperimentConfig& cfg, const ModelBank* bank) {
  RunRecord rec;
  rec.sequence = seq.name;
  rec.cls = seq.cls;
  rec.qp = qp;
  EncoderConfig enc = cfg.encoder;
  enc.qp = qp;
  for (const auto& orig : seq.frames) {
    const auto degraded = degradeWithRate(orig, qp);
    const auto result = rdoPicture(orig, degraded.frame, bank, enc);
    rec.paramBits += static_cast<std::int64_t>(result.stream.size()) * 8;
    rec.coefBits += degraded.coefBits;
    for (int c = 0; c < 3; ++c) {
      const auto comp = static_cast<Component>(c);
      auto& s = rec.components[c];
      s.bitDepth = orig.bitDepth();
      s.sseBefore += sse(orig.plane(comp), degraded.frame.plane(comp));
      s.sseAfter += sse(orig.plane(comp), result.filtered.plane(comp));
      s.samples += static_cast<std::int64_t>(orig.plane(comp).width()) * orig.plane(comp).height();
    }
    std::int64_t chosen = 0, off = 0;
    for (const auto& line : result.report.ctus) {
      chosen += line.cost.key;
      off += line.offCost.key;
      ++rec.modeHistogram[0][line.modes[0]];
      ++rec.modeHistogram[1][line.modes[1]];
    }
    rec.ctuCount += static_cast<std::int64_t>(result.report.ctus.size());
    rec.chosenKeySum += chosen;
    rec.offKeySum += off;
    rec.neverWorse = rec.neverWorse && chosen <= off;
  }
  return rec;
}

json psnrJson(const Psnr& p) { return p.isLossless() ? json("lossless") : json(p.db()); }

}  // namespace

ExperimentReport runExperiment(const std::vector<Sequence>& sequences, const ExperimentConfig& config,
                               const ModelBank* bank) {
  if (config.qps.empty()) throw Error("experiment needs at least one qp");
  ExperimentReport report;
  report.arch = config.arch;
  report.lumaModels = config.encoder.lumaModels;
  report.family = config.encoder.family;
  const std::size_t nq = config.qps.size();
  report.runs.resize(sequences.size() * nq);
  parallelFor(report.runs.size(), config.threads, [&](std::size_t i) {
    report.runs[i] = runOne(sequences[i / nq], config.qps[i % nq], config, bank);
  });

  for (std::size_t s = 0; s < sequences.size(); ++s) {
    BdRateRow row;
    row.sequence = sequences[s].name;
    for (int c = 0; c < 3; ++c) {
      std::vector<RdPoint> anchor, test;
      bool lossless = false;
      for (std::size_t q = 0; q < nq; ++q) {
        const auto& run = report.runs[s * nq + q];
        const auto before = run.components[c].psnrBefore();
        const auto after = run.components[c].psnrAfter();
        if (before.isLossless() || after.isLossless()) {
          lossless = true;
          break;
        }
        anchor.push_back({static_cast<double>(run.coefBits), before.db()});
        test.push_back({static_cast<double>(run.coefBits + run.paramBits), after.db()});
      }
      if (lossless) {
        row.note[c] = "lossless point";
        continue;
      }
      try {
        row.percent[c] = bdRate(anchor, test);
      } catch (const Error& e) {
        row.note[c] = e.what();
      }
    }
    report.bdRates.push_back(std::move(row));
  }
  return report;
}

namespace {

constexpr const char* kReportNote =
    "Reconstructions come from an 8x8 DCT quantisation simulator, not a video codec; "
    "rates are simulator coefficient bits plus filter parameter bits. "
    "BD-rates here are not comparable to full-codec results.";

constexpr std::array<const char*, 3> kComponentNames{"Y", "U", "V"};

}  // namespace

std::string experimentJson(const ExperimentReport& report) {
  json doc;
  doc["note"] = kReportNote;
  doc["family"] = report.family == FilterFamily::Cnn ? "cnn" : "classic";
  doc["results"] = json::array();
  for (const auto& run : report.runs) {
    for (int c = 0; c < 3; ++c) {
      json hist = json::object();
      for (const auto& [k, v] : run.modeHistogram[c == 0 ? 0 : 1]) hist[k] = v;
      doc["results"].push_back({{"sequence", run.sequence},
                                {"class", run.cls},
                                {"qp", run.qp},
                                {"component", kComponentNames[c]},
                                {"psnr_before", psnrJson(run.components[c].psnrBefore())},
                                {"psnr_after", psnrJson(run.components[c].psnrAfter())},
                                {"param_bits", run.paramBits},
                                {"coef_bits", run.coefBits},
                                {"ctus", run.ctuCount},
                                {"never_worse", run.neverWorse},
                                {"mode_histogram", hist}});
    }
  }
  doc["bd_rate"] = json::array();
  for (const auto& row : report.bdRates) {
    json entry{{"sequence", row.sequence}};
    for (int c = 0; c < 3; ++c) {
      entry[kComponentNames[c]] = row.percent[c] ? json(*row.percent[c]) : json(nullptr);
      if (!row.note[c].empty()) entry[std::string(kComponentNames[c]) + "_note"] = row.note[c];
    }
    doc["bd_rate"].push_back(entry);
  }
  json mac;
  for (auto arch : {Arch::V1, Arch::V2}) {
    const std::string name = arch == Arch::V1 ? "v1" : "v2";
    mac[name] = {{"luma", macPerPel(arch, Role::Luma, report.lumaModels)}, {"chroma", macPerPel(arch, Role::Chroma)}};
  }
  doc["mac_per_pel"] = {{"M", report.lumaModels}, {"selected_arch", report.arch == Arch::V1 ? "v1" : "v2"}, {"models", mac}};
  return doc.dump(2) + "\n";
}

std::string macSummary(int lumaModels) {
  std::string s = format("%-22s %12s %12s\n", "MAC / pel", "v1", "v2");
  s += format("%-22s %12lld %12lld\n", format("luma (M=%d)", lumaModels).c_str(),
              static_cast<long long>(macPerPel(Arch::V1, Role::Luma, lumaModels)),
              static_cast<long long>(macPerPel(Arch::V2, Role::Luma, lumaModels)));
  s += format("%-22s %12lld %12lld\n", "chroma", static_cast<long long>(macPerPel(Arch::V1, Role::Chroma)),
              static_cast<long long>(macPerPel(Arch::V2, Role::Chroma)));
  return s;
}

std::string experimentTable(const ExperimentReport& report) {
  auto db = [](const Psnr& p) { return p.isLossless() ? std::string("lossless") : format("%.4f", p.db()); };
  std::string s = std::string("# ") + kReportNote + "\n\n";
  s += format("%-20s %-8s %4s %12s %12s  %-10s %-10s %-10s %-10s %-10s %-10s\n", "sequence", "class", "qp",
              "param_bits", "coef_bits", "Y_before", "Y_after", "U_before", "U_after", "V_before", "V_after");
  for (const auto& run : report.runs) {
    s += format("%-20s %-8s %4d %12lld %12lld", run.sequence.c_str(), run.cls.c_str(), run.qp,
                static_cast<long long>(run.paramBits), static_cast<long long>(run.coefBits));
    for (const auto& c : run.components)
      s += format("  %-10s %-10s", db(c.psnrBefore()).c_str(), db(c.psnrAfter()).c_str());
    s += run.neverWorse ? "\n" : "  J>J(OFF)!\n";
  }

  // Mean PSNR gain per class and overall, lossless runs excluded.
  std::map<std::string, std::array<std::pair<double, int>, 3>> gains;
  for (const auto& run : report.runs) {
    for (int c = 0; c < 3; ++c) {
      const auto b = run.components[c].psnrBefore(), a = run.components[c].psnrAfter();
      if (b.isLossless() || a.isLossless()) continue;
      for (const auto& key : {run.cls, std::string("overall")}) {
        gains[key][c].first += a.db() - b.db();
        ++gains[key][c].second;
      }
    }
  }
  s += format("\n%-20s %12s %12s %12s\n", "mean dPSNR (dB)", "Y", "U", "V");
  auto gainRow = [&](const std::string& key) {
    const auto& g = gains[key];
    s += format("%-20s", key.c_str());
    for (const auto& [sum, n] : g) s += n ? format(" %12.4f", sum / n) : format(" %12s", "-");
    s += "\n";
  };
  for (const auto& [key, _] : gains)
    if (key != "overall") gainRow(key);
  if (gains.contains("overall")) gainRow("overall");

  s += format("\n%-20s %12s %12s %12s\n", "BD-rate (%)", "Y", "U", "V");
  for (const auto& row : report.bdRates) {
    s += format("%-20s", row.sequence.c_str());
    for (const auto& p : row.percent) s += p ? format(" %12.3f", *p) : format(" %12s", "n/a");
    s += "\n";
  }
  s += "\n" + macSummary(report.lumaModels);
  return s;
}

}  // namespace saocnn
