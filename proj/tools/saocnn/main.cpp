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

// saocnn: command-line front end for the SAO / CNN-SAO post-filter laboratory.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "digest.hpp"
#include "json_config.hpp"
#include "saocnn/byte_io.hpp"
#include "saocnn/cnn_io.hpp"
#include "saocnn/harness.hpp"
#include "saocnn/param_codec.hpp"
#include "saocnn/rdo.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace saocnn::cli {
namespace {

struct Dims {
  int width = 0;
  int height = 0;
  int bitDepth = 8;
  std::size_t frames = 0;  // 0: all
};

void addDims(CLI::App* cmd, Dims& d, bool withFrames = true) {
  cmd->add_option("--width", d.width, "Luma width")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--height", d.height, "Luma height")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--bit-depth", d.bitDepth, "Sample bit depth")->capture_default_str()->check(CLI::Range(8, 12));
  if (withFrames) cmd->add_option("--frames", d.frames, "Frames to process (0: all)")->capture_default_str();
}

std::vector<Frame> loadFrames(const fs::path& path, const Dims& d) {
  const std::size_t available = countYuvFrames(path, d.width, d.height, d.bitDepth);
  if (available == 0) throw Error(path.string() + ": file too short");
  const std::size_t n = d.frames == 0 ? available : std::min(d.frames, available);
  std::vector<Frame> frames;
  for (std::size_t i = 0; i < n; ++i) frames.push_back(loadYuv(path, d.width, d.height, d.bitDepth, i));
  return frames;
}

void saveFrames(const std::vector<Frame>& frames, const fs::path& path) {
  for (std::size_t i = 0; i < frames.size(); ++i) saveYuv(frames[i], path, i != 0);
}

void writeText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

/// Reproducibility manifest: digests of every input and output file.
class Manifest {
 public:
  explicit Manifest(std::string command) { doc_["command"] = std::move(command); }
  void param(const std::string& key, json value) { doc_["parameters"][key] = std::move(value); }
  void input(const fs::path& p) { add("inputs", p); }
  void output(const fs::path& p) { add("outputs", p); }
  void inputDir(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) input(f);
  }
  void write(const fs::path& path) const { writeText(path, doc_.dump(2) + "\n"); }

 private:
  void add(const char* key, const fs::path& p) {
    doc_[key].push_back({{"path", p.string()}, {"bytes", fs::file_size(p)}, {"sha256", sha256File(p)}});
  }
  json doc_;
};

fs::path manifestPath(const std::string& flag, const fs::path& primaryOutput) {
  return flag.empty() ? fs::path(primaryOutput.string() + ".manifest.json") : fs::path(flag);
}

void requireDistinct(std::initializer_list<fs::path> inputs, std::initializer_list<fs::path> outputs) {
  for (const auto& o : outputs) {
    if (o.empty()) continue;
    for (const auto& i : inputs)
      if (!i.empty() && fs::exists(i) && fs::exists(o) && fs::equivalent(i, o))
        throw Error("output " + o.string() + " would overwrite an input");
  }
}

SliceMode parseSlice(const std::string& s) { return s == "inter" ? SliceMode::Inter : SliceMode::Intra; }
Arch parseArch(const std::string& s) { return s == "v2" ? Arch::V2 : Arch::V1; }
FilterFamily parseFamily(const std::string& s) { return s == "cnn" ? FilterFamily::Cnn : FilterFamily::Classic; }

// ---------------------------------------------------------------------------

struct DegradeArgs {
  fs::path input, output;
  std::string manifest;
  Dims dims;
  int qp = 32;
};

void setupDegrade(CLI::App& app) {
  auto args = std::make_shared<DegradeArgs>();
  auto* cmd = app.add_subcommand("degrade", "Simulate coding artifacts (8x8 DCT quantisation)");
  cmd->add_option("--input,-i", args->input, "Input YUV 4:2:0")->required()->check(CLI::ExistingFile);
  cmd->add_option("--output,-o", args->output, "Output YUV 4:2:0")->required();
  cmd->add_option("--qp", args->qp, "Quantisation parameter")->capture_default_str()->check(CLI::Range(0, 63));
  cmd->add_option("--manifest", args->manifest, "Manifest path (default: <output>.manifest.json)");
  addDims(cmd, args->dims);
  cmd->callback([args] {
    requireDistinct({args->input}, {args->output});
    auto frames = loadFrames(args->input, args->dims);
    std::int64_t bits = 0;
    for (auto& f : frames) {
      auto r = degradeWithRate(f, args->qp);
      bits += r.coefBits;
      f = std::move(r.frame);
    }
    saveFrames(frames, args->output);
    Manifest m("degrade");
    m.param("qp", args->qp);
    m.param("frames", frames.size());
    m.input(args->input);
    m.output(args->output);
    m.write(manifestPath(args->manifest, args->output));
    std::printf("degraded %zu frame(s) at qp %d, %lld coefficient bits\n", frames.size(), args->qp,
                static_cast<long long>(bits));
  });
}

// ---------------------------------------------------------------------------

struct QuantizeArgs {
  fs::path input, output;
  int fracBits = kDefaultFracBits;
};

void setupQuantize(CLI::App& app) {
  auto args = std::make_shared<QuantizeArgs>();
  auto* cmd = app.add_subcommand("quantize", "Convert float SAOW weights to a 16-bit SAOQ container");
  cmd->add_option("--input,-i", args->input, "SAOW file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--output,-o", args->output, "SAOQ file")->required();
  cmd->add_option("--frac-bits,-A", args->fracBits, "Activation fraction bits")
      ->capture_default_str()
      ->check(CLI::Range(1, 14));
  cmd->callback([args] {
    requireDistinct({args->input}, {args->output});
    const auto q = quantize(readSaow(args->input), args->fracBits);
    writeSaoq(q, args->output);
    std::printf("quantised %zu layers, shifts:", q.layers.size());
    for (const auto& l : q.layers) std::printf(" %d", l.shift);
    std::printf("\n");
  });
}

// ---------------------------------------------------------------------------

struct EncodeArgs {
  fs::path orig, rec, bank, output, filtered, report;
  std::string manifest, family = "classic", slice = "intra";
  Dims dims;
  EncoderConfig enc;
  double lambda = -1.0;
};

json ctuReportJson(const PictureReport& r) {
  json doc;
  doc["lambda"] = r.lambda;
  doc["total_d"] = r.totalD;
  doc["total_r"] = r.totalR;
  doc["total_j"] = r.totalJ;
  doc["stream_bits"] = r.streamBits;
  doc["ctus"] = json::array();
  for (const auto& c : r.ctus) {
    doc["ctus"].push_back({{"index", c.index},
                           {"x", c.rect.x},
                           {"y", c.rect.y},
                           {"choice", toString(c.choice)},
                           {"luma", c.modes[0]},
                           {"chroma", c.modes[1]},
                           {"d", c.cost.d},
                           {"r", c.cost.r},
                           {"j", c.cost.j},
                           {"j_off", c.offCost.j}});
  }
  return doc;
}

void setupEncode(CLI::App& app) {
  auto args = std::make_shared<EncodeArgs>();
  auto* cmd = app.add_subcommand("encode", "RDO-select filter parameters and write an SAOP stream");
  cmd->add_option("--orig", args->orig, "Original YUV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--rec", args->rec, "Reconstructed (unfiltered) YUV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--output,-o", args->output, "Output SAOP stream")->required();
  cmd->add_option("--filtered", args->filtered, "Filtered output YUV");
  cmd->add_option("--report", args->report, "Per-CTU JSON report");
  cmd->add_option("--manifest", args->manifest, "Manifest path (default: <output>.manifest.json)");
  cmd->add_option("--family", args->family, "classic | cnn")
      ->capture_default_str()
      ->check(CLI::IsMember({"classic", "cnn"}));
  cmd->add_option("--bank", args->bank, "Model bank directory (cnn)")->check(CLI::ExistingDirectory);
  cmd->add_option("--slice", args->slice, "intra | inter")->capture_default_str()->check(CLI::IsMember({"intra", "inter"}));
  cmd->add_option("--qp", args->enc.qp, "Slice qp")->capture_default_str()->check(CLI::Range(0, 63));
  cmd->add_option("--ctu", args->enc.ctuSize, "CTU size")->capture_default_str()->check(CLI::Range(8, 1024));
  cmd->add_option("--m", args->enc.lumaModels, "Luma models per CTU")->capture_default_str()->check(CLI::Range(1, 8));
  cmd->add_option("--mc", args->enc.chromaModels, "Chroma models per CTU")->capture_default_str()->check(CLI::Range(1, 8));
  cmd->add_option("--lambda", args->lambda, "Lagrange multiplier override")->check(CLI::Range(0.0, Lambda::kMax));
  cmd->add_option("--tuple-limit", args->enc.tupleLimit, "Exhaustive model tuples up to this count")->capture_default_str();
  cmd->add_flag("--off", args->enc.forceOff, "Force every CTU off");
  cmd->add_option("--threads", args->enc.threads, "Worker threads")->capture_default_str()->check(CLI::Range(1, 256));
  addDims(cmd, args->dims);
  cmd->callback([args] {
    args->enc.family = parseFamily(args->family);
    args->enc.sliceMode = parseSlice(args->slice);
    if (args->lambda >= 0.0) args->enc.lambda = args->lambda;
    if (args->enc.family == FilterFamily::Cnn && args->bank.empty()) throw Error("--family cnn requires --bank");
    requireDistinct({args->orig, args->rec}, {args->output, args->filtered, args->report});
    std::optional<ModelBank> bank;
    if (args->enc.family == FilterFamily::Cnn) bank = loadBankDir(args->bank);
    const auto orig = loadFrames(args->orig, args->dims);
    const auto rec = loadFrames(args->rec, args->dims);
    if (orig.size() != rec.size()) throw Error("original and reconstruction frame counts differ");

    std::vector<std::uint8_t> stream;
    std::vector<Frame> filtered;
    json reports = json::array();
    for (std::size_t i = 0; i < orig.size(); ++i) {
      auto r = rdoPicture(orig[i], rec[i], bank ? &*bank : nullptr, args->enc);
      stream.insert(stream.end(), r.stream.begin(), r.stream.end());
      reports.push_back(ctuReportJson(r.report));
      std::printf("frame %zu: %zu bits, Y %s -> %s dB\n", i, r.report.streamBits,
                  r.report.psnrBefore[0].toString().c_str(), r.report.psnrAfter[0].toString().c_str());
      filtered.push_back(std::move(r.filtered));
    }
    writeFileBytes(args->output, stream);
    Manifest m("encode");
    m.param("family", args->family);
    m.param("qp", args->enc.qp);
    m.param("lambda", args->enc.effectiveLambda().value());
    m.input(args->orig);
    m.input(args->rec);
    if (bank) m.inputDir(args->bank);
    m.output(args->output);
    if (!args->filtered.empty()) {
      saveFrames(filtered, args->filtered);
      m.output(args->filtered);
    }
    if (!args->report.empty()) {
      writeText(args->report, reports.dump(2) + "\n");
      m.output(args->report);
    }
    m.write(manifestPath(args->manifest, args->output));
  });
}

// ---------------------------------------------------------------------------

struct DecodeArgs {
  fs::path rec, stream, bank, output, reference;
  std::string manifest;
  Dims dims;
  int threads = 1;
};

void setupDecode(CLI::App& app) {
  auto args = std::make_shared<DecodeArgs>();
  auto* cmd = app.add_subcommand("decode", "Apply an SAOP stream to a reconstruction");
  cmd->add_option("--rec", args->rec, "Reconstructed (unfiltered) YUV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--stream,-s", args->stream, "SAOP stream")->required()->check(CLI::ExistingFile);
  cmd->add_option("--output,-o", args->output, "Filtered output YUV")->required();
  cmd->add_option("--bank", args->bank, "Model bank directory (cnn streams)")->check(CLI::ExistingDirectory);
  cmd->add_option("--reference", args->reference, "Expected filtered YUV; mismatch is an error")
      ->check(CLI::ExistingFile);
  cmd->add_option("--manifest", args->manifest, "Manifest path (default: <output>.manifest.json)");
  cmd->add_option("--threads", args->threads, "Worker threads")->capture_default_str()->check(CLI::Range(1, 256));
  addDims(cmd, args->dims, false);
  cmd->callback([args] {
    requireDistinct({args->rec, args->stream, args->reference}, {args->output});
    const auto pictures = readStream(readFileBytes(args->stream));
    std::optional<ModelBank> bank;
    if (!args->bank.empty()) bank = loadBankDir(args->bank);
    args->dims.frames = pictures.size();
    const auto rec = loadFrames(args->rec, args->dims);
    if (rec.size() != pictures.size()) throw Error("stream has more pictures than the reconstruction");
    std::vector<Frame> out;
    for (std::size_t i = 0; i < pictures.size(); ++i) {
      if (pictures[i].header.family == FilterFamily::Cnn && !bank) throw Error("cnn stream requires --bank");
      out.push_back(applyPicture(rec[i], pictures[i], bank ? &*bank : nullptr, args->threads));
    }
    if (!args->reference.empty()) {
      const auto ref = loadFrames(args->reference, args->dims);
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (i >= ref.size() || !(ref[i].y.samples() == out[i].y.samples() && ref[i].u.samples() == out[i].u.samples() &&
                                 ref[i].v.samples() == out[i].v.samples()))
          throw Error("decoded frame " + std::to_string(i) + " differs from the reference");
      }
      std::printf("bit-exact match with reference (%zu frames)\n", out.size());
    }
    saveFrames(out, args->output);
    Manifest m("decode");
    m.input(args->rec);
    m.input(args->stream);
    if (bank) m.inputDir(args->bank);
    if (!args->reference.empty()) m.input(args->reference);
    m.output(args->output);
    m.write(manifestPath(args->manifest, args->output));
    std::printf("decoded %zu picture(s)\n", out.size());
  });
}

// ---------------------------------------------------------------------------

struct PsnrArgs {
  fs::path a, b;
  Dims dims;
};

void setupPsnr(CLI::App& app) {
  auto args = std::make_shared<PsnrArgs>();
  auto* cmd = app.add_subcommand("psnr", "Per-component PSNR between two YUV files");
  cmd->add_option("a", args->a, "First YUV")->required()->check(CLI::ExistingFile);
  cmd->add_option("b", args->b, "Second YUV")->required()->check(CLI::ExistingFile);
  addDims(cmd, args->dims);
  cmd->callback([args] {
    const auto a = loadFrames(args->a, args->dims);
    const auto b = loadFrames(args->b, args->dims);
    if (a.size() != b.size()) throw Error("frame counts differ");
    std::array<std::int64_t, 3> total{};
    std::array<std::int64_t, 3> count{};
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::printf("frame %zu:", i);
      for (int c = 0; c < 3; ++c) {
        const auto comp = static_cast<Component>(c);
        const auto& pa = a[i].plane(comp);
        total[c] += sse(pa, b[i].plane(comp));
        count[c] += static_cast<std::int64_t>(pa.width()) * pa.height();
        std::printf(" %c %s", "YUV"[c], psnr(pa, b[i].plane(comp)).toString().c_str());
      }
      std::printf("\n");
    }
    std::printf("total:");
    for (int c = 0; c < 3; ++c)
      std::printf(" %c %s", "YUV"[c], psnrFromSse(total[c], count[c], args->dims.bitDepth).toString().c_str());
    std::printf("\n");
  });
}

// ---------------------------------------------------------------------------

std::vector<RdPoint> readCurve(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<RdPoint> pts;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    ss.imbue(std::locale::classic());
    RdPoint p;
    if (!(ss >> p.rate)) continue;
    if (!(ss >> p.psnr)) throw Error(path.string() + ":" + std::to_string(lineNo) + ": expected 'rate psnr'");
    pts.push_back(p);
  }
  return pts;
}

void setupBdRate(CLI::App& app) {
  auto anchor = std::make_shared<fs::path>();
  auto test = std::make_shared<fs::path>();
  auto* cmd = app.add_subcommand("bdrate", "BD-rate between two 'rate psnr' curve files");
  cmd->add_option("anchor", *anchor, "Anchor curve")->required()->check(CLI::ExistingFile);
  cmd->add_option("test", *test, "Test curve")->required()->check(CLI::ExistingFile);
  cmd->callback([anchor, test] { std::printf("%.3f%%\n", bdRate(readCurve(*anchor), readCurve(*test))); });
}

// ---------------------------------------------------------------------------

void setupMac(CLI::App& app) {
  struct Args {
    std::string arch = "v1", role = "luma";
    int m = 1;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("mac", "Multiply-accumulates per pel of a network configuration");
  cmd->add_option("--arch", args->arch, "v1 | v2")->capture_default_str()->check(CLI::IsMember({"v1", "v2"}));
  cmd->add_option("--role", args->role, "luma | chroma")->capture_default_str()->check(CLI::IsMember({"luma", "chroma"}));
  cmd->add_option("--m", args->m, "Models per CTU")->capture_default_str()->check(CLI::Range(1, 64));
  cmd->callback([args] {
    const Role role = args->role == "chroma" ? Role::Chroma : Role::Luma;
    std::printf("%lld\n", static_cast<long long>(macPerPel(parseArch(args->arch), role, args->m)));
  });
}

// ---------------------------------------------------------------------------

void setupSynth(CLI::App& app) {
  struct Args {
    fs::path output;
    std::string pattern = "gradient";
    Dims dims;
    std::uint64_t seed = 1;
    int bias = 0;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("synth", "Generate synthetic YUV content");
  cmd->add_option("--output,-o", args->output, "Output YUV")->required();
  cmd->add_option("--pattern", args->pattern, "gradient | noise | edges | texture")
      ->capture_default_str()
      ->check(CLI::IsMember({"gradient", "noise", "edges", "texture"}));
  cmd->add_option("--seed", args->seed, "Generator seed")->capture_default_str();
  cmd->add_option("--bias", args->bias, "Constant added to every sample")->capture_default_str();
  addDims(cmd, args->dims);
  cmd->callback([args] {
    const std::size_t n = args->dims.frames == 0 ? 1 : args->dims.frames;
    std::vector<Frame> frames;
    for (std::size_t i = 0; i < n; ++i) {
      auto f = synthesize(patternFromString(args->pattern), args->dims.width, args->dims.height,
                          args->dims.bitDepth, args->seed + i);
      frames.push_back(args->bias ? addBias(f, args->bias) : std::move(f));
    }
    saveFrames(frames, args->output);
  });
}

void setupMakeBank(CLI::App& app) {
  struct Args {
    fs::path output;
    std::string arch = "v1";
    int k = 2;
    int fracBits = kDefaultFracBits;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("make-bank", "Write the pass-through / constant fixture model bank");
  cmd->add_option("--output,-o", args->output, "Bank directory")->required();
  cmd->add_option("--arch", args->arch, "v1 | v2")->capture_default_str()->check(CLI::IsMember({"v1", "v2"}));
  cmd->add_option("--k", args->k, "Candidates per picture")->capture_default_str()->check(CLI::Range(1, 16));
  cmd->add_option("--frac-bits,-A", args->fracBits, "Activation fraction bits")
      ->capture_default_str()
      ->check(CLI::Range(1, 14));
  cmd->callback([args] {
    saveBankDir(fixtureBank(parseArch(args->arch), args->k, args->fracBits), args->output);
    std::printf("wrote %s\n", (args->output / "bank.json").string().c_str());
  });
}

// ---------------------------------------------------------------------------

struct ExperimentArgs {
  std::vector<std::string> sequences;  // name=path
  std::vector<std::string> synth;      // pattern names
  fs::path bank, jsonOut, tableOut;
  std::string manifest, family = "classic", slice = "intra", arch = "v1";
  bool fixtureBank = false;
  Dims dims;
  std::uint64_t seed = 1;
  double lambda = -1.0;
  int k = 2;
  ExperimentConfig cfg;
};

void setupExperiment(CLI::App& app) {
  auto args = std::make_shared<ExperimentArgs>();
  auto* cmd = app.add_subcommand("experiment", "Degrade, filter and report over a qp ladder");
  cmd->add_option("--seq", args->sequences, "Sequence as name=path.yuv (repeatable)");
  cmd->add_option("--synth", args->synth, "Synthetic sequence pattern (repeatable)")
      ->check(CLI::IsMember({"gradient", "noise", "edges", "texture"}));
  cmd->add_option("--seed", args->seed, "Synthetic content seed")->capture_default_str();
  cmd->add_option("--qps", args->cfg.qps, "qp ladder")->capture_default_str()->check(CLI::Range(0, 63));
  cmd->add_option("--family", args->family, "classic | cnn")
      ->capture_default_str()
      ->check(CLI::IsMember({"classic", "cnn"}));
  cmd->add_option("--bank", args->bank, "Model bank directory")->check(CLI::ExistingDirectory);
  cmd->add_flag("--fixture-bank", args->fixtureBank, "Use the built-in pass-through / constant bank");
  cmd->add_option("--arch", args->arch, "v1 | v2 (fixture bank and MAC summary)")
      ->capture_default_str()
      ->check(CLI::IsMember({"v1", "v2"}));
  cmd->add_option("--slice", args->slice, "intra | inter")->capture_default_str()->check(CLI::IsMember({"intra", "inter"}));
  cmd->add_option("--ctu", args->cfg.encoder.ctuSize, "CTU size")->capture_default_str()->check(CLI::Range(8, 1024));
  cmd->add_option("--m", args->cfg.encoder.lumaModels, "Luma models per CTU")->capture_default_str()->check(CLI::Range(1, 8));
  cmd->add_option("--mc", args->cfg.encoder.chromaModels, "Chroma models per CTU")->capture_default_str()->check(CLI::Range(1, 8));
  cmd->add_option("--k", args->k, "Fixture bank candidates")->capture_default_str()->check(CLI::Range(1, 16));
  cmd->add_option("--lambda", args->lambda, "Lagrange multiplier override")->check(CLI::Range(0.0, Lambda::kMax));
  cmd->add_flag("--off", args->cfg.encoder.forceOff, "Force every CTU off");
  cmd->add_option("--threads", args->cfg.threads, "Parallel (sequence, qp) runs")->capture_default_str()->check(CLI::Range(1, 256));
  cmd->add_option("--json", args->jsonOut, "JSON report path");
  cmd->add_option("--table", args->tableOut, "Text table path (default: stdout)");
  cmd->add_option("--manifest", args->manifest, "Manifest path (default: <json>.manifest.json)");
  addDims(cmd, args->dims);
  cmd->callback([args] {
    auto& enc = args->cfg.encoder;
    enc.family = parseFamily(args->family);
    enc.sliceMode = parseSlice(args->slice);
    if (args->lambda >= 0.0) enc.lambda = args->lambda;
    args->cfg.arch = parseArch(args->arch);
    if (args->sequences.empty() && args->synth.empty()) throw Error("no content: give --seq or --synth");
    if (enc.family == FilterFamily::Cnn && args->bank.empty() && !args->fixtureBank)
      throw Error("--family cnn requires --bank or --fixture-bank");
    if (!args->bank.empty() && args->fixtureBank) throw Error("--bank and --fixture-bank are exclusive");

    std::vector<Sequence> seqs;
    std::vector<fs::path> inputs;
    for (const auto& spec : args->sequences) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0) throw Error("--seq expects name=path, got " + spec);
      const fs::path path = spec.substr(eq + 1);
      seqs.push_back({spec.substr(0, eq), "file", loadFrames(path, args->dims)});
      inputs.push_back(path);
    }
    for (std::size_t i = 0; i < args->synth.size(); ++i) {
      const auto pattern = patternFromString(args->synth[i]);
      const std::size_t n = args->dims.frames == 0 ? 1 : args->dims.frames;
      Sequence s{args->synth[i] + "_" + std::to_string(i), args->synth[i], {}};
      for (std::size_t f = 0; f < n; ++f)
        s.frames.push_back(synthesize(pattern, args->dims.width, args->dims.height, args->dims.bitDepth,
                                      args->seed + 1000 * i + f));
      seqs.push_back(std::move(s));
    }
    std::optional<ModelBank> bank;
    if (!args->bank.empty()) bank = loadBankDir(args->bank);
    if (args->fixtureBank) bank = fixtureBank(args->cfg.arch, args->k);
    if (!bank && enc.family == FilterFamily::Cnn) throw Error("no model bank");

    const auto report = runExperiment(seqs, args->cfg, bank ? &*bank : nullptr);
    const auto table = experimentTable(report);
    if (args->tableOut.empty()) {
      std::fputs(table.c_str(), stdout);
    } else {
      writeText(args->tableOut, table);
    }
    if (!args->jsonOut.empty()) {
      writeText(args->jsonOut, experimentJson(report));
      Manifest m("experiment");
      m.param("family", args->family);
      m.param("qps", args->cfg.qps);
      m.param("synth", args->synth);
      m.param("seed", args->seed);
      for (const auto& p : inputs) m.input(p);
      if (!args->bank.empty()) m.inputDir(args->bank);
      m.output(args->jsonOut);
      if (!args->tableOut.empty()) m.output(args->tableOut);
      m.write(manifestPath(args->manifest, args->jsonOut));
    }
    bool ok = true;
    for (const auto& r : report.runs) ok = ok && r.neverWorse;
    if (!ok) throw Error("a picture's chosen cost exceeded its OFF cost");
  });
}

}  // namespace
}  // namespace saocnn::cli

int main(int argc, char** argv) {
  using namespace saocnn::cli;
  CLI::App app{"SAO and CNN-SAO post-filter laboratory"};
  app.require_subcommand(1);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config; sections named after subcommands, flags win");
  setupDegrade(app);
  setupQuantize(app);
  setupEncode(app);
  setupDecode(app);
  setupPsnr(app);
  setupBdRate(app);
  setupMac(app);
  setupSynth(app);
  setupMakeBank(app);
  setupExperiment(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
