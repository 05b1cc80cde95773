#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fracap/analysis.hpp"
#include "fracap/classical.hpp"
#include "fracap/constants.hpp"
#include "fracap/det.hpp"
#include "fracap/extension.hpp"
#include "fracap/io.hpp"
#include "fracap/nonlocal.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct RunConfig {
  int n = 2;
  double s = 0.5;
  std::string sLadder;  // "a:b:steps"
  double gamma = 0.1;
  double C4 = 1.0;
  double h = 0.0;  // 0 = auto
  double R = 0.0;  // 0 = auto
  double Z = 0.0;
  int zlevels = 24;
  double tol = 0.04;
  double cgTol = 1e-8;
  std::string out = "out";
  std::vector<std::string> shapeFiles;
  std::string method = "direct";
  bool withBallCapacity = false;
};

std::vector<double> parseLadder(const std::string& spec) {
  const auto c1 = spec.find(':');
  const auto c2 = spec.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw std::runtime_error("invalid --s-ladder, expected a:b:steps");
  const double a = std::stod(spec.substr(0, c1));
  const double b = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
  const int steps = std::stoi(spec.substr(c2 + 1));
  if (steps < 1) throw std::runtime_error("invalid --s-ladder, steps must be >= 1");
  std::vector<double> out;
  for (int i = 0; i < steps; ++i)
    out.push_back(steps == 1 ? a : a + (b - a) * i / (steps - 1));
  return out;
}

void validateConfig(const RunConfig& cfg, const std::vector<double>& ladder) {
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0 / 9.0))
    throw std::runtime_error("invariant violated: gamma must lie in (0, 1/9)");
  for (double s : ladder)
    if (!(cfg.n > 2.0 * s))
      throw std::runtime_error("invariant violated: n > 2s required for every s");
  if (cfg.h > 0.0 && cfg.R > 0.0 && !(cfg.h < cfg.R / 8.0))
    throw std::runtime_error("invariant violated: h < R/8 required");
  if (!(cfg.C4 > 0.0)) throw std::runtime_error("invariant violated: C4 must be positive");
}

fracap::PipelineConfig pipelineOf(const RunConfig& cfg) {
  fracap::PipelineConfig p;
  if (cfg.h > 0.0 && cfg.R > 0.0) p.m = (int)std::llround(2.0 * cfg.R / cfg.h);
  p.Z = cfg.Z;
  p.zLevels = cfg.zlevels;
  p.gamma = cfg.gamma;
  p.C4 = cfg.C4;
  p.assertTol = cfg.tol;
  p.solve.tol = cfg.cgTol;
  return p;
}

fracap::GridSpec gridFor(const fracap::Shape& shape, const RunConfig& cfg,
                         const fracap::PipelineConfig& p) {
  if (cfg.R > 0.0) {
    fracap::GridSpec g;
    g.n = shape.n;
    g.R = cfg.R;
    g.m = cfg.h > 0.0 ? (int)std::llround(2.0 * cfg.R / cfg.h) : p.m;
    return g;
  }
  return fracap::autoGrid(shape, p);
}

std::vector<std::pair<std::string, fracap::Shape>> loadShapes(const RunConfig& cfg) {
  if (cfg.shapeFiles.empty()) throw std::runtime_error("no --shape files given");
  std::vector<std::pair<std::string, fracap::Shape>> shapes;
  for (const auto& path : cfg.shapeFiles) {
    fracap::Shape s = fracap::parseShapeJson(fracap::readFileText(path));
    if (s.n != cfg.n)
      throw std::runtime_error("invariant violated: shape dimension differs from --n (" +
                               path + ")");
    shapes.emplace_back(fs::path(path).stem().string(), s);
  }
  return shapes;
}

struct OutputSink {
  fs::path dir;
  ordered_json manifestOutputs = ordered_json::array();

  explicit OutputSink(const std::string& out) : dir(out) { fs::create_directories(dir); }
  void write(const std::string& name, const std::string& text) {
    fracap::writeFileText((dir / name).string(), text);
    manifestOutputs.push_back(name);
  }
};

void writeManifest(OutputSink& sink, const std::string& command, const RunConfig& cfg) {
  ordered_json m;
  m["command"] = command;
  ordered_json c;
  c["n"] = cfg.n;
  c["s"] = cfg.s;
  if (!cfg.sLadder.empty()) c["s-ladder"] = cfg.sLadder;
  c["gamma"] = cfg.gamma;
  c["C4"] = cfg.C4;
  c["h"] = cfg.h;
  c["R"] = cfg.R;
  c["Z"] = cfg.Z;
  c["zlevels"] = cfg.zlevels;
  c["tol"] = cfg.tol;
  c["method"] = cfg.method;
  m["config"] = c;
  m["shapes"] = cfg.shapeFiles;
  m["outputs"] = sink.manifestOutputs;
  fracap::writeFileText((sink.dir / "manifest.json").string(), m.dump(2));
}

std::string cachePath(const RunConfig& cfg) {
  return (fs::path(cfg.out) / "ballcache.json").string();
}

void loadCacheIfAny(const RunConfig& cfg) {
  const std::string p = cachePath(cfg);
  if (fs::exists(p)) fracap::ballCacheLoad(fracap::readFileText(p));
}

void saveCache(const RunConfig& cfg) {
  fs::create_directories(cfg.out);
  fracap::writeFileText(cachePath(cfg), fracap::ballCacheDump());
}

}  // namespace

namespace {

void applyConfigFile(RunConfig& cfg, const std::string& path) {
  json j = json::parse(fracap::readFileText(path));
  if (j.contains("n")) cfg.n = j["n"].get<int>();
  if (j.contains("s")) cfg.s = j["s"].get<double>();
  if (j.contains("s-ladder")) cfg.sLadder = j["s-ladder"].get<std::string>();
  if (j.contains("gamma")) cfg.gamma = j["gamma"].get<double>();
  if (j.contains("C4")) cfg.C4 = j["C4"].get<double>();
  if (j.contains("h")) cfg.h = j["h"].get<double>();
  if (j.contains("R")) cfg.R = j["R"].get<double>();
  if (j.contains("Z")) cfg.Z = j["Z"].get<double>();
  if (j.contains("zlevels")) cfg.zlevels = j["zlevels"].get<int>();
  if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
  if (j.contains("cg-tol")) cfg.cgTol = j["cg-tol"].get<double>();
  if (j.contains("out")) cfg.out = j["out"].get<std::string>();
  if (j.contains("method")) cfg.method = j["method"].get<std::string>();
  if (j.contains("shape")) cfg.shapeFiles = j["shape"].get<std::vector<std::string>>();
}

void addCommonFlags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--n", cfg.n, "dimension (1..3)");
  cmd->add_option("--s", cfg.s, "fractional order in (0,1)");
  cmd->add_option("--s-ladder", cfg.sLadder, "ladder a:b:steps");
  cmd->add_option("--gamma", cfg.gamma, "threshold constant in (0,1/9)");
  cmd->add_option("--C4", cfg.C4, "undisplayed paper constant (configurable)");
  cmd->add_option("--h", cfg.h, "grid spacing (0 = auto)");
  cmd->add_option("--R", cfg.R, "truncation radius (0 = auto)");
  cmd->add_option("--Z", cfg.Z, "half-space height (0 = auto)");
  cmd->add_option("--zlevels", cfg.zlevels, "number of graded z levels");
  cmd->add_option("--tol", cfg.tol, "assertion tolerance");
  cmd->add_option("--cg-tol", cfg.cgTol, "linear solver relative residual");
  cmd->add_option("--out", cfg.out, "output directory");
  cmd->add_option("--shape", cfg.shapeFiles, "shape JSON file (repeatable)");
  cmd->add_option("--method", cfg.method, "direct | extension | both")
      ->check(CLI::IsMember({"direct", "extension", "both"}));
}

}  // namespace

int main(int argc, char** argv) {
  fracap::applyThreadCap();

  RunConfig cfg;
  // flags override the config file, so apply the file before parsing
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        applyConfigFile(cfg, argv[i + 1]);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
      }
    }
  }

  CLI::App app{"fracap: fractional capacity, asymmetry and isocapacitary stability toolkit"};
  app.require_subcommand(1);
  std::string configPath;
  app.add_option("--config", configPath, "JSON config file mirroring the flags");
  app.fallthrough();

  auto* cmdConstants = app.add_subcommand("constants", "print the constants table");
  auto* cmdCapacity = app.add_subcommand("capacity", "compute cap_s of shapes");
  auto* cmdAsymmetry = app.add_subcommand("asymmetry", "compute Fraenkel asymmetry");
  auto* cmdDeficit = app.add_subcommand("deficit", "compute the isocapacitary deficit");
  auto* cmdVerify = app.add_subcommand("verify", "stability inequality report");
  auto* cmdSweep = app.add_subcommand("sweep", "s -> 1 asymptotic sweep");
  auto* cmdScan = app.add_subcommand("scan", "sharpness scan over a shape family");
  for (CLI::App* c : {cmdConstants, cmdCapacity, cmdAsymmetry, cmdDeficit, cmdVerify,
                      cmdSweep, cmdScan})
    addCommonFlags(c, cfg);
  cmdConstants->add_flag("--with-ball-capacity", cfg.withBallCapacity,
                         "solve for cap_s(B1) and include the stability constant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    std::vector<double> ladder =
        cfg.sLadder.empty() ? std::vector<double>{cfg.s} : parseLadder(cfg.sLadder);
    validateConfig(cfg, ladder);
    fracap::PipelineConfig pipe = pipelineOf(cfg);
    OutputSink sink(cfg.out);
    bool assertionsOk = true;

    if (*cmdConstants) {
      std::optional<double> capsB;
      if (cfg.withBallCapacity) {
        loadCacheIfAny(cfg);
        capsB = fracap::unitBallCapacity(cfg.n, cfg.s, pipe.m, 3.0, "direct", pipe);
        saveCache(cfg);
      }
      auto table = fracap::makeConstantsTable(cfg.n, cfg.s, cfg.gamma, cfg.C4, capsB);
      const std::string text = fracap::constantsTableToJson(table);
      std::cout << text << "\n";
      sink.write("constants.json", text);
      writeManifest(sink, "constants", cfg);
      return 0;
    }

    auto shapes = loadShapes(cfg);
    loadCacheIfAny(cfg);

    if (*cmdCapacity) {
      for (const auto& [name, shape] : shapes) {
        fracap::GridSpec grid = gridFor(shape, cfg, pipe);
        if (cfg.method == "direct" || cfg.method == "both") {
          auto r = fracap::fracCapacityDirect(shape, cfg.s, grid, pipe.solve);
          const std::string text = fracap::capacityResultToJson(r);
          std::cout << text << "\n";
          sink.write("capacity_" + name + "_direct.json", text);
        }
        if (cfg.method == "extension" || cfg.method == "both") {
          auto r = fracap::fracCapacityExtension(
              shape, cfg.s, grid, cfg.Z > 0 ? cfg.Z : grid.R, cfg.zlevels, pipe.solve);
          const std::string text = fracap::capacityResultToJson(r.cap);
          std::cout << text << "\n";
          sink.write("capacity_" + name + "_extension.json", text);
        }
      }
      writeManifest(sink, "capacity", cfg);
      return 0;
    }

    if (*cmdAsymmetry) {
      for (const auto& [name, shape] : shapes) {
        fracap::GridSpec grid = gridFor(shape, cfg, pipe);
        auto r = fracap::fraenkelAsymmetry(shape, grid.h());
        const std::string text = fracap::asymmetryResultToJson(r);
        std::cout << text << "\n";
        sink.write("asymmetry_" + name + ".json", text);
      }
      writeManifest(sink, "asymmetry", cfg);
      return 0;
    }

    if (*cmdDeficit) {
      for (const auto& [name, shape] : shapes) {
        auto r = fracap::deficitResult(shape, cfg.s, pipe,
                                       cfg.method == "both" ? "direct" : cfg.method);
        ordered_json j;
        j["shape"] = name;
        j["deficit"] = r.deficit;
        j["capacity"] = r.capacity;
        j["volume"] = r.volume;
        j["asymmetry"] = r.asymmetry;
        j["normalizedBall"] = r.normalizedBall;
        j["tolerance"] = cfg.tol;
        const bool ok = r.deficit >= -cfg.tol;
        j["passed"] = ok;
        assertionsOk = assertionsOk && ok;
        const std::string text = j.dump(2);
        std::cout << text << "\n";
        sink.write("deficit_" + name + ".json", text);
      }
      saveCache(cfg);
      writeManifest(sink, "deficit", cfg);
      return assertionsOk ? 0 : 1;
    }

    if (*cmdVerify) {
      for (const auto& [name, shape] : shapes) {
        auto rep = fracap::verifyStability(shape, cfg.s, pipe, cfg.method, name);
        const std::string text = fracap::stabilityReportToJson(rep);
        std::cout << text << "\n";
        sink.write("verify_" + name + ".json", text);
        assertionsOk = assertionsOk && rep.passed;
      }
      saveCache(cfg);
      writeManifest(sink, "verify", cfg);
      return assertionsOk ? 0 : 1;
    }

    if (*cmdSweep) {
      for (const auto& [name, shape] : shapes) {
        fracap::GridSpec grid = gridFor(shape, cfg, pipe);
        auto rep = fracap::asymptoticSweep(shape, ladder, grid, 0.10, pipe.solve);
        sink.write("sweep_" + name + ".csv", fracap::sweepReportToCsv(rep));
        const std::string text = fracap::sweepReportToJson(rep);
        std::cout << text << "\n";
        sink.write("sweep_" + name + ".json", text);
        for (const auto& p : rep.points) assertionsOk = assertionsOk && p.upperBoundOk;
      }
      writeManifest(sink, "sweep", cfg);
      return assertionsOk ? 0 : 1;
    }

    if (*cmdScan) {
      auto rep = fracap::sharpnessScan(shapes, cfg.s, pipe);
      sink.write("scan.csv", fracap::scanReportToCsv(rep));
      const std::string text = fracap::scanReportToJson(rep);
      std::cout << text << "\n";
      sink.write("scan.json", text);
      saveCache(cfg);
      writeManifest(sink, "scan", cfg);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
