// ssfp: scans, figure presets and pre-fractal probes for the self-similar
// fractal potential transfer matrix.
//
// exit codes: 0 ok, 1 configuration error, 2 chain break, 3 I/O error

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssfp/analysis.hpp"
#include "ssfp/config.hpp"
#include "ssfp/csv.hpp"
#include "ssfp/errors.hpp"
#include "ssfp/extension.hpp"
#include "ssfp/figures.hpp"
#include "ssfp/prefractal.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitChainBreak = 2;
constexpr int kExitIo = 3;

struct Cli {
  std::string configPath;
  std::string outDir;
  std::vector<std::string> sets;
  int threads = 0;
  int figure = 0;
};

ssfp::RunConfig buildConfig(const Cli& cli) {
  ssfp::RunConfig cfg;
  if (!cli.configPath.empty()) ssfp::loadConfigFile(cfg, cli.configPath);
  for (const auto& s : cli.sets) ssfp::applyAssignment(cfg, s);
  if (!cli.outDir.empty()) cfg.outDir = cli.outDir;
  if (cli.threads != 0) cfg.threads = cli.threads;
  ssfp::validate(cfg);
  return cfg;
}

void ensureDir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ssfp::IoError(dir + ": cannot create directory (" + ec.message() + ")");
}

int reportBreaks(const ssfp::ScanResult& r, const std::string& label) {
  for (const auto& b : r.breaks)
    std::cerr << label << "chain break: base point " << b.baseIndex << ", level " << b.level << ", ln_phi "
              << b.lnPhi << ": " << b.reason << "\n";
  return r.breaks.empty() ? 0 : kExitChainBreak;
}

int commandScan(const Cli& cli) {
  const auto cfg = buildConfig(cli);
  const auto geom = ssfp::geometryOf(cfg);
  const auto result = ssfp::scan(cfg.seed, geom, ssfp::scanWindowOf(cfg), ssfp::extensionOptionsOf(cfg));
  ensureDir(cfg.outDir);
  const auto path = cfg.outDir + "/scan.csv";
  ssfp::writeFile(path, ssfp::scanCsv(result.points));
  std::cout << "wrote " << path << " (" << result.points.size() << " rows)\n";
  if (result.seedWarnings > 0)
    std::cerr << "warning: " << result.seedWarnings
              << " base points exceed tolerance.seed_residual; lower grid.ln_phi_min\n";

  if (cfg.windowsSet) {
    const auto rep = ssfp::classify(result.points, geom, cfg.windows, cfg.envelopeHalfWindow);
    auto line = [](const char* name, const ssfp::FitResult& f) {
      if (!f.valid) return std::string(name) + ": unavailable (" + f.note + ")\n";
      return std::string(name) + ": slope " + ssfp::formatDouble(f.slope) + " intercept " +
             ssfp::formatDouble(f.intercept) + " rms " + ssfp::formatDouble(f.rmsResidual) + " n " +
             std::to_string(f.pointCount) + "\n";
    };
    const std::string text = line("left lnln(R/T)", rep.leftFit) + line("middle ln(R/T)", rep.middleFit) +
                             "middle class: " + std::string(ssfp::toString(rep.middleClass)) + "\n" +
                             line("right envelope", rep.rightEnvelopeFit);
    ssfp::writeFile(cfg.outDir + "/scan_report.txt", text);
    std::cout << text;
  }
  return reportBreaks(result, "");
}

int commandFigure(const Cli& cli) {
  const auto cfg = buildConfig(cli);
  const auto preset = ssfp::figurePreset(cli.figure);
  ssfp::FigureOptions opt;
  opt.samplesPerPeriod = cfg.samplesPerPeriod;
  opt.seedDepth = cfg.seedDepth;
  opt.roundTripTolerance = cfg.roundTripTolerance;
  opt.envelopeHalfWindow = cfg.envelopeHalfWindow;
  opt.threads = cfg.threads;
  const auto result = ssfp::runFigure(preset, opt);
  for (const auto& path : ssfp::writeFigureOutputs(result, cfg.outDir)) std::cout << "wrote " << path << "\n";
  std::cout << ssfp::figureReport(result);
  int code = 0;
  for (const auto& c : result.curves)
    if (reportBreaks(c.scan, c.curve.label + ": ") != 0) code = kExitChainBreak;
  return code;
}

int commandPrefractal(const Cli& cli) {
  const auto cfg = buildConfig(cli);
  const auto geom = ssfp::geometryOf(cfg);
  std::vector<double> grid;
  const int n = cfg.prefractalPoints;
  for (int i = 0; i < n; ++i)
    grid.push_back(n == 1 ? cfg.prefractalLnPhiMin
                          : cfg.prefractalLnPhiMin + (cfg.prefractalLnPhiMax - cfg.prefractalLnPhiMin) * i / (n - 1));
  const auto rows = ssfp::convergenceProbe(geom, cfg.prefractalW, cfg.generations, grid, cfg.threads);
  ensureDir(cfg.outDir);
  const auto path = cfg.outDir + "/prefractal.csv";
  ssfp::writeFile(path, ssfp::prefractalCsv(rows));
  std::cout << "wrote " << path << " (" << rows.size() << " rows, w = " << cfg.prefractalW << ")\n";
  return 0;
}

int commandSeedCheck(const Cli& cli) {
  const auto cfg = buildConfig(cli);
  const auto geom = ssfp::geometryOf(cfg);
  const auto window = ssfp::scanWindowOf(cfg);
  const int M = cfg.samplesPerPeriod;
  std::string csv = "ln_phi,seed_residual\n";
  int over = 0;
  double worst = 0;
  for (int i = 0; i < M; ++i) {
    const double lnPhi = window.lo + geom.lnAlpha * i / M;
    const double r = ssfp::seedResidual(cfg.seed, geom, lnPhi);
    csv += ssfp::formatDouble(lnPhi) + "," + ssfp::formatDouble(r) + "\n";
    worst = std::max(worst, r);
    if (!(r <= cfg.seedResidualTolerance)) ++over;
  }
  std::cout << csv;
  std::cerr << "max seed residual " << worst << " over [" << window.lo << ", " << window.lo + geom.lnAlpha << "), "
            << over << " of " << M << " above tolerance " << cfg.seedResidualTolerance << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transfer matrices of self-similar fractal potentials"};
  app.require_subcommand(1);
  app.fallthrough();
  Cli cli;
  app.add_option("--config", cli.configPath, "key=value configuration file");
  app.add_option("--out", cli.outDir, "output directory (overrides output.dir)");
  app.add_option("--set", cli.sets, "override one setting, key=value (repeatable)");
  app.add_option("--threads", cli.threads, "worker threads (overrides run.threads)")->check(CLI::PositiveNumber);

  auto* scanCmd = app.add_subcommand("scan", "extend the seed over the ln(phi) window, write scan.csv");
  auto* figCmd = app.add_subcommand("figure", "run one of the figure presets (1..7)");
  figCmd->add_option("id", cli.figure, "figure number 1-7")->required();
  auto* preCmd = app.add_subcommand("prefractal", "pre-fractal convergence probe, write prefractal.csv");
  auto* seedCmd = app.add_subcommand("seed-check", "print the seed residual over the base period");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (scanCmd->parsed()) return commandScan(cli);
    if (figCmd->parsed()) return commandFigure(cli);
    if (preCmd->parsed()) return commandPrefractal(cli);
    if (seedCmd->parsed()) return commandSeedCheck(cli);
  } catch (const ssfp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ssfp::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ssfp::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ssfp::ChainBreakError& e) {
    std::cerr << "chain break at level " << e.level() << ": " << e.what() << "\n";
    return kExitChainBreak;
  }
  return 0;
}
