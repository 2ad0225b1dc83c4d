#include "ssfp/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ssfp/errors.hpp"

namespace ssfp {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parseReal(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x))
    throw ConfigError(key, "expected a finite number, got '" + v + "'");
  return x;
}

int parseInt(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || x < -1000000000 || x > 1000000000)
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  return static_cast<int>(x);
}

Window parseWindow(const std::string& key, const std::string& v) {
  const auto comma = v.find(',');
  if (comma == std::string::npos) throw ConfigError(key, "expected 'lo,hi', got '" + v + "'");
  return {parseReal(key, trim(v.substr(0, comma))), parseReal(key, trim(v.substr(comma + 1)))};
}

// "0,1,2" or "0-6"
std::vector<int> parseGenerations(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const auto dash = item.find('-', 1);
    if (dash != std::string::npos) {
      const int a = parseInt(key, trim(item.substr(0, dash)));
      const int b = parseInt(key, trim(item.substr(dash + 1)));
      if (b < a) throw ConfigError(key, "descending range '" + item + "'");
      for (int g = a; g <= b; ++g) out.push_back(g);
    } else {
      out.push_back(parseInt(key, item));
    }
  }
  if (out.empty()) throw ConfigError(key, "generation list is empty");
  return out;
}

}  // namespace

void applySetting(RunConfig& cfg, const std::string& rawKey, const std::string& rawValue) {
  const std::string key = trim(rawKey);
  const std::string v = trim(rawValue);
  if (key == "geom.N") cfg.N = parseInt(key, v);
  else if (key == "geom.alpha") cfg.alpha = parseReal(key, v);
  else if (key == "geom.s") {
    const double s = parseReal(key, v);
    if (!(s > 0 && s < 1)) throw ConfigError(key, "fractal dimension must lie in (0, 1)");
    cfg.alpha = std::pow(double(cfg.N), 1.0 / s);
  }
  else if (key == "seed.c") cfg.seed.c = parseReal(key, v);
  else if (key == "seed.F") cfg.seed.F = parseReal(key, v);
  else if (key == "seed.omega.kind") {
    if (v == "constant") cfg.seed.omega.kind = OmegaSpec::Kind::constant;
    else if (v == "sinusoidal") cfg.seed.omega.kind = OmegaSpec::Kind::sinusoidal;
    else throw ConfigError(key, "expected 'constant' or 'sinusoidal', got '" + v + "'");
  }
  else if (key == "seed.omega.value") cfg.seed.omega.value = parseReal(key, v);
  else if (key == "seed.omega.amplitude") cfg.seed.omega.amplitude = parseReal(key, v);
  else if (key == "seed.omega.offset") cfg.seed.omega.offset = parseReal(key, v);
  else if (key == "grid.ln_phi_min") {
    if (v == "auto") {
      cfg.lnPhiMinAuto = true;
    } else {
      cfg.lnPhiMinAuto = false;
      cfg.lnPhiMin = parseReal(key, v);
    }
  }
  else if (key == "grid.ln_phi_max") cfg.lnPhiMax = parseReal(key, v);
  else if (key == "grid.seed_depth") cfg.seedDepth = parseReal(key, v);
  else if (key == "grid.samples_per_period") cfg.samplesPerPeriod = parseInt(key, v);
  else if (key == "tolerance.round_trip") cfg.roundTripTolerance = parseReal(key, v);
  else if (key == "tolerance.seed_residual") cfg.seedResidualTolerance = parseReal(key, v);
  else if (key == "windows.left") { cfg.windows.left = parseWindow(key, v); cfg.windowsSet = true; }
  else if (key == "windows.middle") { cfg.windows.middle = parseWindow(key, v); cfg.windowsSet = true; }
  else if (key == "windows.right") { cfg.windows.right = parseWindow(key, v); cfg.windowsSet = true; }
  else if (key == "windows.envelope_half_width") cfg.envelopeHalfWindow = parseReal(key, v);
  else if (key == "output.dir") {
    if (v.empty()) throw ConfigError(key, "empty path");
    cfg.outDir = v;
  }
  else if (key == "run.threads") cfg.threads = parseInt(key, v);
  else if (key == "prefractal.w") {
    cfg.prefractalW = v == "type2-power" ? 3.0 * cfg.N : parseReal(key, v);
  }
  else if (key == "prefractal.preset") {
    if (v != "type2-power") throw ConfigError(key, "unknown preset '" + v + "'");
    cfg.prefractalW = 3.0 * cfg.N;
  }
  else if (key == "prefractal.generations") cfg.generations = parseGenerations(key, v);
  else if (key == "prefractal.ln_phi_min") cfg.prefractalLnPhiMin = parseReal(key, v);
  else if (key == "prefractal.ln_phi_max") cfg.prefractalLnPhiMax = parseReal(key, v);
  else if (key == "prefractal.points") cfg.prefractalPoints = parseInt(key, v);
  else throw ConfigError(key, "unknown configuration key");
}

void applyAssignment(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError(trim(assignment), "expected key=value");
  applySetting(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void loadConfigFile(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open configuration file");
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineNo), "expected key=value");
    applySetting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

void validate(const RunConfig& cfg) {
  if (cfg.N < 2) throw ConfigError("geom.N", "must be >= 2");
  if (!(cfg.alpha > cfg.N)) throw ConfigError("geom.alpha", "must exceed geom.N");
  try {
    cfg.seed.omega.validate();
  } catch (const DomainError& e) {
    throw ConfigError(cfg.seed.omega.kind == OmegaSpec::Kind::constant ? "seed.omega.value" : "seed.omega.offset",
                      e.what());
  }
  if (cfg.seed.c == 0) throw ConfigError("seed.c", "must be nonzero");
  if (!(cfg.seedDepth > 0)) throw ConfigError("grid.seed_depth", "must be positive");
  if (cfg.samplesPerPeriod < 2) throw ConfigError("grid.samples_per_period", "must be >= 2");
  if (!(scanWindowOf(cfg).hi > scanWindowOf(cfg).lo))
    throw ConfigError("grid.ln_phi_max", "must exceed grid.ln_phi_min");
  if (!(cfg.roundTripTolerance > 0)) throw ConfigError("tolerance.round_trip", "must be positive");
  if (!(cfg.seedResidualTolerance > 0)) throw ConfigError("tolerance.seed_residual", "must be positive");
  if (cfg.windowsSet) {
    const auto& w = cfg.windows;
    if (!(w.left.lo < w.left.hi)) throw ConfigError("windows.left", "lo must be below hi");
    if (!(w.middle.lo < w.middle.hi)) throw ConfigError("windows.middle", "lo must be below hi");
    if (!(w.right.lo < w.right.hi)) throw ConfigError("windows.right", "lo must be below hi");
    if (w.middle.lo < w.left.hi) throw ConfigError("windows.middle", "overlaps windows.left");
    if (w.right.lo < w.middle.hi) throw ConfigError("windows.right", "overlaps windows.middle");
  }
  if (!(cfg.envelopeHalfWindow > 0)) throw ConfigError("windows.envelope_half_width", "must be positive");
  if (cfg.threads < 1) throw ConfigError("run.threads", "must be >= 1");
  for (int g : cfg.generations)
    if (g < 0 || g > 40) throw ConfigError("prefractal.generations", "generations must lie in [0, 40]");
  if (!(cfg.prefractalLnPhiMax >= cfg.prefractalLnPhiMin))
    throw ConfigError("prefractal.ln_phi_max", "must not be below prefractal.ln_phi_min");
  if (cfg.prefractalPoints < 1) throw ConfigError("prefractal.points", "must be >= 1");
}

SsfpGeometry geometryOf(const RunConfig& cfg) { return SsfpGeometry::make(cfg.N, cfg.alpha); }

Window scanWindowOf(const RunConfig& cfg) {
  if (!cfg.lnPhiMinAuto) return {cfg.lnPhiMin, cfg.lnPhiMax};
  if (cfg.N < 2 || !(cfg.alpha > cfg.N) || cfg.seed.c == 0) return {cfg.lnPhiMax, cfg.lnPhiMax};
  return {seedDepthLnPhi(cfg.seed, geometryOf(cfg), cfg.seedDepth), cfg.lnPhiMax};
}

ExtensionOptions extensionOptionsOf(const RunConfig& cfg) {
  ExtensionOptions o;
  o.samplesPerPeriod = cfg.samplesPerPeriod;
  o.roundTripTolerance = cfg.roundTripTolerance;
  o.seedTolerance = cfg.seedResidualTolerance;
  o.threads = cfg.threads;
  return o;
}

}  // namespace ssfp
