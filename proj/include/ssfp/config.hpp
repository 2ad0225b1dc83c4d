#pragma once

// Run configuration: flat "dotted.key = value" text, '#' starts a comment.
// Later settings override earlier ones, so command-line --set pairs are
// applied after the file.

#include <string>
#include <vector>

#include "ssfp/analysis.hpp"
#include "ssfp/extension.hpp"
#include "ssfp/seed.hpp"

namespace ssfp {

struct RunConfig {
  int N = 2;
  double alpha = 4.0;
  TypeIIISeed seed;

  bool lnPhiMinAuto = true;  // seed depth where |c| phi^-s = seedDepth
  double lnPhiMin = 0;
  double lnPhiMax = 25;
  double seedDepth = 600;
  int samplesPerPeriod = 200;

  double roundTripTolerance = 1e-8;
  double seedResidualTolerance = 1e-2;

  bool windowsSet = false;
  RegimeWindows windows;
  double envelopeHalfWindow = 0.5;

  std::string outDir = ".";
  int threads = 1;

  double prefractalW = 1.0;
  std::vector<int> generations{0};
  double prefractalLnPhiMin = -3;
  double prefractalLnPhiMax = 5;
  int prefractalPoints = 200;
};

/// Throws ConfigError naming the key for unknown keys or unparsable values.
void applySetting(RunConfig& cfg, const std::string& key, const std::string& value);

/// "key=value" as given to --set.
void applyAssignment(RunConfig& cfg, const std::string& assignment);

/// Throws IoError if unreadable, ConfigError (with file:line context) on bad lines.
void loadConfigFile(RunConfig& cfg, const std::string& path);

/// Checks every field against the module preconditions; throws ConfigError.
void validate(const RunConfig& cfg);

SsfpGeometry geometryOf(const RunConfig& cfg);
Window scanWindowOf(const RunConfig& cfg);
ExtensionOptions extensionOptionsOf(const RunConfig& cfg);

}  // namespace ssfp
