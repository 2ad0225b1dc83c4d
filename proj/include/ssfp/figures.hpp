#pragma once

// Presets for the seven reference ln(R/T) figures: parameter sets, the
// asymptote lines quoted in the captions, and calibrated region windows.

#include <cmath>
#include <string>
#include <vector>

#include "ssfp/analysis.hpp"
#include "ssfp/extension.hpp"
#include "ssfp/seed.hpp"

namespace ssfp {

struct FigureCurve {
  std::string label;  // used in file names
  int N = 2;
  double alpha = 4;
  TypeIIISeed seed;
  MiddleClass expectedMiddle = MiddleClass::indeterminate;
  RegimeWindows windows;
  double lnPhiMax = 25;
};

struct FigureAsymptote {
  std::string marker;  // "points" or "circles"
  double intercept = 0;
  bool fractalSlope = true;  // -2s ln(phi) when true, -2 ln(phi) otherwise
  std::vector<std::string> curves;  // curve labels the line is drawn against
};

struct FigurePreset {
  int id = 0;
  std::string caption;
  std::vector<FigureCurve> curves;
  std::vector<FigureAsymptote> asymptotes;
};

/// Throws ConfigError("figure") unless 1 <= id <= 7.
FigurePreset figurePreset(int id);

struct CurveResult {
  FigureCurve curve;
  SsfpGeometry geom;
  ScanResult scan;
  RegimeReport report;
  FitResult lowerEnvelopeFit;  // troughs of the right region
  double seconds = 0;
};

struct AsymptoteCheck {
  std::string marker;
  std::string curve;
  bool fractalSlope = true;
  double claimedSlope = 0;
  double claimedIntercept = 0;
  FitResult fit;  // right envelope for -2s lines, middle fit for -2 lines
  // mean of y - claimedSlope * x over the same points: the intercept of the
  // best line with the caption's slope
  double pinnedIntercept = std::nan("");
};

struct FigureResult {
  FigurePreset preset;
  std::vector<CurveResult> curves;
  std::vector<AsymptoteCheck> checks;
  double seconds = 0;
};

struct FigureOptions {
  int samplesPerPeriod = 200;
  double seedDepth = 600;
  double roundTripTolerance = 1e-8;
  double envelopeHalfWindow = 0.5;
  int threads = 1;
};

FigureResult runFigure(const FigurePreset& preset, const FigureOptions& options = {});

std::string figureReport(const FigureResult& result);

/// Writes fig<id>_<label>.csv per curve, fig<id>_asymptotes.csv and
/// fig<id>_report.txt into outDir. Returns the written paths.
std::vector<std::string> writeFigureOutputs(const FigureResult& result, const std::string& outDir);

}  // namespace ssfp
