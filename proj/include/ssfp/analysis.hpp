#pragma once

// Asymptote fits on ln(R/T) curves: left region on ln ln(R/T), middle region
// on ln(R/T) itself, right region on the envelope of resonance peaks.

#include <string>
#include <string_view>
#include <vector>

#include "ssfp/extension.hpp"
#include "ssfp/geometry.hpp"

namespace ssfp {

struct XY {
  double x = 0;
  double y = 0;
};

struct FitResult {
  double slope = 0;
  double intercept = 0;
  double rmsResidual = 0;
  int pointCount = 0;
  bool valid = false;
  std::string note;  // reason when not valid
};

/// Ordinary least squares. Throws InsufficientDataError for fewer than 3
/// points and SingularFitError when all x coincide.
FitResult fitLine(const std::vector<XY>& points);

/// Points that are strict maxima of y within +-halfWindow in x. Input must be
/// sorted by x; non-finite y are ignored. Throws InsufficientDataError when
/// fewer than 3 maxima remain.
std::vector<XY> envelope(const std::vector<XY>& points, double halfWindow);

/// Strict minima, same rules.
std::vector<XY> lowerEnvelope(const std::vector<XY>& points, double halfWindow);

enum class MiddleClass { fractalSlope, classicalSlope, indeterminate };

std::string_view toString(MiddleClass c);

struct RegimeWindows {
  Window left;
  Window middle;
  Window right;
};

struct RegimeReport {
  FitResult leftFit;           // ln ln(R/T) vs ln phi
  FitResult middleFit;         // ln(R/T) vs ln phi
  FitResult rightEnvelopeFit;  // envelope of ln(R/T) vs ln phi
  MiddleClass middleClass = MiddleClass::indeterminate;
};

constexpr double kSlopeTolerance = 0.15;

/// Nearest of {-2s, -2} within kSlopeTolerance; indeterminate when neither or
/// both qualify.
MiddleClass classifySlope(double slope, const SsfpGeometry& geom, double tolerance = kSlopeTolerance);

/// Throws DomainError unless the windows are ordered and disjoint. Fits that
/// cannot be formed come back with valid = false.
RegimeReport classify(const std::vector<ChainPoint>& points, const SsfpGeometry& geom,
                      const RegimeWindows& windows, double envelopeHalfWindow = 0.5);

std::vector<XY> lnRTSeries(const std::vector<ChainPoint>& points, Window window);

}  // namespace ssfp
