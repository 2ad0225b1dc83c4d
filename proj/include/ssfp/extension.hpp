#pragma once

// Extension of a small-phi seed over the whole ln(phi) axis by repeated
// inverse renormalization steps. A base window of width ln(alpha) is seeded;
// each level multiplies phi by alpha, so the levels tile the axis.

#include <string>
#include <vector>

#include "ssfp/inverse_step.hpp"
#include "ssfp/seed.hpp"

namespace ssfp {

struct ExtensionOptions {
  int samplesPerPeriod = 200;
  double roundTripTolerance = 1e-8;
  // Base points whose seed residual exceeds this are still used, but counted
  // in ScanResult::seedWarnings. Negative disables the check.
  double seedTolerance = -1;
  int threads = 1;
  // Branch selection follows the neighbouring points while the gap phase
  // changes by less than this per sample; otherwise coherent addition is used.
  double resolvedPhaseStep = 0.1;
};

struct ChainPoint {
  double lnPhi = 0;
  TunnelingParamsd params;
  double lnRT = 0;
  int branch = -1;  // -1 for seed points
  double roundTripError = 0;
  double projectionResidual = 0;
  MatrixClass cls = MatrixClass::seed;
  bool ambiguous = false;
  int level = 0;
  int baseIndex = 0;
  double detDefect = 0;
  TransferMatrixd matrix;
};

struct ChainBreak {
  int baseIndex = 0;
  int level = 0;
  double lnPhi = 0;
  std::string reason;
};

struct Window {
  double lo = 0;
  double hi = 0;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

struct ScanResult {
  std::vector<ChainPoint> points;  // sorted by lnPhi
  std::vector<ChainBreak> breaks;
  std::vector<double> seedResiduals;  // per base point
  int seedWarnings = 0;
  int ambiguousCount = 0;
};

ChainPoint seedPoint(const TunnelingParamsd& params, double lnPhi, int baseIndex);

/// Single chain from baseLnPhi upward, `levels` steps. Each step picks the
/// branch by coherent addition (see BranchPredictor::coherent). Throws
/// ChainBreakError naming the level when no branch passes the round trip.
std::vector<ChainPoint> extendChain(const TypeIIISeed& spec, const SsfpGeometry& geom, double baseLnPhi,
                                    int levels, const ExtensionOptions& options = {});

/// Level-synchronized scan over [window.lo, window.hi]. Chain breaks stop the
/// affected chain and are reported, not thrown.
ScanResult scan(const TypeIIISeed& spec, const SsfpGeometry& geom, Window window,
                const ExtensionOptions& options = {});

ScanResult genericSeedScan(const SeedFunction& seed, const SsfpGeometry& geom, Window window,
                           const ExtensionOptions& options = {});

/// Number of levels above the base period needed to cover the window.
int levelCount(const SsfpGeometry& geom, Window window);

}  // namespace ssfp
