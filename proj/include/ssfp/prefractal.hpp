#pragma once

// Finite-generation Cantor pre-fractals of rectangular barriers (or wells).
//
// Units: hbar = m = L = 1, so phi = k L = k and E = k^2 / 2. The strength w
// is the total area under the potential, W m L / hbar^2 in physical units.
// The layout lives on [0, 1]; every generation replaces an interval of width
// l by N copies of width l / alpha, flush to both ends and separated by N - 1
// gaps of width gamma l. Each copy carries 1/N of its parent's area, so the
// height at generation g is w (alpha / N)^g.
//
// Matrix convention: amplitudes are expressed in local coordinates of each
// element, products are taken leftmost element first, and an empty region of
// width d equals propagation(k d).

#include <vector>

#include "ssfp/geometry.hpp"
#include "ssfp/transfer_matrix.hpp"

namespace ssfp {

struct PrefractalSpec {
  SsfpGeometry geom;
  int generation = 0;
  double w = 1.0;  // > 0 barriers, < 0 wells

  double height() const;
  void validate() const;

  /// w = 3N, the strength singled out for the second solution family.
  static PrefractalSpec type2Power(const SsfpGeometry& geom, int generation);
};

struct Interval {
  double start = 0;
  double width = 0;
  double height = 0;
};

/// N^g intervals, sorted by start.
std::vector<Interval> generateIntervals(const PrefractalSpec& spec);

/// Rectangular barrier of the given height and width at wavenumber k > 0.
/// With z = 2 height - k^2 and w = z d^2:
///   q = C + (i d S / 2)(k - z / k),   p = -(i d S / 2)(k + z / k),
/// where C = cosh(sqrt w), S = sinh(sqrt w) / sqrt w (trigonometric for w < 0,
/// series near w = 0).
TransferMatrixd barrierMatrix(double height, double width, double k);

/// Textbook transmission of a single barrier, ln T.
double barrierLnTransmission(double height, double width, double k);

/// Interval-by-interval product with free propagation over the gaps.
TransferMatrixd prefractalMatrix(const PrefractalSpec& spec, double k);
TransferMatrixd prefractalMatrix(const std::vector<Interval>& intervals, double k, double length = 1.0);

/// Same matrix from the self-similar recursion
///   M_g(l) = chainCompose(M_{g-1}(l / alpha), k gamma l, N).
TransferMatrixd prefractalMatrixRecursive(const PrefractalSpec& spec, double k);

struct ProbeRow {
  int generation = 0;
  double lnPhi = 0;
  double lnT = 0;
  double lnRT = 0;
  double J = 0;
  double oracleDeviation = 0;  // brute force vs recursion; NaN when skipped
};

/// Per-generation tunneling parameters on a shared ln(phi) grid. The brute-force
/// product is evaluated only while N^g <= bruteForceLimit.
std::vector<ProbeRow> convergenceProbe(const SsfpGeometry& geom, double w, const std::vector<int>& generations,
                                       const std::vector<double>& lnPhiGrid, int threads = 1,
                                       long bruteForceLimit = 1L << 14);

}  // namespace ssfp
