#pragma once

namespace ssfp {

/// Generalized Cantor geometry: each level holds N copies scaled down by
/// alpha, separated by N-1 equal gaps of relative width gamma.
struct SsfpGeometry {
  int N = 2;
  double alpha = 3.0;
  double gamma = 1.0 / 3.0;  // (alpha - N) / (alpha (N - 1))
  double s = 0.0;            // ln N / ln alpha
  double lnAlpha = 0.0;

  /// Throws DomainError unless N >= 2 and alpha > N.
  static SsfpGeometry make(int N, double alpha);

  /// Geometry with fractal dimension s and N copies: alpha = N^{1/s}.
  static SsfpGeometry withDimension(int N, double s);
};

}  // namespace ssfp
