#include "ssfp/geometry.hpp"

#include <cmath>
#include <string>

#include "ssfp/errors.hpp"

namespace ssfp {

SsfpGeometry SsfpGeometry::make(int N, double alpha) {
  if (N < 2) throw DomainError("geometry: N must be >= 2, got " + std::to_string(N));
  if (!(alpha > N) || !std::isfinite(alpha))
    throw DomainError("geometry: alpha must exceed N, got " + std::to_string(alpha));
  SsfpGeometry g;
  g.N = N;
  g.alpha = alpha;
  g.gamma = (alpha - N) / (alpha * (N - 1));
  g.lnAlpha = std::log(alpha);
  g.s = std::log(static_cast<double>(N)) / g.lnAlpha;
  return g;
}

SsfpGeometry SsfpGeometry::withDimension(int N, double s) {
  if (!(s > 0 && s < 1)) throw DomainError("geometry: fractal dimension must lie in (0, 1)");
  return make(N, std::pow(static_cast<double>(N), 1.0 / s));
}

}  // namespace ssfp
