#pragma once

#include <functional>

#include "ssfp/geometry.hpp"
#include "ssfp/transfer_matrix.hpp"

namespace ssfp {

/// Real function omega(ln phi), periodic with period ln(alpha).
///   constant:    omega = value
///   sinusoidal:  omega = amplitude * (sin(2 pi ln(phi) / ln(alpha)) + offset)
struct OmegaSpec {
  enum class Kind { constant, sinusoidal };

  Kind kind = Kind::constant;
  double value = 1.0;
  double amplitude = 0.0;
  double offset = 0.0;

  static OmegaSpec constant(double value);
  static OmegaSpec sinusoidal(double amplitude, double offset);

  /// Throws DomainError if omega can vanish.
  void validate() const;

  double operator()(double lnPhi, double lnAlpha) const;
};

/// Small-phi closed form of the third solution family:
///   T = 1 / (1 + cosh^2(omega) sinh^2(c phi^-s)),
///   J = atan(sinh(omega) tanh(c phi^-s)).
struct TypeIIISeed {
  double c = 0.001;
  OmegaSpec omega = OmegaSpec::constant(1.0);
  double F = 0.0;

  void validate() const;
};

using SeedFunction = std::function<TunnelingParamsd(double lnPhi)>;

TunnelingParamsd seedParams(const TypeIIISeed& spec, const SsfpGeometry& geom, double lnPhi);

/// ln(R/T) of the seed, evaluated without forming T.
double seedLnReflectionRatio(const TypeIIISeed& spec, const SsfpGeometry& geom, double lnPhi);

SeedFunction typeIIISeedFunction(const TypeIIISeed& spec, const SsfpGeometry& geom);

/// Distance between the seed at lnPhi and the right-hand side of the
/// functional equation built from the seed at lnPhi + ln(alpha):
///   max(|dlnT| / (1 + |lnT|), |dJ|).
double seedResidual(const SeedFunction& seed, const SsfpGeometry& geom, double lnPhi);
double seedResidual(const TypeIIISeed& spec, const SsfpGeometry& geom, double lnPhi);

/// Largest lnPhi at which |c| phi^-s still reaches `depth`.
double seedDepthLnPhi(const TypeIIISeed& spec, const SsfpGeometry& geom, double depth);

}  // namespace ssfp
