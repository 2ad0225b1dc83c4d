#include "ssfp/seed.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ssfp/errors.hpp"

namespace ssfp {
namespace {

constexpr double kLn2 = std::numbers::ln2;

double logCosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2 * a)) - kLn2;
}

double logSinhPositive(double x) {
  if (x > 20) return x - kLn2 + std::log1p(-std::exp(-2 * x));
  return std::log(std::sinh(x));
}

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

OmegaSpec OmegaSpec::constant(double value) {
  OmegaSpec o;
  o.kind = Kind::constant;
  o.value = value;
  return o;
}

OmegaSpec OmegaSpec::sinusoidal(double amplitude, double offset) {
  OmegaSpec o;
  o.kind = Kind::sinusoidal;
  o.amplitude = amplitude;
  o.offset = offset;
  return o;
}

void OmegaSpec::validate() const {
  switch (kind) {
    case Kind::constant:
      if (value == 0 || !std::isfinite(value)) throw DomainError("omega: constant value must be nonzero");
      break;
    case Kind::sinusoidal:
      if (amplitude == 0 || !std::isfinite(amplitude))
        throw DomainError("omega: amplitude must be nonzero");
      if (!(std::abs(offset) > 1) || !std::isfinite(offset))
        throw DomainError("omega: |offset| must exceed 1 so that omega never vanishes");
      break;
  }
}

double OmegaSpec::operator()(double lnPhi, double lnAlpha) const {
  if (kind == Kind::constant) return value;
  const double turns = lnPhi / lnAlpha;
  const double frac = turns - std::floor(turns);
  return amplitude * (std::sin(2 * std::numbers::pi * frac) + offset);
}

void TypeIIISeed::validate() const {
  if (c == 0 || !std::isfinite(c)) throw DomainError("seed: c must be a nonzero constant");
  if (!std::isfinite(F)) throw DomainError("seed: F must be finite");
  omega.validate();
}

double seedLnReflectionRatio(const TypeIIISeed& spec, const SsfpGeometry& geom, double lnPhi) {
  const double w = spec.omega(lnPhi, geom.lnAlpha);
  const double logU = std::log(std::abs(spec.c)) - geom.s * lnPhi;
  if (logU < -745) return -std::numeric_limits<double>::infinity();
  const double logSinhU = logU > 700 ? std::exp(logU) - kLn2 : logSinhPositive(std::exp(logU));
  return 2 * logCosh(w) + 2 * logSinhU;
}

TunnelingParamsd seedParams(const TypeIIISeed& spec, const SsfpGeometry& geom, double lnPhi) {
  const double w = spec.omega(lnPhi, geom.lnAlpha);
  const double lnRT = seedLnReflectionRatio(spec, geom, lnPhi);
  const double logU = std::log(std::abs(spec.c)) - geom.s * lnPhi;
  const double tanhU = logU > 700 ? 1.0 : std::tanh(std::exp(logU));
  TunnelingParamsd out;
  out.lnT = std::isinf(lnRT) ? 0.0 : -softplus(lnRT);
  out.J = std::atan(std::sinh(w) * std::copysign(tanhU, spec.c));
  out.F = spec.F;
  return out;
}

SeedFunction typeIIISeedFunction(const TypeIIISeed& spec, const SsfpGeometry& geom) {
  return [spec, geom](double lnPhi) { return seedParams(spec, geom, lnPhi); };
}

double seedResidual(const SeedFunction& seed, const SsfpGeometry& geom, double lnPhi) {
  const auto child = fromParams(seed(lnPhi + geom.lnAlpha));
  const auto rhs = toParams(chainCompose(child, geom.gamma * std::exp(lnPhi), geom.N));
  const auto lhs = seed(lnPhi);
  const double dLnT = std::abs(rhs.lnT - lhs.lnT) / (1 + std::abs(lhs.lnT));
  const double dJ = std::abs(wrapAngle(rhs.J - lhs.J));
  return std::max(dLnT, dJ);
}

double seedResidual(const TypeIIISeed& spec, const SsfpGeometry& geom, double lnPhi) {
  return seedResidual(typeIIISeedFunction(spec, geom), geom, lnPhi);
}

double seedDepthLnPhi(const TypeIIISeed& spec, const SsfpGeometry& geom, double depth) {
  // |c| phi^-s = depth  =>  ln phi = (ln|c| - ln depth) / s
  return (std::log(std::abs(spec.c)) - std::log(depth)) / geom.s;
}

}  // namespace ssfp
