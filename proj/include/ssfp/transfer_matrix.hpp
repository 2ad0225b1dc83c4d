#pragma once

// Log-scaled unimodular 2x2 transfer matrices
//
//   Z = [ q   p  ]      |q|^2 - |p|^2 = 1
//       [ p*  q* ]
//
// stored as Z = exp(lnScale) * [[qHat, pHat], [conj(pHat), conj(qHat)]].
// The scale factor carries the full dynamic range of 1/sqrt(T), which for
// deeply opaque matrices is far outside the range of a double.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <Eigen/Core>

#include "ssfp/errors.hpp"

namespace ssfp {

template <typename Scalar>
Scalar wrapAngle(Scalar angle) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  constexpr Scalar twoPi = 2 * pi;
  Scalar r = std::fmod(angle + pi, twoPi);
  if (r <= 0) r += twoPi;
  return r - pi;  // (-pi, pi]
}

/// Physical parametrization of a transfer matrix.
///   q = T^{-1/2} exp(-iJ),  p = sqrt(R/T) exp(i(pi/2 + F)),  R = 1 - T.
template <typename Scalar>
struct TunnelingParams {
  Scalar lnT{0};
  Scalar J{0};
  Scalar F{0};

  Scalar T() const { return std::exp(lnT); }
  Scalar R() const { return -std::expm1(lnT); }
  Scalar y() const { return std::numbers::pi_v<Scalar> / 2 - J; }
};

template <typename Scalar>
class TransferMatrix {
 public:
  using Complex = std::complex<Scalar>;
  using Dense = Eigen::Matrix<Complex, 2, 2>;

  TransferMatrix() : lnScale_(0), qHat_(1), pHat_(0) {}

  /// Entries are renormalized so that |qHat| = 1.
  TransferMatrix(Scalar lnScale, Complex qHat, Complex pHat, bool precisionLoss = false)
      : lnScale_(lnScale), qHat_(qHat), pHat_(pHat), precisionLoss_(precisionLoss) {
    const Scalar mag = std::abs(qHat_);
    if (mag > 0 && std::isfinite(mag)) {
      lnScale_ += std::log(mag);
      qHat_ /= mag;
      pHat_ /= mag;
    }
  }

  static TransferMatrix identity() { return TransferMatrix(); }

  /// Build from raw scaled entries without renormalization (tests, diagnostics).
  static TransferMatrix raw(Scalar lnScale, Complex qHat, Complex pHat) {
    TransferMatrix m;
    m.lnScale_ = lnScale;
    m.qHat_ = qHat;
    m.pHat_ = pHat;
    return m;
  }

  Scalar lnScale() const { return lnScale_; }
  const Complex& qHat() const { return qHat_; }
  const Complex& pHat() const { return pHat_; }
  bool precisionLoss() const { return precisionLoss_; }

  Scalar logAbsQ() const { return lnScale_ + std::log(std::abs(qHat_)); }
  Scalar logAbsP() const { return lnScale_ + std::log(std::abs(pHat_)); }

  /// Unscaled entries; overflow to inf when lnScale is large.
  Complex q() const { return std::exp(lnScale_) * qHat_; }
  Complex p() const { return std::exp(lnScale_) * pHat_; }

  Dense scaledDense() const {
    Dense m;
    m << qHat_, pHat_, std::conj(pHat_), std::conj(qHat_);
    return m;
  }

 private:
  Scalar lnScale_;
  Complex qHat_;
  Complex pHat_;
  bool precisionLoss_ = false;
};

using TransferMatrixd = TransferMatrix<double>;
using TunnelingParamsd = TunnelingParams<double>;

template <typename Scalar>
TransferMatrix<Scalar> fromParams(const TunnelingParams<Scalar>& params) {
  constexpr Scalar halfPi = std::numbers::pi_v<Scalar> / 2;
  if (!(params.lnT <= 0)) throw DomainError("fromParams: lnT must be <= 0 (T cannot exceed 1)");
  const Scalar reflect = std::sqrt(-std::expm1(params.lnT));  // sqrt(1 - T)
  return TransferMatrix<Scalar>(-params.lnT / 2, std::polar(Scalar(1), -params.J),
                                std::polar(reflect, halfPi + params.F));
}

/// lnT = -2 ln|q|. F = 0 when p = 0. ln(R/T) of nearly transparent matrices
/// should come from lnReflectionRatio(m), which reads |p| directly.
template <typename Scalar>
TunnelingParams<Scalar> toParams(const TransferMatrix<Scalar>& m) {
  constexpr Scalar halfPi = std::numbers::pi_v<Scalar> / 2;
  if (std::abs(m.qHat()) == 0) throw DegenerateMatrixError("toParams: q = 0 (total reflection)");
  TunnelingParams<Scalar> out;
  out.lnT = std::min(-2 * m.logAbsQ(), Scalar(0));
  out.J = wrapAngle(-std::arg(m.qHat()));
  out.F = std::abs(m.pHat()) == 0 ? Scalar(0) : wrapAngle(std::arg(m.pHat()) - halfPi);
  return out;
}

/// ln(R/T) = 2 ln|p|.
template <typename Scalar>
Scalar lnReflectionRatio(const TransferMatrix<Scalar>& m) {
  return 2 * m.logAbsP();
}

/// ln T = -ln(1 + R/T) from |p|. Agrees with toParams(m).lnT on unimodular
/// matrices but keeps full relative accuracy when T is close to 1.
template <typename Scalar>
Scalar lnTransmission(const TransferMatrix<Scalar>& m) {
  const Scalar lnRT = lnReflectionRatio(m);
  if (lnRT > 0) return -lnRT - std::log1p(std::exp(-lnRT));
  return -std::log1p(std::exp(lnRT));
}

/// ln(R/T) = ln(1 - T) - ln T.
template <typename Scalar>
Scalar lnReflectionRatio(const TunnelingParams<Scalar>& params) {
  return std::log(-std::expm1(params.lnT)) - params.lnT;
}

/// Free propagation D(phase) = diag(e^{i phase}, e^{-i phase}).
template <typename Scalar>
TransferMatrix<Scalar> propagation(Scalar phase) {
  return TransferMatrix<Scalar>::raw(0, std::polar(Scalar(1), phase), {0, 0});
}

template <typename Scalar>
TransferMatrix<Scalar> inverse(const TransferMatrix<Scalar>& m) {
  return TransferMatrix<Scalar>::raw(m.lnScale(), std::conj(m.qHat()), -m.pHat());
}

/// Ordinary matrix product a*b. Flags the result when the (1,1) entry
/// cancels below 1e-300 of the working magnitude.
template <typename Scalar>
TransferMatrix<Scalar> compose(const TransferMatrix<Scalar>& a, const TransferMatrix<Scalar>& b) {
  const auto prod = (a.scaledDense() * b.scaledDense()).eval();
  const Scalar working =
      std::abs(a.qHat() * b.qHat()) + std::abs(a.pHat() * std::conj(b.pHat()));
  const bool lost = std::abs(prod(0, 0)) <= Scalar(1e-300) * working || a.precisionLoss() ||
                    b.precisionLoss();
  return TransferMatrix<Scalar>(a.lnScale() + b.lnScale(), prod(0, 0), prod(0, 1), lost);
}

template <typename Scalar>
TransferMatrix<Scalar> operator*(const TransferMatrix<Scalar>& a, const TransferMatrix<Scalar>& b) {
  return compose(a, b);
}

/// unit * (D(gapPhase) * unit)^(n-1), as n-1 explicit products.
template <typename Scalar>
TransferMatrix<Scalar> chainComposeProduct(const TransferMatrix<Scalar>& unit, Scalar gapPhase, int n) {
  if (n < 1) throw DomainError("chainCompose: count must be >= 1");
  const auto step = compose(propagation(gapPhase), unit);
  auto out = unit;
  for (int i = 1; i < n; ++i) out = compose(out, step);
  return out;
}

/// unit * (D(gapPhase) * unit)^(n-1) = M^n D(-gapPhase) with M = unit * D(gapPhase).
///
/// With tau = tr(M)/2 and K = M - tau I (traceless part, read off exactly),
///   M^n = T_n(tau) I + U_{n-1}(tau) K
/// from the Chebyshev polynomials of the first and second kind. Repeated
/// products lose about log10(|M| / |tau|) digits per factor when M is nearly
/// traceless, which is the normal state of deep opaque units; the split form
/// also avoids the n M - (n-1) I cancellation of nearly transparent units.
template <typename Scalar>
TransferMatrix<Scalar> chainCompose(const TransferMatrix<Scalar>& unit, Scalar gapPhase, int n) {
  using Complex = std::complex<Scalar>;
  if (n < 1) throw DomainError("chainCompose: count must be >= 1");
  if (n == 1) return unit;
  auto m = compose(unit, propagation(gapPhase));
  // Nearly transparent units: remove the rounding-level determinant defect
  // first. The polynomial form assumes det = 1 exactly and would otherwise
  // amplify it, roughly by |M| / |K| per level of a recursion. For opaque
  // units the defect cannot be resolved in the scaled entries and is harmless.
  Scalar lnDetHalf = 0;
  {
    const Scalar aq = std::abs(m.qHat()), ap = std::abs(m.pHat());
    const Scalar detHat = (aq - ap) * (aq + ap);
    if (detHat > Scalar(0.5)) {
      lnDetHalf = m.lnScale() + std::log(detHat) / 2;
      m = TransferMatrix<Scalar>(m.lnScale() - lnDetHalf, m.qHat(), m.pHat(), m.precisionLoss());
    }
  }
  const Scalar L = m.lnScale();
  const Scalar re = m.qHat().real();

  // X_k / r^k with r = max(1, 2|tau|) keeps both recurrences in range
  const Scalar logTwoTau = re == 0 ? -std::numeric_limits<Scalar>::infinity() : L + std::log(2 * std::abs(re));
  const Scalar lnR = std::max(Scalar(0), logTwoTau);
  const Scalar x = re == 0 ? Scalar(0) : std::copysign(std::exp(logTwoTau - lnR), re);
  const Scalar rInv2 = std::exp(-2 * lnR);
  Scalar tPrev = 1, t = x / 2;  // T_0, T_1
  Scalar uPrev = 1, u = x;      // U_0, U_1
  for (int k = 2; k < n; ++k) {
    const Scalar tn = x * t - rInv2 * tPrev;
    tPrev = t;
    t = tn;
    const Scalar un = x * u - rInv2 * uPrev;
    uPrev = u;
    u = un;
  }
  // t ~ T_{n-1}, u ~ U_{n-1}; one more step for T_n
  const Scalar tn = x * t - rInv2 * tPrev;
  // common factor e^{(n-1) lnR + L}
  const Complex q = tn * std::exp(lnR - L) + u * Complex(0, m.qHat().imag());
  const TransferMatrix<Scalar> power((n - 1) * lnR + L + n * lnDetHalf, q, u * m.pHat(), m.precisionLoss());
  return compose(power, propagation(-gapPhase));
}

/// | |q|^2 - |p|^2 - 1 | / |q|^2, evaluated on the scaled entries.
template <typename Scalar>
Scalar determinantDefect(const TransferMatrix<Scalar>& m) {
  const Scalar aq = std::abs(m.qHat());
  const Scalar ap = std::abs(m.pHat());
  const Scalar detHat = (aq - ap) * (aq + ap);
  return std::abs(detHat - std::exp(-2 * m.lnScale())) / (aq * aq);
}

/// Relative distance |A - B| / |B| over the (q, p) entries, scales aligned.
template <typename Scalar>
Scalar relativeDeviation(const TransferMatrix<Scalar>& a, const TransferMatrix<Scalar>& b) {
  const Scalar top = std::max(a.lnScale(), b.lnScale());
  const Scalar wa = std::exp(a.lnScale() - top);
  const Scalar wb = std::exp(b.lnScale() - top);
  const Scalar diff = std::abs(wa * a.qHat() - wb * b.qHat()) + std::abs(wa * a.pHat() - wb * b.pHat());
  const Scalar norm = std::abs(wb * b.qHat()) + std::abs(wb * b.pHat());
  return diff / norm;
}

}  // namespace ssfp
