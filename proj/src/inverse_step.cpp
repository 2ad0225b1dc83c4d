#include "ssfp/inverse_step.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "ssfp/errors.hpp"

namespace ssfp {
namespace {

using Complex = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;

// |tr(B)| within 1e-8 of 2.
constexpr double kParabolicBand = 0.5e-8;
constexpr double kProjectionTolerance = 1e-8;

// log(sinh z); only exp() of the result is used, so the branch of the
// imaginary part is irrelevant.
Complex logSinh(Complex z) {
  if (z.real() < 0) return Complex(0, kPi) + logSinh(-z);
  if (z.real() > 20) return z - kLn2 + std::log(1.0 - std::exp(-2.0 * z));
  return std::log(std::sinh(z));
}

// sinh(sqrt(w)) / sqrt(w), entire in w.
double sinhc(double w) {
  if (std::abs(w) < 1e-3) return 1 + w / 6 * (1 + w / 20 * (1 + w / 42));
  if (w > 0) {
    const double r = std::sqrt(w);
    return std::sinh(r) / r;
  }
  const double r = std::sqrt(-w);
  return std::sin(r) / r;
}

// acosh(x) for x >= 1 given ln x (x may be far outside double range).
double acoshFromLog(double logX) {
  return logX + std::log1p(std::sqrt(-std::expm1(-2 * logX)));
}

struct RawMatrix {
  double lnScale;
  Complex a11, a12, a21, a22;
};

// a*B + b*I for B in scaled form, with complex log-coefficients.
RawMatrix affineOfB(const TransferMatrixd& B, Complex logA, Complex logB) {
  const Complex logAe = logA + B.lnScale();
  double top = std::max(logAe.real(), logB.real());
  if (!std::isfinite(top)) top = std::isfinite(logAe.real()) ? logAe.real() : logB.real();
  const Complex ca = std::isfinite(logAe.real()) ? std::exp(logAe - top) : Complex(0);
  const Complex cb = std::isfinite(logB.real()) ? std::exp(logB - top) : Complex(0);
  return {top, ca * B.qHat() + cb, ca * B.pHat(), ca * std::conj(B.pHat()),
          ca * std::conj(B.qHat()) + cb};
}

RootCandidate finishCandidate(const RawMatrix& A, int branch, const TransferMatrixd& parent,
                              double gapPhase, int N, double tolerance) {
  // child = A * D(-g)
  const Complex em = std::polar(1.0, -gapPhase);
  const Complex ep = std::conj(em);
  const Complex c11 = A.a11 * em, c12 = A.a12 * ep, c21 = A.a21 * em, c22 = A.a22 * ep;
  const Complex q = 0.5 * (c11 + std::conj(c22));
  const Complex p = 0.5 * (c12 + std::conj(c21));

  RootCandidate out;
  out.branch = branch;
  out.projectionResidual =
      (std::abs(c11 - std::conj(c22)) + std::abs(c12 - std::conj(c21))) / (std::abs(c11) + std::abs(c12));
  if (std::abs(q) == 0 || !std::isfinite(std::abs(q)) || !std::isfinite(std::abs(p))) {
    out.roundTripError = std::numeric_limits<double>::infinity();
    return out;
  }
  out.child = TransferMatrixd(A.lnScale, q, p);
  out.roundTripError = relativeDeviation(chainCompose(out.child, gapPhase, N), parent);
  if (!std::isfinite(out.roundTripError)) out.roundTripError = std::numeric_limits<double>::infinity();
  out.valid = out.projectionResidual < kProjectionTolerance && out.roundTripError < tolerance;
  return out;
}

TransferMatrixd power(const TransferMatrixd& m, int n) {
  auto out = TransferMatrixd::identity();
  for (int i = 0; i < n; ++i) out = compose(out, m);
  return out;
}

// wx*X + wy*Y for symmetric-class matrices and real weights.
TransferMatrixd blend(const TransferMatrixd& x, double wx, const TransferMatrixd& y, double wy) {
  const double top = std::max(x.lnScale(), y.lnScale());
  const double sx = wx * std::exp(x.lnScale() - top);
  const double sy = wy * std::exp(y.lnScale() - top);
  return TransferMatrixd(top, sx * x.qHat() + sy * y.qHat(), sx * x.pHat() + sy * y.pHat());
}

// Principal N-th root of a parabolic B with tr(B) ~ +2, from the even series
// of sinh(L/N)/sinh(L) in L^2 = acosh(tau)^2, followed by Newton polishing
//   A <- ((N-1) A + B A^{1-N}) / N.
TransferMatrixd parabolicRoot(const TransferMatrixd& B, double tau, int N) {
  double z;
  if (tau >= 1) {
    const double L = acoshFromLog(std::log(tau));
    z = L * L;
  } else {
    const double theta = std::acos(tau);
    z = -theta * theta;
  }
  const double m = 1.0 - 1.0 / N;
  const double a = sinhc(z / (N * N)) / (N * sinhc(z));
  const double b = m * sinhc(z * m * m) / sinhc(z);
  const RawMatrix raw = affineOfB(B, Complex(std::log(a)), Complex(std::log(b)));
  auto A = TransferMatrixd(raw.lnScale, raw.a11, raw.a12);

  double err = relativeDeviation(power(A, N), B);
  for (int it = 0; it < 4 && err > 1e-15; ++it) {
    const auto correction = compose(B, power(inverse(A), N - 1));
    const auto next = blend(A, double(N - 1) / N, correction, 1.0 / N);
    const double nextErr = relativeDeviation(power(next, N), B);
    if (!(nextErr < err)) break;
    A = next;
    err = nextErr;
  }
  return A;
}

TransferMatrixd negate(const TransferMatrixd& m) {
  return TransferMatrixd::raw(m.lnScale(), -m.qHat(), -m.pHat());
}

RawMatrix toRaw(const TransferMatrixd& m) {
  return {m.lnScale(), m.qHat(), m.pHat(), std::conj(m.pHat()), std::conj(m.qHat())};
}

}  // namespace

std::string_view toString(MatrixClass cls) {
  switch (cls) {
    case MatrixClass::elliptic: return "elliptic";
    case MatrixClass::hyperbolic: return "hyperbolic";
    case MatrixClass::parabolic: return "parabolic";
    case MatrixClass::seed: return "seed";
  }
  return "unknown";
}

RootSet rootCandidates(const TransferMatrixd& parent, double gapPhase, int N, double tolerance) {
  if (N < 1) throw DomainError("rootCandidates: N must be >= 1");
  const auto B = compose(parent, propagation(gapPhase));
  const double re = B.qHat().real();
  const double logTau = re == 0 ? -std::numeric_limits<double>::infinity()
                                : B.lnScale() + std::log(std::abs(re));
  const double sign = re < 0 ? -1.0 : 1.0;

  RootSet out;
  out.halfTrace = sign * std::exp(logTau);

  if (std::abs(std::expm1(logTau)) < kParabolicBand) {
    out.cls = MatrixClass::parabolic;
    const double tauAbs = std::exp(logTau);
    if (sign < 0 && N % 2 == 0) return out;  // no real root of -I - K for even N
    const auto Bp = sign > 0 ? B : negate(B);
    auto A = parabolicRoot(Bp, tauAbs, N);
    if (sign < 0) A = negate(A);
    out.candidates.push_back(
        finishCandidate(toRaw(A), sign > 0 ? 0 : (N - 1) / 2, parent, gapPhase, N, tolerance));
    if (sign > 0 && N % 2 == 0)
      out.candidates.push_back(finishCandidate(toRaw(negate(A)), N / 2, parent, gapPhase, N, tolerance));
    return out;
  }

  // Eigenvalues of B are exp(+-Lambda).
  Complex lambda;
  if (logTau > 0) {
    out.cls = MatrixClass::hyperbolic;
    lambda = Complex(acoshFromLog(logTau), sign < 0 ? kPi : 0.0);
  } else {
    out.cls = MatrixClass::elliptic;
    lambda = Complex(0, std::acos(std::clamp(out.halfTrace, -1.0, 1.0)));
  }
  const Complex logSinhLambda = logSinh(lambda);

  out.candidates.reserve(N);
  for (int j = 0; j < N; ++j) {
    const Complex lambdaJ = (lambda + Complex(0, 2 * kPi * j)) / double(N);
    // f(B) = a B + b I with f(e^Lambda) = e^LambdaJ, f(e^-Lambda) = e^-LambdaJ
    const Complex logA = logSinh(lambdaJ) - logSinhLambda;
    const Complex logB = logSinh(lambda - lambdaJ) - logSinhLambda;
    out.candidates.push_back(finishCandidate(affineOfB(B, logA, logB), j, parent, gapPhase, N, tolerance));
  }
  return out;
}

BranchPredictor BranchPredictor::continuity(double lnT, double J) {
  BranchPredictor p;
  p.mode = Mode::continuity;
  p.lnT = lnT;
  p.J = J;
  return p;
}

BranchPredictor BranchPredictor::fromMatrix(const TransferMatrixd& m) {
  const auto params = toParams(m);
  return continuity(params.lnT, params.J);
}

BranchPredictor BranchPredictor::coherent(const TransferMatrixd& parent, double nextGapPhase, int N) {
  BranchPredictor p;
  p.mode = Mode::coherence;
  p.lnRT = lnReflectionRatio(parent) - 2 * std::log(double(N));
  p.phase = wrapAngle(nextGapPhase);
  return p.withLookahead(nextGapPhase, N);
}

BranchPredictor& BranchPredictor::withLookahead(double gap, int n) {
  lookahead = true;
  nextGapPhase = gap;
  N = n;
  return *this;
}

bool hasRealRootAbove(const TransferMatrixd& child, double nextGapPhase, int N) {
  if (N % 2 != 0) return true;
  const double re = (child.qHat() * std::polar(1.0, nextGapPhase)).real();
  if (re >= 0) return true;
  const double logTau = child.lnScale() + std::log(-re);
  return std::expm1(logTau) < -kParabolicBand;
}

int selectBranch(const RootSet& roots, const BranchPredictor& predictor, bool& ambiguous) {
  struct Scored {
    int index;
    bool viable;
    double primary;
    double secondary;
  };
  std::vector<Scored> scored;
  for (int i = 0; i < int(roots.candidates.size()); ++i) {
    const auto& c = roots.candidates[i];
    if (!c.valid) continue;
    const auto params = toParams(c.child);
    Scored s{i, !predictor.lookahead || hasRealRootAbove(c.child, predictor.nextGapPhase, predictor.N), 0, 0};
    if (predictor.mode == BranchPredictor::Mode::continuity) {
      s.primary = std::abs(params.lnT - predictor.lnT) / (1 + std::abs(predictor.lnT)) +
                  std::abs(wrapAngle(params.J - predictor.J));
    } else {
      double lnRT = lnReflectionRatio(c.child);
      if (!std::isfinite(lnRT)) lnRT = -1e300;
      s.primary = std::abs(lnRT - predictor.lnRT);
      s.secondary = std::abs(wrapAngle(params.J - predictor.phase));
    }
    scored.push_back(s);
  }
  ambiguous = false;
  if (scored.empty()) return -1;

  const double tieTol = 1e-9 * (1 + std::abs(predictor.lnRT));
  auto better = [&](const Scored& x, const Scored& y) {
    if (x.viable != y.viable) return x.viable;
    if (predictor.mode == BranchPredictor::Mode::coherence && std::abs(x.primary - y.primary) <= tieTol)
      return x.secondary < y.secondary;
    return x.primary < y.primary;
  };
  std::stable_sort(scored.begin(), scored.end(), better);
  if (scored.size() > 1) {
    const auto& a = scored[0];
    const auto& b = scored[1];
    ambiguous = a.viable == b.viable && b.primary <= 2 * a.primary;
    if (predictor.mode == BranchPredictor::Mode::coherence)
      ambiguous = ambiguous && b.secondary <= 2 * a.secondary;
  }
  return scored.front().index;
}

InverseStepResult inverseStep(const TransferMatrixd& parent, double gapPhase, const SsfpGeometry& geom,
                              const BranchPredictor& predictor, double tolerance) {
  const auto roots = rootCandidates(parent, gapPhase, geom.N, tolerance);
  if (roots.cls == MatrixClass::parabolic && roots.candidates.empty())
    throw ParabolicError("inverseStep: parabolic B with tr(B) = -2 has no real root for even N");
  bool ambiguous = false;
  const int pick = selectBranch(roots, predictor, ambiguous);
  if (pick < 0)
    throw ChainBreakError(-1, std::numeric_limits<double>::quiet_NaN(),
                          "inverseStep: no root branch reproduces the parent within tolerance");
  const auto& c = roots.candidates[pick];
  return {c.child, c.branch, roots.cls, c.roundTripError, c.projectionResidual, ambiguous};
}

InverseStepResult inverseStep(const TransferMatrixd& parent, double gapPhase, const SsfpGeometry& geom,
                              const TransferMatrixd& predictor, double tolerance) {
  return inverseStep(parent, gapPhase, geom, BranchPredictor::fromMatrix(predictor), tolerance);
}

}  // namespace ssfp
