#include "ssfp/prefractal.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <thread>

#include "ssfp/errors.hpp"

namespace ssfp {
namespace {

using Complex = std::complex<double>;

void checkWave(double k, double width) {
  if (!(k > 0)) throw DomainError("barrier: k must be positive");
  if (!(width > 0)) throw DomainError("barrier: width must be positive");
}

}  // namespace

double PrefractalSpec::height() const {
  return w * std::pow(geom.alpha / geom.N, generation);
}

void PrefractalSpec::validate() const {
  if (generation < 0) throw DomainError("prefractal: generation must be >= 0");
  if (!std::isfinite(w)) throw DomainError("prefractal: w must be finite");
}

PrefractalSpec PrefractalSpec::type2Power(const SsfpGeometry& geom, int generation) {
  return {geom, generation, 3.0 * geom.N};
}

std::vector<Interval> generateIntervals(const PrefractalSpec& spec) {
  spec.validate();
  std::vector<double> starts{0.0};
  double width = 1.0;
  for (int g = 0; g < spec.generation; ++g) {
    const double child = width / spec.geom.alpha;
    const double pitch = child + spec.geom.gamma * width;
    std::vector<double> next;
    next.reserve(starts.size() * spec.geom.N);
    for (double s : starts)
      for (int j = 0; j < spec.geom.N; ++j) next.push_back(s + j * pitch);
    starts = std::move(next);
    width = child;
  }
  const double h = spec.height();
  std::vector<Interval> out;
  out.reserve(starts.size());
  for (double s : starts) out.push_back({s, width, h});
  return out;
}

TransferMatrixd barrierMatrix(double height, double width, double k) {
  checkWave(k, width);
  const double z = 2 * height - k * k;
  const double d = width;
  const double w = z * d * d;

  if (w > 1.0) {
    // Evaluated with the factor e^{kappa d} / 2 pulled out.
    const double kappa = std::sqrt(z);
    const double e = std::exp(-2 * kappa * d);
    const double s = (1 - e) / kappa;  // 2 sinh(kappa d) e^{-kappa d} / kappa
    const Complex q(1 + e, 0.5 * s * (k - z / k));
    const Complex p(0, -0.5 * s * (k + z / k));
    return TransferMatrixd(kappa * d - std::numbers::ln2, q, p);
  }

  double C, S;
  if (std::abs(w) < 1e-4) {
    C = 1 + w / 2 * (1 + w / 12 * (1 + w / 30));
    S = 1 + w / 6 * (1 + w / 20 * (1 + w / 42));
  } else if (w > 0) {
    const double r = std::sqrt(w);
    C = std::cosh(r);
    S = std::sinh(r) / r;
  } else {
    const double r = std::sqrt(-w);
    C = std::cos(r);
    S = std::sin(r) / r;
  }
  const Complex q(C, 0.5 * d * S * (k - z / k));
  const Complex p(0, -0.5 * d * S * (k + z / k));
  return TransferMatrixd(0, q, p);
}

double barrierLnTransmission(double height, double width, double k) {
  checkWave(k, width);
  const double z = 2 * height - k * k;  // kappa^2, negative above the barrier
  const double pref = (k * k + z) / (2 * k);
  double sh;  // sinh(kappa d) / kappa
  if (z > 0) {
    const double kappa = std::sqrt(z);
    if (kappa * width > 30) {
      const double logA = std::log(pref / kappa) + kappa * width - std::numbers::ln2 +
                          std::log1p(-std::exp(-2 * kappa * width));
      return -(2 * logA + std::log1p(std::exp(-2 * logA)));
    }
    sh = std::sinh(kappa * width) / kappa;
  } else if (z < 0) {
    const double kk = std::sqrt(-z);
    sh = std::sin(kk * width) / kk;
  } else {
    sh = width;
  }
  return -std::log1p(pref * pref * sh * sh);
}

TransferMatrixd prefractalMatrix(const std::vector<Interval>& intervals, double k, double length) {
  if (!(k > 0)) throw DomainError("prefractal: k must be positive");
  auto out = TransferMatrixd::identity();
  double x = 0;
  for (const auto& iv : intervals) {
    if (iv.start > x) out = compose(out, propagation(k * (iv.start - x)));
    out = compose(out, barrierMatrix(iv.height, iv.width, k));
    x = iv.start + iv.width;
  }
  if (length > x) out = compose(out, propagation(k * (length - x)));
  return out;
}

TransferMatrixd prefractalMatrix(const PrefractalSpec& spec, double k) {
  return prefractalMatrix(generateIntervals(spec), k);
}

TransferMatrixd prefractalMatrixRecursive(const PrefractalSpec& spec, double k) {
  spec.validate();
  if (!(k > 0)) throw DomainError("prefractal: k must be positive");
  const auto& geom = spec.geom;
  double width = std::pow(geom.alpha, -spec.generation);
  auto m = barrierMatrix(spec.height(), width, k);
  for (int g = spec.generation; g > 0; --g) {
    const double parent = width * geom.alpha;
    m = chainCompose(m, k * geom.gamma * parent, geom.N);
    width = parent;
  }
  return m;
}

std::vector<ProbeRow> convergenceProbe(const SsfpGeometry& geom, double w, const std::vector<int>& generations,
                                       const std::vector<double>& lnPhiGrid, int threads,
                                       long bruteForceLimit) {
  std::vector<ProbeRow> rows(generations.size() * lnPhiGrid.size());
  const int count = static_cast<int>(rows.size());
  auto work = [&](int idx) {
    const int gi = idx / static_cast<int>(lnPhiGrid.size());
    const int ki = idx % static_cast<int>(lnPhiGrid.size());
    const PrefractalSpec spec{geom, generations[gi], w};
    const double k = std::exp(lnPhiGrid[ki]);
    const auto m = prefractalMatrixRecursive(spec, k);
    const auto params = toParams(m);
    auto& row = rows[idx];
    row.generation = spec.generation;
    row.lnPhi = lnPhiGrid[ki];
    row.lnT = lnTransmission(m);
    row.lnRT = lnReflectionRatio(m);
    row.J = params.J;
    row.oracleDeviation = std::numeric_limits<double>::quiet_NaN();
    if (std::pow(double(geom.N), spec.generation) <= double(bruteForceLimit))
      row.oracleDeviation = relativeDeviation(prefractalMatrix(spec, k), m);
  };
  threads = std::max(1, threads);
  if (threads == 1) {
    for (int i = 0; i < count; ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (int i = t; i < count; i += threads) work(i);
      });
    for (auto& th : pool) th.join();
  }
  return rows;
}

}  // namespace ssfp
