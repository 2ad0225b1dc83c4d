#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "ssfp/prefractal.hpp"
#include "ssfp/transfer_matrix.hpp"

using namespace ssfp;
using C = std::complex<double>;
using CL = std::complex<long double>;
using std::numbers::pi;

namespace {

// plain 2x2 product on unscaled entries, long double
struct Wide {
  CL a, b, c, d;
};
Wide wide(const TransferMatrixd& m) {
  const long double s = std::exp(static_cast<long double>(m.lnScale()));
  const CL q(m.qHat().real(), m.qHat().imag()), p(m.pHat().real(), m.pHat().imag());
  return {s * q, s * p, s * std::conj(p), s * std::conj(q)};
}
Wide operator*(const Wide& x, const Wide& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}
double wideDeviation(const TransferMatrixd& m, const Wide& w) {
  const auto v = wide(m);
  return static_cast<double>((std::abs(v.a - w.a) + std::abs(v.b - w.b)) / (std::abs(w.a) + std::abs(w.b)));
}

TransferMatrixd randomUnit(std::mt19937_64& rng, double lnTmin = -20) {
  std::uniform_real_distribution<double> lnT(lnTmin, 0), ang(-pi, pi);
  return fromParams(TunnelingParamsd{lnT(rng), ang(rng), ang(rng)});
}

}  // namespace

TEST_CASE("fromParams small cases") {
  auto id = fromParams(TunnelingParamsd{0, 0, 0});
  CHECK(id.lnScale() == 0);
  CHECK(std::abs(id.qHat() - C(1, 0)) < 1e-15);
  CHECK(std::abs(id.pHat()) == 0);

  auto half = fromParams(TunnelingParamsd{std::log(0.5), 0, 0});
  CHECK(std::abs(half.q()) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(std::abs(half.p()) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::arg(half.p()) == doctest::Approx(pi / 2).epsilon(1e-14));

  CHECK_THROWS_AS(fromParams(TunnelingParamsd{1e-3, 0, 0}), DomainError);
}

TEST_CASE("deep opacity stays finite and matches extended precision") {
  const TunnelingParamsd p{-1200, 0.3, 0};
  const auto m = fromParams(p);
  const auto ml = fromParams(TunnelingParams<long double>{-1200.0L, 0.3L, 0.0L});
  CHECK(std::isfinite(m.lnScale()));
  CHECK(m.lnScale() == doctest::Approx(600).epsilon(1e-15));
  CHECK(std::abs(m.qHat()) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(m.pHat()) == doctest::Approx(static_cast<double>(std::abs(ml.pHat()))).epsilon(1e-15));
  CHECK(std::abs(m.qHat() - C(std::cos(0.3), -std::sin(0.3))) < 1e-15);
  const auto back = toParams(m);
  CHECK(back.lnT == doctest::Approx(-1200).epsilon(1e-14));
  CHECK(back.J == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("toParams") {
  const auto id = toParams(TransferMatrixd::identity());
  CHECK(id.lnT == 0);
  CHECK(id.J == 0);
  CHECK(id.F == 0);

  const TunnelingParamsd t{std::log(0.9), 1.2, pi};
  const auto r = toParams(fromParams(t));
  CHECK(r.lnT == doctest::Approx(t.lnT).epsilon(1e-12));
  CHECK(std::abs(r.J - t.J) < 1e-12);
  CHECK(std::abs(wrapAngle(r.F - t.F)) < 1e-12);

  // q-only matrix, seed evaluation example
  const auto m = TransferMatrixd::raw(0.0257, std::polar(1.0, -0.1715), {0, 0});
  CHECK(std::exp(toParams(m).lnT) == doctest::Approx(0.9498).epsilon(2e-4));

  CHECK_THROWS_AS(toParams(TransferMatrixd::raw(0, {0, 0}, {1, 0})), DegenerateMatrixError);
}

TEST_CASE("bijection over random triples") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lnT(-500, 0), ang(-pi, pi);
  double worst = 0;
  for (int i = 0; i < 20000; ++i) {
    const TunnelingParamsd t{lnT(rng), ang(rng), ang(rng)};
    const auto r = toParams(fromParams(t));
    worst = std::max({worst, std::abs(r.lnT - t.lnT) / std::max(1.0, std::abs(t.lnT)), std::abs(wrapAngle(r.J - t.J)),
                      std::abs(wrapAngle(r.F - t.F))});
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("propagation group law") {
  CHECK(std::abs(propagation(0.0).qHat() - C(1, 0)) < 1e-16);
  CHECK(std::abs(propagation(pi).qHat() - C(-1, 0)) < 1e-15);
  const auto ab = compose(propagation(0.3), propagation(0.4));
  CHECK(relativeDeviation(ab, propagation(0.7)) < 1e-14);
}

TEST_CASE("compose identities") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto m = randomUnit(rng, -300);
    CHECK(relativeDeviation(compose(TransferMatrixd::identity(), m), m) < 1e-15);
    CHECK(determinantDefect(compose(m, randomUnit(rng, -300))) < 1e-12);
  }
  const auto m = fromParams(TunnelingParamsd{-8, 0.4, -1.1});
  CHECK(relativeDeviation(compose(m, inverse(m)), TransferMatrixd::identity()) < 1e-10);
}

TEST_CASE("compose of barrier matrices against extended precision") {
  const auto a = barrierMatrix(3.0, 0.7, 1.3);
  const auto b = barrierMatrix(-2.0, 0.4, 1.3);
  const auto c = barrierMatrix(40.0, 0.9, 0.5);
  CHECK(wideDeviation(compose(a, b), wide(a) * wide(b)) < 1e-12);
  CHECK(wideDeviation(compose(compose(a, c), b), wide(a) * wide(c) * wide(b)) < 1e-12);
}

TEST_CASE("scale safety and determinant over long products") {
  const auto unit = fromParams(TunnelingParamsd{-100, 0.2, 0.1});
  auto m = TransferMatrixd::identity();
  for (int k = 0; k < 10000; ++k) m = compose(m, unit);
  CHECK(std::isfinite(m.lnScale()));
  // growth per factor is the eigenvalue, ~ 2 cos(J) e^50
  CHECK(m.lnScale() > 50.0 * 10000);
  CHECK(m.lnScale() < 51.0 * 10000);
  CHECK(determinantDefect(m) < 1e-9);
  CHECK(toParams(m).lnT <= 0);
}

TEST_CASE("chainCompose") {
  std::mt19937_64 rng(3);
  const auto unit = randomUnit(rng);
  CHECK(relativeDeviation(chainCompose(unit, 0.8, 1), unit) == 0);
  CHECK_THROWS_AS(chainCompose(unit, 0.8, 0), DomainError);

  // gaps only
  CHECK(relativeDeviation(chainCompose(TransferMatrixd::identity(), 0.25, 3), propagation(0.5)) < 1e-14);

  // n = 2 against the explicit product
  const auto explicit2 = compose(compose(unit, propagation(0.8)), unit);
  CHECK(relativeDeviation(chainCompose(unit, 0.8, 2), explicit2) < 1e-12);

  std::uniform_real_distribution<double> gap(0, 10);
  double worst = 0, worstDet = 0;
  for (int i = 0; i < 500; ++i) {
    const auto u = randomUnit(rng, -10);
    const double g = gap(rng);
    for (int n = 2; n <= 5; ++n) {
      Wide w = wide(u);
      const Wide step = wide(propagation(g)) * wide(u);
      for (int k = 1; k < n; ++k) w = w * step;
      const auto m = chainCompose(u, g, n);
      worst = std::max(worst, wideDeviation(m, w));
      worstDet = std::max(worstDet, determinantDefect(m));
      CHECK(toParams(m).lnT <= 0);
      CHECK(relativeDeviation(m, chainComposeProduct(u, g, n)) < 1e-8);
    }
  }
  CHECK(worst < 1e-10);
  CHECK(worstDet < 1e-9);
}

TEST_CASE("chainCompose keeps digits for traceless opaque units") {
  // qHat = -i, g = 0: M = unit has zero trace, so M^2 = -I and M^3 = -M exactly,
  // while each product entry is e^120 before cancelling
  const TransferMatrixd unit(60, C(0, -1), std::polar(std::sqrt(-std::expm1(-120.0)), 0.3));
  const auto minusI = TransferMatrixd::raw(0, C(-1, 0), C(0, 0));
  CHECK(relativeDeviation(chainCompose(unit, 0.0, 2), minusI) < 1e-10);
  const auto minusUnit = TransferMatrixd::raw(unit.lnScale(), -unit.qHat(), -unit.pHat());
  CHECK(relativeDeviation(chainCompose(unit, 0.0, 3), minusUnit) < 1e-10);
  CHECK(relativeDeviation(chainCompose(unit, 0.0, 4), TransferMatrixd::identity()) < 1e-10);
  // the product form cannot resolve it
  CHECK(relativeDeviation(chainComposeProduct(unit, 0.0, 2), minusI) > 0.5);
}

TEST_CASE("precision flag on total cancellation") {
  const auto a = TransferMatrixd::raw(0, C(1, 0), C(1, 0));
  const auto b = TransferMatrixd::raw(0, C(1, 0), C(-1, 0));
  CHECK(compose(a, b).precisionLoss());
  CHECK_FALSE(compose(propagation(0.1), propagation(0.2)).precisionLoss());
}
