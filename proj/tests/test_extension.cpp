#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include "ssfp/csv.hpp"
#include "ssfp/extension.hpp"

using namespace ssfp;

namespace {

TypeIIISeed figure1Seed() {
  TypeIIISeed s;
  s.c = 0.001;
  s.omega = OmegaSpec::constant(1.0);
  return s;
}

const SsfpGeometry kHalf = SsfpGeometry::make(2, 4.0);

Window fullWindow(const TypeIIISeed& seed, const SsfpGeometry& geom) {
  return {seedDepthLnPhi(seed, geom, 600), 25};
}

// forward composition of every point against its parent on the same chain
double worstForwardError(const ScanResult& r, const SsfpGeometry& geom) {
  std::map<std::pair<int, int>, const ChainPoint*> byChain;
  for (const auto& p : r.points) byChain[{p.baseIndex, p.level}] = &p;
  double worst = 0;
  for (const auto& p : r.points) {
    if (p.level == 0) continue;
    const auto* parent = byChain.at({p.baseIndex, p.level - 1});
    const double g = geom.gamma * std::exp(parent->lnPhi);
    worst = std::max(worst, relativeDeviation(chainCompose(p.matrix, g, geom.N), parent->matrix));
  }
  return worst;
}

}  // namespace

TEST_CASE("levelCount") {
  CHECK(levelCount(kHalf, {0, kHalf.lnAlpha}) == 0);
  CHECK(levelCount(kHalf, {0, 0.5 * kHalf.lnAlpha}) == 0);
  CHECK(levelCount(kHalf, {0, 2 * kHalf.lnAlpha}) == 1);
  CHECK(levelCount(kHalf, {0, 2.5 * kHalf.lnAlpha}) == 2);
}

TEST_CASE("extendChain with no levels is the seed") {
  const auto chain = extendChain(figure1Seed(), kHalf, -24, 0);
  REQUIRE(chain.size() == 1);
  const auto seed = seedParams(figure1Seed(), kHalf, -24);
  CHECK(chain[0].params.lnT == seed.lnT);
  CHECK(chain[0].params.J == seed.J);
  CHECK(chain[0].branch == -1);
  CHECK_THROWS_AS(extendChain(figure1Seed(), kHalf, -24, -1), DomainError);
}

TEST_CASE("extendChain forward check at every level") {
  const auto spec = figure1Seed();
  const int levels = int((25 + 24) / kHalf.lnAlpha);
  const auto chain = extendChain(spec, kHalf, -24, levels);
  REQUIRE(chain.size() == size_t(levels + 1));
  for (size_t i = 1; i < chain.size(); ++i) {
    const double g = kHalf.gamma * std::exp(chain[i - 1].lnPhi);
    CHECK(relativeDeviation(chainCompose(chain[i].matrix, g, 2), chain[i - 1].matrix) < 1e-8);
    CHECK(chain[i].lnPhi == doctest::Approx(chain[i - 1].lnPhi + kHalf.lnAlpha));
    CHECK(chain[i].detDefect < 1e-9);
  }
}

TEST_CASE("one-period window reproduces the seed") {
  const auto spec = figure1Seed();
  ExtensionOptions opt;
  opt.samplesPerPeriod = 64;
  const Window w{-20, -20 + kHalf.lnAlpha};
  const auto r = scan(spec, kHalf, w, opt);
  REQUIRE(r.points.size() == 64);
  for (int i = 0; i < 64; ++i) {
    const auto& p = r.points[i];
    const auto seed = seedParams(spec, kHalf, p.lnPhi);
    CHECK(p.lnPhi == doctest::Approx(-20 + i * kHalf.lnAlpha / 64).epsilon(1e-14));
    CHECK(p.params.lnT == seed.lnT);
    CHECK(p.params.J == seed.J);
    CHECK((p.cls == MatrixClass::seed));
  }
}

TEST_CASE("full scan invariants") {
  for (const auto& geom : {kHalf, SsfpGeometry::make(3, 13.0), SsfpGeometry::make(4, 16.0)}) {
    const auto spec = figure1Seed();
    ExtensionOptions opt;
    opt.samplesPerPeriod = 60;
    const auto r = scan(spec, geom, fullWindow(spec, geom), opt);
    CHECK(r.breaks.empty());
    CHECK(worstForwardError(r, geom) < 1e-8);
    double prev = -1e300;
    for (const auto& p : r.points) {
      CHECK(p.lnPhi > prev);
      prev = p.lnPhi;
      CHECK(p.roundTripError < 1e-8);
      CHECK(p.detDefect < 1e-9);
      CHECK(p.params.lnT <= 0);
      // R/T identity: ln(R/T) + ln T = ln(1 - T)
      if (p.params.lnT < -1e-8)
        CHECK(p.lnRT + p.params.lnT == doctest::Approx(std::log(-std::expm1(p.params.lnT))).epsilon(1e-8));
    }
  }
}

TEST_CASE("scan is deterministic, also across thread counts") {
  const auto spec = figure1Seed();
  ExtensionOptions opt;
  opt.samplesPerPeriod = 80;
  const auto w = fullWindow(spec, kHalf);
  const auto a = scanCsv(scan(spec, kHalf, w, opt).points);
  const auto b = scanCsv(scan(spec, kHalf, w, opt).points);
  opt.threads = 3;
  const auto c = scanCsv(scan(spec, kHalf, w, opt).points);
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("generic seed path equals the Type III scan") {
  const auto spec = figure1Seed();
  ExtensionOptions opt;
  opt.samplesPerPeriod = 40;
  const auto w = fullWindow(spec, kHalf);
  const auto direct = scan(spec, kHalf, w, opt);
  const auto generic = genericSeedScan(typeIIISeedFunction(spec, kHalf), kHalf, w, opt);
  CHECK(scanCsv(direct.points) == scanCsv(generic.points));
  CHECK(direct.seedResiduals == generic.seedResiduals);
}

TEST_CASE("transparent seed: residual is the gap phase mismatch") {
  const SeedFunction flat = [](double) { return TunnelingParamsd{0, 0, 0}; };
  ExtensionOptions opt;
  opt.samplesPerPeriod = 16;
  const Window w{-8, -8 + kHalf.lnAlpha};
  const auto r = genericSeedScan(flat, kHalf, w, opt);
  REQUIRE(r.seedResiduals.size() == 16);
  for (int i = 0; i < 16; ++i) {
    const double lnPhi = -8 + i * kHalf.lnAlpha / 16;
    CHECK(r.seedResiduals[i] == doctest::Approx(kHalf.gamma * std::exp(lnPhi)).epsilon(1e-12));
  }
}

TEST_CASE("power-law seed residual shrinks toward small phi") {
  // sqrt(T) = y = b phi^s at leading order
  const auto geom = SsfpGeometry::make(3, 13.0);
  const double b = 0.7;
  const SeedFunction typeOne = [&](double lnPhi) {
    const double root = b * std::exp(geom.s * lnPhi);
    return TunnelingParamsd{2 * std::log(root), std::numbers::pi / 2 - root, 0};
  };
  const double r1 = seedResidual(typeOne, geom, -10);
  const double r2 = seedResidual(typeOne, geom, -20);
  const double r3 = seedResidual(typeOne, geom, -30);
  CHECK(r2 < r1);
  CHECK(r3 < r2);
}

TEST_CASE("seed tolerance counts warnings") {
  const auto spec = figure1Seed();
  ExtensionOptions opt;
  opt.samplesPerPeriod = 20;
  opt.seedTolerance = 0;  // everything nonzero warns
  const auto r = scan(spec, kHalf, {-5, -5 + kHalf.lnAlpha}, opt);
  CHECK(r.seedWarnings > 0);
  opt.seedTolerance = 1e9;
  CHECK(scan(spec, kHalf, {-5, -5 + kHalf.lnAlpha}, opt).seedWarnings == 0);
}

TEST_CASE("option validation") {
  ExtensionOptions opt;
  opt.samplesPerPeriod = 1;
  CHECK_THROWS_AS(scan(figure1Seed(), kHalf, {-10, 0}, opt), DomainError);
  CHECK_THROWS_AS(scan(figure1Seed(), kHalf, {0, -10}), DomainError);
}
