#include "ssfp/extension.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>

#include "ssfp/errors.hpp"

namespace ssfp {
namespace {

ChainPoint makePoint(const TransferMatrixd& m, double lnPhi, int level, int baseIndex) {
  ChainPoint p;
  p.lnPhi = lnPhi;
  p.matrix = m;
  p.params = toParams(m);
  p.lnRT = lnReflectionRatio(m);
  // lnT from |p| as well, so that ln(R/T) + lnT = ln(1 - T) holds to rounding
  // also for nearly transparent points where -2 ln|q| keeps few digits
  p.params.lnT = lnTransmission(m);
  p.level = level;
  p.baseIndex = baseIndex;
  p.detDefect = determinantDefect(m);
  return p;
}

template <typename Fn>
void parallelFor(int count, int threads, Fn&& fn) {
  threads = std::clamp(threads, 1, std::max(1, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < count; i += threads) fn(i);
    });
  for (auto& th : pool) th.join();
}

// Linear extrapolation of (lnT, J) from the two most recent accepted points.
struct History {
  std::optional<ChainPoint> older, newer;

  void push(const ChainPoint& p) {
    older = std::move(newer);
    newer = p;
  }
  bool ready() const { return older && newer && newer->lnPhi > older->lnPhi; }

  BranchPredictor predict(double lnPhi) const {
    const double t = (lnPhi - newer->lnPhi) / (newer->lnPhi - older->lnPhi);
    const double lnT = newer->params.lnT + t * (newer->params.lnT - older->params.lnT);
    const double J = newer->params.J + t * wrapAngle(newer->params.J - older->params.J);
    return BranchPredictor::continuity(std::min(lnT, 0.0), wrapAngle(J));
  }
};

void fillFromStep(ChainPoint& p, const RootCandidate& c, MatrixClass cls, bool ambiguous) {
  p.branch = c.branch;
  p.roundTripError = c.roundTripError;
  p.projectionResidual = c.projectionResidual;
  p.cls = cls;
  p.ambiguous = ambiguous;
}

void validateOptions(const ExtensionOptions& options) {
  if (options.samplesPerPeriod < 2) throw DomainError("scan: samplesPerPeriod must be >= 2");
  if (!(options.roundTripTolerance > 0)) throw DomainError("scan: round-trip tolerance must be positive");
}

}  // namespace

ChainPoint seedPoint(const TunnelingParamsd& params, double lnPhi, int baseIndex) {
  auto p = makePoint(fromParams(params), lnPhi, 0, baseIndex);
  p.params = params;  // exact seed values, not the round-tripped ones
  p.lnRT = lnReflectionRatio(params);
  return p;
}

int levelCount(const SsfpGeometry& geom, Window window) {
  const double span = (window.hi - window.lo) / geom.lnAlpha;
  return std::max(0, static_cast<int>(std::ceil(span - 1e-12)) - 1);
}

std::vector<ChainPoint> extendChain(const TypeIIISeed& spec, const SsfpGeometry& geom, double baseLnPhi,
                                    int levels, const ExtensionOptions& options) {
  if (levels < 0) throw DomainError("extendChain: levels must be >= 0");
  spec.validate();
  std::vector<ChainPoint> chain;
  chain.push_back(seedPoint(seedParams(spec, geom, baseLnPhi), baseLnPhi, 0));
  for (int level = 1; level <= levels; ++level) {
    const auto& parent = chain.back();
    const double lnPhi = parent.lnPhi + geom.lnAlpha;
    const double gap = geom.gamma * std::exp(parent.lnPhi);
    const auto roots = rootCandidates(parent.matrix, gap, geom.N, options.roundTripTolerance);
    bool ambiguous = false;
    const int pick = selectBranch(
        roots, BranchPredictor::coherent(parent.matrix, geom.gamma * std::exp(lnPhi), geom.N), ambiguous);
    if (pick < 0)
      throw ChainBreakError(level, lnPhi,
                            "extendChain: no root branch reproduces the parent at level " +
                                std::to_string(level));
    const auto& c = roots.candidates[pick];
    auto point = makePoint(c.child, lnPhi, level, 0);
    fillFromStep(point, c, roots.cls, ambiguous);
    chain.push_back(std::move(point));
  }
  return chain;
}

ScanResult genericSeedScan(const SeedFunction& seed, const SsfpGeometry& geom, Window window,
                           const ExtensionOptions& options) {
  validateOptions(options);
  if (!(window.hi > window.lo)) throw DomainError("scan: window must have lnPhiMax > lnPhiMin");
  const int M = options.samplesPerPeriod;
  const double step = geom.lnAlpha / M;
  const int levels = levelCount(geom, window);

  ScanResult out;
  std::vector<std::optional<ChainPoint>> current(M);
  out.seedResiduals.resize(M);
  parallelFor(M, options.threads, [&](int i) {
    const double lnPhi = window.lo + i * step;
    current[i] = seedPoint(seed(lnPhi), lnPhi, i);
    out.seedResiduals[i] = seedResidual(seed, geom, lnPhi);
  });
  if (options.seedTolerance >= 0)
    for (double r : out.seedResiduals)
      if (!(r <= options.seedTolerance)) ++out.seedWarnings;

  History history;
  auto emit = [&](const ChainPoint& p) {
    history.push(p);
    if (p.lnPhi <= window.hi + 1e-12) out.points.push_back(p);
  };
  for (const auto& p : current) emit(*p);

  std::vector<std::optional<RootSet>> roots(M);
  for (int level = 1; level <= levels; ++level) {
    parallelFor(M, options.threads, [&](int i) {
      roots[i].reset();
      if (!current[i]) return;
      const double gap = geom.gamma * std::exp(current[i]->lnPhi);
      roots[i] = rootCandidates(current[i]->matrix, gap, geom.N, options.roundTripTolerance);
    });

    // Selection runs in ln(phi) order so that each point can lean on the two
    // points just below it, across the join with the previous level.
    for (int i = 0; i < M; ++i) {
      if (!current[i]) continue;
      const double lnPhi = current[i]->lnPhi + geom.lnAlpha;
      const double nextGap = geom.gamma * std::exp(lnPhi);
      const bool resolved = nextGap * step < options.resolvedPhaseStep;
      const auto predictor = resolved && history.ready()
                                 ? history.predict(lnPhi).withLookahead(nextGap, geom.N)
                                 : BranchPredictor::coherent(current[i]->matrix, nextGap, geom.N);
      bool ambiguous = false;
      const int pick = selectBranch(*roots[i], predictor, ambiguous);
      if (pick < 0) {
        out.breaks.push_back({i, level, lnPhi,
                              roots[i]->cls == MatrixClass::parabolic && roots[i]->candidates.empty()
                                  ? "parabolic matrix without a real root"
                                  : "no root branch passes the round trip"});
        current[i].reset();
        continue;
      }
      const auto& c = roots[i]->candidates[pick];
      auto point = makePoint(c.child, lnPhi, level, i);
      fillFromStep(point, c, roots[i]->cls, ambiguous);
      if (ambiguous) ++out.ambiguousCount;
      emit(point);
      current[i] = std::move(point);
    }
  }
  return out;
}

ScanResult scan(const TypeIIISeed& spec, const SsfpGeometry& geom, Window window,
                const ExtensionOptions& options) {
  spec.validate();
  return genericSeedScan(typeIIISeedFunction(spec, geom), geom, window, options);
}

}  // namespace ssfp
