#include "ssfp/analysis.hpp"

#include <cmath>

#include "ssfp/errors.hpp"

namespace ssfp {
namespace {

template <typename Better>
std::vector<XY> strictExtrema(const std::vector<XY>& raw, double halfWindow, Better better) {
  if (!(halfWindow > 0)) throw DomainError("envelope: halfWindow must be positive");
  std::vector<XY> pts;
  pts.reserve(raw.size());
  for (const auto& p : raw)
    if (std::isfinite(p.x) && std::isfinite(p.y)) pts.push_back(p);

  std::vector<XY> out;
  const size_t n = pts.size();
  size_t lo = 0;
  for (size_t i = 0; i < n; ++i) {
    while (pts[lo].x < pts[i].x - halfWindow) ++lo;
    bool extremum = true;
    for (size_t j = lo; j < n && pts[j].x <= pts[i].x + halfWindow; ++j) {
      if (j != i && !better(pts[i].y, pts[j].y)) {
        extremum = false;
        break;
      }
    }
    if (extremum) out.push_back(pts[i]);
  }
  if (out.size() < 3)
    throw InsufficientDataError("envelope: found " + std::to_string(out.size()) + " extrema, need 3");
  return out;
}

FitResult tryFit(const std::vector<XY>& pts) {
  try {
    return fitLine(pts);
  } catch (const std::runtime_error& e) {
    FitResult r;
    r.pointCount = static_cast<int>(pts.size());
    r.note = e.what();
    return r;
  }
}

}  // namespace

FitResult fitLine(const std::vector<XY>& points) {
  const size_t n = points.size();
  if (n < 3) throw InsufficientDataError("fitLine: need at least 3 points, got " + std::to_string(n));
  double mx = 0, my = 0;
  for (const auto& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (const auto& p : points) {
    sxx += (p.x - mx) * (p.x - mx);
    sxy += (p.x - mx) * (p.y - my);
  }
  if (!(sxx > 0)) throw SingularFitError("fitLine: all x values coincide");

  FitResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss = 0;
  for (const auto& p : points) {
    const double e = p.y - (r.intercept + r.slope * p.x);
    ss += e * e;
  }
  r.rmsResidual = std::sqrt(ss / n);
  r.pointCount = static_cast<int>(n);
  r.valid = true;
  return r;
}

std::vector<XY> envelope(const std::vector<XY>& points, double halfWindow) {
  return strictExtrema(points, halfWindow, [](double a, double b) { return a > b; });
}

std::vector<XY> lowerEnvelope(const std::vector<XY>& points, double halfWindow) {
  return strictExtrema(points, halfWindow, [](double a, double b) { return a < b; });
}

std::string_view toString(MiddleClass c) {
  switch (c) {
    case MiddleClass::fractalSlope: return "fractal_slope";
    case MiddleClass::classicalSlope: return "classical_slope";
    case MiddleClass::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

MiddleClass classifySlope(double slope, const SsfpGeometry& geom, double tolerance) {
  const bool fractal = std::abs(slope + 2 * geom.s) < tolerance;
  const bool classical = std::abs(slope + 2) < tolerance;
  if (fractal == classical) return MiddleClass::indeterminate;
  return fractal ? MiddleClass::fractalSlope : MiddleClass::classicalSlope;
}

std::vector<XY> lnRTSeries(const std::vector<ChainPoint>& points, Window window) {
  std::vector<XY> out;
  for (const auto& p : points)
    if (window.contains(p.lnPhi)) out.push_back({p.lnPhi, p.lnRT});
  return out;
}

RegimeReport classify(const std::vector<ChainPoint>& points, const SsfpGeometry& geom,
                      const RegimeWindows& windows, double envelopeHalfWindow) {
  const auto& w = windows;
  if (!(w.left.lo < w.left.hi && w.left.hi <= w.middle.lo && w.middle.lo < w.middle.hi &&
        w.middle.hi <= w.right.lo && w.right.lo < w.right.hi))
    throw DomainError("classify: windows must be ordered and disjoint");

  RegimeReport report;

  std::vector<XY> left;
  for (const auto& p : lnRTSeries(points, w.left))
    if (p.y > 0) left.push_back({p.x, std::log(p.y)});
  report.leftFit = tryFit(left);

  report.middleFit = tryFit(lnRTSeries(points, w.middle));
  if (report.middleFit.valid) report.middleClass = classifySlope(report.middleFit.slope, geom);

  try {
    report.rightEnvelopeFit = fitLine(envelope(lnRTSeries(points, w.right), envelopeHalfWindow));
  } catch (const std::runtime_error& e) {
    report.rightEnvelopeFit.note = e.what();
  }
  return report;
}

}  // namespace ssfp
