#include "ssfp/figures.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "ssfp/csv.hpp"
#include "ssfp/errors.hpp"

namespace ssfp {
namespace {

using Clock = std::chrono::steady_clock;

OmegaSpec figure7Omega() { return OmegaSpec::sinusoidal(15.0, 1.001); }

// Left window: where |c| phi^-s > 5, so ln(R/T) is dominated by the sinh^2 term.
Window leftWindow(const TypeIIISeed& seed, int N, double alpha, double depth) {
  const auto geom = SsfpGeometry::make(N, alpha);
  return {seedDepthLnPhi(seed, geom, depth), seedDepthLnPhi(seed, geom, 5.0)};
}

FigureCurve curve(std::string label, int N, double alpha, double c, OmegaSpec omega, MiddleClass expected,
                  Window middle, Window right) {
  FigureCurve fc;
  fc.label = std::move(label);
  fc.N = N;
  fc.alpha = alpha;
  fc.seed.c = c;
  fc.seed.omega = omega;
  fc.expectedMiddle = expected;
  fc.windows.left = leftWindow(fc.seed, N, alpha, 600);
  fc.windows.middle = middle;
  fc.windows.right = right;
  return fc;
}

// s = 0.5 pair: N = 2 (alpha = 4) and N = 4 (alpha = 16).
std::vector<FigureCurve> halfDimensionPair(OmegaSpec omega, MiddleClass expected, Window middle) {
  return {curve("N2", 2, 4.0, 0.001, omega, expected, middle, {4, 24}),
          curve("N4", 4, 16.0, 0.001, omega, expected, middle, {5, 24})};
}

constexpr auto kFractal = MiddleClass::fractalSlope;
constexpr auto kClassical = MiddleClass::classicalSlope;

}  // namespace

FigurePreset figurePreset(int id) {
  FigurePreset p;
  p.id = id;
  switch (id) {
    case 1:
      p.caption = "ln(R/T) vs ln(phi), s=0.5, c=0.001, omega=1; N=2 and N=4; asymptote 13-2s ln(phi)";
      p.curves = halfDimensionPair(OmegaSpec::constant(1), kFractal, {-10, 0});
      p.asymptotes = {{"points", 13, true, {"N2", "N4"}}};
      break;
    case 2:
      p.caption = "ln(R/T) vs ln(phi), N=3, alpha=13, omega=1; c=0.1, 0.01, 0.001; asymptote 10-2s ln(phi)";
      p.curves = {curve("c0.1", 3, 13, 0.1, OmegaSpec::constant(1), kFractal, {-3, 2}, {5, 24}),
                  curve("c0.01", 3, 13, 0.01, OmegaSpec::constant(1), kFractal, {-8, 2}, {5, 24}),
                  curve("c0.001", 3, 13, 0.001, OmegaSpec::constant(1), kFractal, {-10, 2}, {5, 24})};
      p.asymptotes = {{"circles", 10, true, {"c0.001"}}};
      break;
    case 3:
      p.caption = "ln(R/T) vs ln(phi), s=0.5, c=0.001, omega=10; N=2 and N=4; asymptote 3-2s ln(phi)";
      p.curves = halfDimensionPair(OmegaSpec::constant(10), kFractal, {-10, 0});
      p.asymptotes = {{"points", 3, true, {"N2", "N4"}}};
      break;
    case 4:
    case 6: {
      const double w = id == 4 ? 10 : 15;
      p.caption = "ln(R/T) vs ln(phi), N=3, alpha=13, omega=" + std::to_string(int(w)) +
                  "; c=0.1, 0.01, 0.001; asymptotes 8-2 ln(phi) and 4-2s ln(phi)";
      // omega = 10: the c = 0.001 curve keeps the -2s line up to ln(phi) ~ 0 and
      // bends afterwards, so its middle window sits further left.
      const bool w10 = id == 4;
      p.curves = {curve("c0.1", 3, 13, 0.1, OmegaSpec::constant(w), kClassical, {-3, 2}, {5, 24}),
                  curve("c0.01", 3, 13, 0.01, OmegaSpec::constant(w),
                        w10 ? MiddleClass::indeterminate : kClassical, w10 ? Window{-8, 2} : Window{-3, 2},
                        {5, 24}),
                  curve("c0.001", 3, 13, 0.001, OmegaSpec::constant(w), w10 ? kFractal : kClassical,
                        w10 ? Window{-10, 0} : Window{-3, 2}, {5, 24})};
      p.asymptotes = {{"points", 8, false, {"c0.1"}}, {"circles", 4, true, {"c0.001"}}};
      break;
    }
    case 5:
      p.caption = "ln(R/T) vs ln(phi), s=0.5, c=0.001, omega=15; N=2 and N=4; asymptote 5-2 ln(phi)";
      p.curves = halfDimensionPair(OmegaSpec::constant(15), kClassical, {-3, 2});
      p.asymptotes = {{"points", 5, false, {"N2", "N4"}}};
      break;
    case 7:
      p.caption =
          "ln(R/T) vs ln(phi), s=0.5, c=0.001, omega=15[sin(2 pi ln(phi)/ln(alpha))+1.001]; N=2 and N=4; "
          "asymptotes 5-2 ln(phi) and 14-2s ln(phi)";
      p.curves = halfDimensionPair(figure7Omega(), MiddleClass::indeterminate, {-3, 2});
      p.asymptotes = {{"points", 5, false, {"N2", "N4"}}, {"points", 14, true, {"N2", "N4"}}};
      break;
    default:
      throw ConfigError("figure", "figure id must be 1..7, got " + std::to_string(id));
  }
  return p;
}

FigureResult runFigure(const FigurePreset& preset, const FigureOptions& options) {
  const auto start = Clock::now();
  FigureResult out;
  out.preset = preset;
  for (const auto& fc : preset.curves) {
    const auto t0 = Clock::now();
    CurveResult cr;
    cr.curve = fc;
    cr.geom = SsfpGeometry::make(fc.N, fc.alpha);
    ExtensionOptions ext;
    ext.samplesPerPeriod = options.samplesPerPeriod;
    ext.roundTripTolerance = options.roundTripTolerance;
    ext.threads = options.threads;
    const Window window{seedDepthLnPhi(fc.seed, cr.geom, options.seedDepth), fc.lnPhiMax};
    cr.scan = scan(fc.seed, cr.geom, window, ext);
    cr.report = classify(cr.scan.points, cr.geom, fc.windows, options.envelopeHalfWindow);
    try {
      cr.lowerEnvelopeFit =
          fitLine(lowerEnvelope(lnRTSeries(cr.scan.points, fc.windows.right), options.envelopeHalfWindow));
    } catch (const std::runtime_error& e) {
      cr.lowerEnvelopeFit.note = e.what();
    }
    cr.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    out.curves.push_back(std::move(cr));
  }
  for (const auto& a : preset.asymptotes) {
    for (const auto& label : a.curves) {
      for (const auto& cr : out.curves) {
        if (cr.curve.label != label) continue;
        AsymptoteCheck check;
        check.marker = a.marker;
        check.curve = label;
        check.fractalSlope = a.fractalSlope;
        check.claimedSlope = a.fractalSlope ? -2 * cr.geom.s : -2.0;
        check.claimedIntercept = a.intercept;
        check.fit = a.fractalSlope ? cr.report.rightEnvelopeFit : cr.report.middleFit;
        try {
          auto pts = a.fractalSlope
                         ? envelope(lnRTSeries(cr.scan.points, cr.curve.windows.right), options.envelopeHalfWindow)
                         : lnRTSeries(cr.scan.points, cr.curve.windows.middle);
          double sum = 0;
          for (const auto& xy : pts) sum += xy.y - check.claimedSlope * xy.x;
          if (!pts.empty()) check.pinnedIntercept = sum / pts.size();
        } catch (const InsufficientDataError&) {
        }
        out.checks.push_back(check);
      }
    }
  }
  out.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

namespace {

std::string fmt(double x, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, x);
  return buf;
}

std::string fitLineText(const FitResult& f) {
  if (!f.valid) return "unavailable (" + f.note + ")";
  return "slope " + fmt(f.slope) + ", intercept " + fmt(f.intercept) + ", rms " + fmt(f.rmsResidual) + ", n " +
         std::to_string(f.pointCount);
}

std::string windowText(Window w) { return "[" + fmt(w.lo, 2) + ", " + fmt(w.hi, 2) + "]"; }

}  // namespace

std::string figureReport(const FigureResult& r) {
  std::string out = "figure " + std::to_string(r.preset.id) + "\n" + r.preset.caption + "\n\n";
  for (const auto& cr : r.curves) {
    const auto& g = cr.geom;
    double maxRoundTrip = 0, maxDet = 0;
    for (const auto& p : cr.scan.points) {
      maxRoundTrip = std::max(maxRoundTrip, p.roundTripError);
      maxDet = std::max(maxDet, p.detDefect);
    }
    out += "curve " + cr.curve.label + ": N=" + std::to_string(g.N) + " alpha=" + fmt(g.alpha) + " s=" + fmt(g.s) +
           " gamma=" + fmt(g.gamma) + " c=" + formatDouble(cr.curve.seed.c) + "\n";
    out += "  points " + std::to_string(cr.scan.points.size()) + ", chain breaks " +
           std::to_string(cr.scan.breaks.size()) + ", ambiguous branches " + std::to_string(cr.scan.ambiguousCount) +
           ", max round trip " + formatDouble(maxRoundTrip) + ", max det defect " + formatDouble(maxDet) + ", " +
           fmt(cr.seconds, 2) + " s\n";
    const auto& rep = cr.report;
    out += "  left   " + windowText(cr.curve.windows.left) + " lnln(R/T): " + fitLineText(rep.leftFit) +
           "  (theory slope " + fmt(-g.s) + ", intercept " + fmt(std::log(2 * std::abs(cr.curve.seed.c))) + ")\n";
    out += "  middle " + windowText(cr.curve.windows.middle) + " ln(R/T): " + fitLineText(rep.middleFit) +
           "  class " + std::string(toString(rep.middleClass)) + ", expected " +
           std::string(toString(cr.curve.expectedMiddle)) + " (-2s = " + fmt(-2 * g.s) + ")\n";
    out += "  right  " + windowText(cr.curve.windows.right) + " envelope: " + fitLineText(rep.rightEnvelopeFit) +
           "\n";
    out += "  right  " + windowText(cr.curve.windows.right) + " troughs:  " + fitLineText(cr.lowerEnvelopeFit) +
           "\n";
  }
  if (!r.checks.empty()) out += "\ncaption asymptotes\n";
  for (const auto& c : r.checks) {
    out += "  " + c.marker + " " + fmt(c.claimedIntercept, 1) + (c.fractalSlope ? " - 2s ln(phi)" : " - 2 ln(phi)") +
           " on " + c.curve + ": claimed slope " + fmt(c.claimedSlope) + ", fitted " +
           (c.fit.valid ? "slope " + fmt(c.fit.slope) + " intercept " + fmt(c.fit.intercept)
                        : "unavailable") +
           ", intercept at claimed slope " + fmt(c.pinnedIntercept) + (c.fractalSlope ? " (right envelope)" : " (middle region)") + "\n";
  }
  if (r.preset.id == 7)
    out += "\nomega varies with ln(phi); the curve is expected to be rough, which is reported here only "
           "qualitatively.\n";
  out += "\ntotal " + fmt(r.seconds, 2) + " s\n";
  return out;
}

std::vector<std::string> writeFigureOutputs(const FigureResult& r, const std::string& outDir) {
  std::error_code ec;
  std::filesystem::create_directories(outDir, ec);
  if (ec) throw IoError(outDir + ": cannot create directory (" + ec.message() + ")");
  const std::string prefix = outDir + "/fig" + std::to_string(r.preset.id) + "_";
  std::vector<std::string> written;
  for (const auto& cr : r.curves) {
    const auto path = prefix + cr.curve.label + ".csv";
    writeFile(path, scanCsv(cr.scan.points));
    written.push_back(path);
  }

  if (!r.curves.empty() && !r.preset.asymptotes.empty()) {
    const auto& grid = r.curves.front();
    std::string csv = "ln_phi";
    for (const auto& a : r.preset.asymptotes)
      csv += "," + a.marker + "_" + formatDouble(a.intercept) + (a.fractalSlope ? "_minus_2s" : "_minus_2");
    csv += '\n';
    for (const auto& p : grid.scan.points) {
      csv += formatDouble(p.lnPhi);
      for (const auto& a : r.preset.asymptotes) {
        const double slope = a.fractalSlope ? -2 * grid.geom.s : -2.0;
        csv += ',' + formatDouble(a.intercept + slope * p.lnPhi);
      }
      csv += '\n';
    }
    const auto path = prefix + "asymptotes.csv";
    writeFile(path, csv);
    written.push_back(path);
  }

  const auto reportPath = prefix + "report.txt";
  writeFile(reportPath, figureReport(r));
  written.push_back(reportPath);
  return written;
}

}  // namespace ssfp
