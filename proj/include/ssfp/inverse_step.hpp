#pragma once

// Inversion of one renormalization step. Given the parent Z(phi) and the gap
// phase g = gamma*phi, the child Z(alpha*phi) satisfies
//
//   Z(phi) D(g) = (Z(alpha*phi) D(g))^N,
//
// so child = A D(-g) where A is an N-th root of B = Z(phi) D(g). B has real
// trace and unit determinant; its roots are taken spectrally and there are
// up to N admissible branches.

#include <string_view>
#include <vector>

#include "ssfp/geometry.hpp"
#include "ssfp/transfer_matrix.hpp"

namespace ssfp {

enum class MatrixClass { elliptic, hyperbolic, parabolic, seed };

std::string_view toString(MatrixClass cls);

struct RootCandidate {
  int branch = 0;
  TransferMatrixd child;
  double projectionResidual = 0;  // distance of the raw root from the symmetric class
  double roundTripError = 0;      // |chainCompose(child) - parent| / |parent|
  bool valid = false;
};

struct RootSet {
  MatrixClass cls = MatrixClass::elliptic;
  double halfTrace = 0;  // tr(B)/2, may be +-inf when out of double range
  std::vector<RootCandidate> candidates;
};

/// All N spectral root candidates of parent*D(gapPhase), each mapped back to a
/// child matrix. Candidates that leave the symmetric class or fail the forward
/// round trip by more than `tolerance` are marked invalid.
RootSet rootCandidates(const TransferMatrixd& parent, double gapPhase, int N,
                       double tolerance = 1e-8);

/// Target for branch selection.
///
/// continuity: candidate closest to (lnT, J) in the metric
///   |dlnT| / (1 + |lnT|) + |dJ|.
/// coherence: candidate whose ln(R/T) is closest to `lnRT` (normally the parent
/// value minus 2 ln N, the in-phase addition of N sub-units); ties, such as the
/// +-A pair for even N, go to the candidate whose J is closest to `phase`.
///
/// With lookahead set, candidates whose own inverse step one level up would
/// have no real root (N even and tr(child D(nextGapPhase)) <= -2) are only
/// taken when nothing else is valid.
struct BranchPredictor {
  enum class Mode { continuity, coherence };

  Mode mode = Mode::continuity;
  double lnT = 0;
  double J = 0;
  double lnRT = 0;
  double phase = 0;

  bool lookahead = false;
  double nextGapPhase = 0;
  int N = 0;

  static BranchPredictor continuity(double lnT, double J);
  static BranchPredictor fromMatrix(const TransferMatrixd& m);
  /// nextGapPhase is gamma * phi_child, the gap phase the child meets one level up.
  static BranchPredictor coherent(const TransferMatrixd& parent, double nextGapPhase, int N);

  BranchPredictor& withLookahead(double nextGapPhase, int N);
};

/// False when N is even and child * D(nextGapPhase) has half-trace <= -1.
bool hasRealRootAbove(const TransferMatrixd& child, double nextGapPhase, int N);

struct InverseStepResult {
  TransferMatrixd child;
  int branch = 0;
  MatrixClass cls = MatrixClass::elliptic;
  double roundTripError = 0;
  double projectionResidual = 0;
  bool ambiguous = false;
};

/// Index of the selected candidate in `roots.candidates`, or -1 when none is
/// valid. `ambiguous` is set when the runner-up is within a factor 2 of the
/// winner's predictor distance.
int selectBranch(const RootSet& roots, const BranchPredictor& predictor, bool& ambiguous);

/// Throws ParabolicError when B is parabolic and no limit root exists, and
/// ChainBreakError (level -1) when no candidate passes the round trip.
InverseStepResult inverseStep(const TransferMatrixd& parent, double gapPhase, const SsfpGeometry& geom,
                              const BranchPredictor& predictor, double tolerance = 1e-8);

InverseStepResult inverseStep(const TransferMatrixd& parent, double gapPhase, const SsfpGeometry& geom,
                              const TransferMatrixd& predictor, double tolerance = 1e-8);

}  // namespace ssfp
