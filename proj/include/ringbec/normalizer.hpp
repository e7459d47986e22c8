#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "ringbec/landscape.hpp"
#include "ringbec/solver.hpp"

namespace ringbec {

/// 2 pi int r (u^2 + v^2) dr of the bundle's fields.
double mass(const SolutionBundle& solution);

inline constexpr double kMinSolverLambda = 10.0;

struct TheoremBracket {
  double lo = 0.0;
  double hi = 0.0;
  bool asymptotic_valid = false;  ///< lo >= kMinSolverLambda
};

/// ((8 A pi eps)^{-1/(3/2+theta)}, (4 A pi eps)^{-1/(3/2-theta)}).
TheoremBracket theorem_bracket(double epsilon, double theta, double a = 4.0 / 3.0);

struct NormalizerOptions {
  double theta = 0.1;
  double mass_tol = 1e-8;
  double points_per_width = 20.0;
  double scan_step = 0.25;  ///< lambda spacing of the branch scan
  RelativeWindow window;
  std::optional<Window> radius_window;  ///< absolute window overriding the relative one
  double profile_a = 4.0 / 3.0;
};

struct NormalizedSolution {
  double lambda = 0.0;
  SolutionBundle bundle;
  double epsilon = 0.0;
  double theta = 0.0;
  TheoremBracket bracket;
  bool in_bracket = false;
  bool widened = false;
  double y = 0.0;
  double peak_offset = 0.0;  ///< |r_peak - y|
  double omega_norm = 0.0;   ///< lambda-norm of fields minus the ansatz at r_peak
  std::vector<Window> sign_changes;  ///< lambda intervals on one branch where mass - 1 changes sign
  double g_lo = 0.0;  ///< mass - 1 at the first scanned lambda
  double g_hi = 0.0;  ///< mass - 1 at the last scanned lambda
  int evaluations = 0;
};

/// Unit-mass multiplier. The scan splits [lo, hi] into lambda segments on which the selected
/// concentration radius follows one branch of critical points; each segment is solved on one
/// fixed grid so mass is smooth in lambda, and the first segment with a sign change of
/// mass - 1 is refined by false position with bisection safeguards. Throws NoBracket.
NormalizedSolution solve_lambda_for_mass(const CouplingParams& coupling, const PotentialPair& potentials,
                                         const NormalizerOptions& options = {});

nlohmann::ordered_json to_json(const NormalizedSolution& solution);

}  // namespace ringbec
