#pragma once

#include <vector>

#include "ringbec/potential.hpp"
#include "ringbec/profile.hpp"

namespace ringbec {

/// Convex weights of P and Q inside the landscape; they sum to one.
struct LandscapeWeights {
  double w_p = 0.5;
  double w_q = 0.5;
};

LandscapeWeights landscape_weights(const CouplingParams& coupling);

/// M(r) = r [1 + (w_P P(r) + w_Q Q(r)) / lambda]^{3/2}
double eval_M(const PotentialPair& pots, const CouplingParams& coupling, double lambda, double r);

/// Chain-rule derivative
///   M'(r) = B^{1/2} [B + (3/2) r (w_P P' + w_Q Q') / lambda],  B = 1 + (w_P P + w_Q Q)/lambda.
double eval_M_prime(const PotentialPair& pots, const CouplingParams& coupling, double lambda, double r);

/// Centered difference of eval_M_prime with h = 1e-4 max(1, r).
double eval_M_second(const PotentialPair& pots, const CouplingParams& coupling, double lambda, double r);

struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

struct CriticalPoint {
  double y = 0.0;
  double m_second = 0.0;
  Window bracket;
  double lambda = 0.0;
};

inline constexpr double kDefaultNondegeneracy = 1e-3;

/// All sign changes of M' in the window, bisected to 1e-10 lambda and kept when
/// |M''| >= c0. Ascending. Throws NoCriticalPoint when the scan sees no sign change.
std::vector<CriticalPoint> find_critical_points(const PotentialPair& pots, const CouplingParams& coupling,
                                                double lambda, Window window,
                                                double c0 = kDefaultNondegeneracy);

/// Window [c1 lambda, c2 lambda] for the concentration radius.
struct RelativeWindow {
  double c1 = 0.6;
  double c2 = 1.5;
};

/// Critical point in [c1 lambda, c2 lambda] closest to lambda; ties go to the smaller radius.
CriticalPoint predicted_concentration(const PotentialPair& pots, const CouplingParams& coupling,
                                      double lambda, RelativeWindow window = {},
                                      double c0 = kDefaultNondegeneracy);

/// Critical point in an absolute window closest to lambda, same tie rule.
CriticalPoint nearest_concentration(const PotentialPair& pots, const CouplingParams& coupling, double lambda,
                                    Window window, double c0 = kDefaultNondegeneracy);

/// Number of nondegenerate critical points in the window (zero when there are none).
int count_branches(const PotentialPair& pots, const CouplingParams& coupling, double lambda, Window window,
                   double c0 = kDefaultNondegeneracy);

}  // namespace ringbec
