#pragma once

#include <limits>
#include <optional>
#include <vector>

#include <json.hpp>

#include "ringbec/banded.hpp"
#include "ringbec/landscape.hpp"
#include "ringbec/solver.hpp"

namespace ringbec {

/// Discrete lambda-weighted inner product
///   <(u,v),(phi,psi)> = int w (u' phi' + v' psi' + (lambda+P) u phi + (lambda+Q) v psi)
/// with w = r (radial) or 1 (line), assembled as x^T G y from the flux-form
/// stiffness. Functionals given as weak vectors (pairings against the measure
/// w dr) are turned into representers by one tridiagonal solve per component.
class WeightedMetric {
 public:
  explicit WeightedMetric(const Problem& problem);

  double inner(const FieldPair& x, const FieldPair& y) const;
  double norm(const FieldPair& x) const;

  /// G x.
  FieldPair gram(const FieldPair& x) const;
  /// G^{-1} f for a weak vector f.
  FieldPair representer(const FieldPair& weak) const;
  /// Weak vector of a pointwise density: f_i -> w_i h f_i.
  FieldPair to_weak(const FieldPair& density) const;

  const Problem& problem() const { return problem_; }

 private:
  Problem problem_;
  std::vector<double> gu_diag_, gv_diag_, g_off_;
  std::vector<double> cell_;
};

/// Where the reduction's source term comes from.
///  Functional: the functional (P(r0) - P) U + U'/r evaluated with the exact ansatz derivative.
///  Discrete:   minus the discrete residual of the sampled ansatz; its fixed point solves
///              the discrete system exactly (the functional plus O(h^2) sampling terms).
enum class Source { Functional, Discrete };

struct ContractionReport {
  std::vector<double> omega_norms;  ///< ||omega_k||_lambda per iterate
  std::vector<double> ratios;       ///< ||w_{k+1}-w_k|| / ||w_k-w_{k-1}||, from iterate 2 on
  int iterations = 0;
  double l_norm = 0.0;              ///< norm of the source used
};

struct Multipliers {
  double b1 = 0.0;
  double b2 = 0.0;
  double reduced_value = 0.0;
};

struct CoercivityEstimate {
  double rho_hat = 0.0;
  double rayleigh = 0.0;  ///< signed eigenvalue estimate of L restricted to E
  int iterations = 0;
  bool converged = false;
};

/// Lyapunov-Schmidt objects for one (lambda, r0): ansatz A, tangent t = dA/dr,
/// the linearization L at A, the space E = {x : <x, t> = 0}, sources and remainder.
class ReductionEngine {
 public:
  ReductionEngine(const Problem& problem, double r0);

  const WeightedMetric& metric() const { return metric_; }
  double r0() const { return r0_; }
  const FieldPair& ansatz() const { return ansatz_; }
  const FieldPair& tangent() const { return tangent_; }

  /// Representer of the source functional and its lambda-norm.
  FieldPair compute_l(Source source = Source::Functional) const;

  /// Representer of the quadratic form of the linearization acting on x.
  FieldPair apply_L(const FieldPair& x) const;

  FieldPair project_E(const FieldPair& x) const;

  /// Pointwise remainder N(A + w) - N(A) - N'(A) w, returned as representer.
  FieldPair compute_R(const FieldPair& omega) const;
  /// Same remainder as a pointwise density (strong form).
  FieldPair remainder_density(const FieldPair& omega) const;

  /// z in E with L z - y parallel to t, for a representer y.
  FieldPair solve_projected(const FieldPair& y) const;

  /// Smallest |eigenvalue| of L on E by inverse iteration in the lambda-metric.
  CoercivityEstimate coercivity_estimate(int max_iter = 200, double rtol = 1e-10) const;

  /// Fixed-point iteration omega <- L_E^{-1} P_E (l + R(omega)) from omega = 0.
  FieldPair contraction_solve(double tol, ContractionReport* report = nullptr,
                              Source source = Source::Discrete, int max_iter = 100) const;

  /// b1, b2: r-weighted least squares of the residual of `fields` against (U', V');
  /// reduced_value: int w r (F_u u' + F_v v') with u', v' of `fields`.
  Multipliers multipliers(const FieldPair& fields) const;

 private:
  FieldPair solve_J(const FieldPair& weak) const;
  FieldPair solve_projected_weak(const FieldPair& weak) const;
  FieldPair source_weak(Source source) const;

  Problem problem_;
  double r0_;
  WeightedMetric metric_;
  FieldPair ansatz_;
  FieldPair tangent_;
  double tangent_sq_ = 0.0;
  BlockJacobian jac_;  // strong-form Jacobian at the ansatz
  std::optional<BandedLU> lu_;
  FieldPair g_tangent_;      // G t
  FieldPair j_inv_g_tangent_;
  double schur_ = 0.0;       // (G t)^T J_w^{-1} G t
};

/// Reduced-equation value at r0 with the corrected field A + omega(r0).
struct ReducedEvaluation {
  double r0 = 0.0;
  FieldPair omega;
  Multipliers corrected;
  Multipliers bare;  ///< evaluated on the uncorrected ansatz
  ContractionReport contraction;
};

ReducedEvaluation evaluate_reduced(const Problem& problem, double r0, double tol = 1e-13);

/// Bisection root of the reduced equation inside `bracket`; throws NoSignChange.
ReducedEvaluation solve_reduced_for_r(const Problem& problem, Window bracket, double r_tol = 1e-9,
                                      double tol = 1e-13);

/// Nearest root of the reduced equation to `guess`: probes guess -/+ step, 2 step, ... until
/// a sign change, then bisects. Throws NoSignChange when the grid is exhausted.
ReducedEvaluation locate_reduced_root(const Problem& problem, double guess, double step, double r_tol = 1e-9,
                                      double tol = 1e-13);

/// A(r0) + omega(r0): the ansatz corrected on E. A Newton start that does not drift
/// along the translation direction when the landscape has a minimum at r0.
FieldPair corrected_ansatz(const Problem& problem, double r0, double tol = 1e-12);

/// r0 at which fields - A(r0) is lambda-orthogonal to the tangent, searched near `guess`.
double align_r0(const Problem& problem, const FieldPair& fields, double guess);

struct ReductionReport {
  double lambda = 0.0;
  double r0 = 0.0;
  double l_norm = 0.0;           ///< functional source
  double l_discrete_norm = 0.0;  ///< discrete source
  std::vector<double> omega_norms;
  std::vector<double> contraction_ratios;
  double rho_hat = 0.0;
  int coercivity_iterations = 0;
  Multipliers corrected;
  Multipliers bare;
};

/// All diagnostics at one (lambda, r0).
ReductionReport reduction_report(const Problem& problem, double r0, double tol = 1e-13);

nlohmann::ordered_json to_json(const ReductionReport& report);

}  // namespace ringbec
