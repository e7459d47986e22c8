#pragma once

#include <vector>

namespace ringbec {

/// Coupling triple (alpha, gamma, beta) together with the synchronized
/// amplitudes c_U, c_V and the mass parameter epsilon they determine.
struct CouplingParams {
  double alpha = 1.0;
  double gamma = 1.0;
  double beta = 0.0;
  double c_u = 1.0;
  double c_v = 1.0;
  double epsilon = 2.0;
};

/// Validates the admissible coupling set
///   beta in (-sqrt(alpha*gamma), 0) U (0, min(alpha,gamma)) U (max(alpha,gamma), inf)
/// and fills in the derived quantities. Endpoints are rejected.
/// The decoupled case beta == 0 is accepted as well (it is the natural
/// reference point of the family, e.g. (1,1,0) gives epsilon = 2).
CouplingParams validate_coupling(double alpha, double gamma, double beta);

/// Coupling with alpha = gamma = 1 and beta = 2/epsilon - 1 (repulsive branch),
/// the canonical one-parameter family reaching small epsilon.
CouplingParams coupling_for_epsilon(double epsilon);

/// Closed form of the positive even solution of -w'' + w = w^3.
double line_soliton(double t);
double line_soliton_derivative(double t);

/// Numerical line soliton obtained by shooting on [0, R].
class ScalarProfile {
 public:
  ScalarProfile(double step, std::vector<double> w, std::vector<double> dw, double decay_rate);

  double step() const { return step_; }
  double radius() const { return step_ * static_cast<double>(w_.size() - 1); }
  std::size_t size() const { return w_.size(); }
  double decay_rate() const { return decay_rate_; }

  /// Samples on [0, R] at r_i = i * step.
  const std::vector<double>& samples() const { return w_; }
  const std::vector<double>& derivative_samples() const { return dw_; }

  /// Even extension; cubic Hermite inside the table, exponential tail outside.
  double value(double r) const;
  double derivative(double r) const;

  /// Mirrored table on [-R, R]; entry k corresponds to r = (k - (size-1)) * step.
  std::vector<double> symmetric_samples() const;

  /// max |-w'' + w - w^3| over interior table nodes, w'' by five-point differences.
  double max_ode_residual() const;

 private:
  double step_;
  std::vector<double> w_;
  std::vector<double> dw_;
  double decay_rate_;
};

/// Solves -w'' + w = w^3, w'(0) = 0, w -> 0 by bisection on w(0) followed by
/// Newton polishing of the decay-matching condition w'(R) + w(R) = 0.
/// `tol` bounds the sup distance the caller expects from the exact profile;
/// the integration step is chosen from it.
ScalarProfile solve_w(double tol, double radius = 20.0);

struct ProfileConstants {
  double i2 = 0.0;  ///< integral of w^2 over the line
  double i4 = 0.0;  ///< integral of w^4 over the line
  double a = 0.0;   ///< integral of |w'|^2 over the line
};

/// Composite Simpson over [-R, R] with the given step (must divide R into an even count).
ProfileConstants compute_constants(const ScalarProfile& profile, double quadrature_step);

struct VectorProfile {
  double c_u = 1.0;
  double c_v = 1.0;
  ScalarProfile profile;

  double u(double r) const { return c_u * profile.value(r); }
  double v(double r) const { return c_v * profile.value(r); }
};

VectorProfile vector_profile(const CouplingParams& coupling, const ScalarProfile& profile);

/// Largest pointwise residual of the limit system
///   -U'' + U = alpha U^3 + beta U V^2,  -V'' + V = gamma V^3 + beta U^2 V
/// on the profile table, relative to max(|U|, |V|).
double vector_profile_residual(const CouplingParams& coupling, const VectorProfile& profile);

struct VectorPohozaevReport {
  double mass = 0.0;      ///< (c_U^2 + c_V^2) I2
  double quartic = 0.0;   ///< (3/4)(alpha c_U^4 + gamma c_V^4 + 2 beta c_U^2 c_V^2) I4
  double kinetic = 0.0;   ///< 3 (c_U^2 + c_V^2) A
  double mass_vs_quartic = 0.0;
  double mass_vs_kinetic = 0.0;
};

VectorPohozaevReport audit_vector_pohozaev(const CouplingParams& coupling,
                                           const ProfileConstants& constants);

}  // namespace ringbec
