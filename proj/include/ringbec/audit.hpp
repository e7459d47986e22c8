#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ringbec/profile.hpp"
#include "ringbec/solver.hpp"

namespace ringbec {

/// Discrete integrals of a solution: node-centered differences for u', v' and
/// midpoint sums against the measure (r h radial, h line).
struct SolutionIntegrals {
  double kinetic = 0.0;    ///< int w (u'^2 + v'^2)
  double potential = 0.0;  ///< int w ((lambda+P) u^2 + (lambda+Q) v^2)
  double quartic = 0.0;    ///< int w (alpha u^4 + gamma v^4 + 2 beta u^2 v^2)
  double quartic_r_coupling = 0.0;  ///< same with the coupling term weighted by an extra r
  double moment = 0.0;     ///< int w r (P' u^2 + Q' v^2)
  double l2 = 0.0;         ///< int w (u^2 + v^2)
};

SolutionIntegrals solution_integrals(const SolutionBundle& solution);

struct IdentityResidual {
  double residual = 0.0;
  bool degenerate = false;  ///< both sides vanish (zero solution)
};

/// Energy identity int w (|grad|^2 + (lambda+P)u^2 + (lambda+Q)v^2) = int w (quartic), as
/// |LHS - RHS| / |RHS|.
IdentityResidual audit_identity1(const SolutionBundle& solution);

struct PohozaevResidual {
  double residual = 0.0;          ///< derived balance, drives pass/fail
  double printed_residual = 0.0;  ///< variant with the coupling term weighted by r (radial only)
  bool degenerate = false;
};

/// Pohozaev balance 2 K - int w r (P' u^2 + Q' v^2) = ((k+1)/2) int w (quartic), where
/// k = 1 (radial) or 0 (line).
PohozaevResidual audit_poho2(const SolutionBundle& solution);

struct AsymptoticRatio {
  std::string name;
  std::string anchor;
  double measured = 0.0;
  double predicted = 0.0;
  double ratio = 0.0;
};

/// Measured vs leading-order values at r_lambda = r_peak: kinetic, quartic, quartic/kinetic,
/// potential moment and mass.
std::vector<AsymptoticRatio> audit_asymptotics(const SolutionBundle& solution, const ProfileConstants& constants);

/// Finds a named ratio; throws InvalidConfig when absent.
const AsymptoticRatio& find_ratio(const std::vector<AsymptoticRatio>& ratios, const std::string& name);

struct ConcentrationCondition {
  double m_prime = 0.0;      ///< M'(r_peak)
  double combination = 0.0;  ///< alpha+gamma-2beta + (3/2)[(gamma-beta)P' + (alpha-beta)Q'] r / lambda
  bool no_critical_point = false;
};

ConcentrationCondition audit_concentration_condition(const SolutionBundle& solution);

struct DecayFit {
  double eta_u = 0.0;
  double eta_v = 0.0;
  double eta = 0.0;  ///< min of the two
  int samples_u = 0;
  int samples_v = 0;
};

/// Least-squares slope of log u against sqrt(lambda) |r - r_peak| where u lies in
/// [1e-8, 1e-2] u(r_peak), away from the outer boundary. Throws InsufficientTail below 10 samples.
DecayFit audit_decay(const SolutionBundle& solution);

struct AuditReport {
  IdentityResidual identity1;
  PohozaevResidual poho2;
  std::vector<AsymptoticRatio> ratios;
  ConcentrationCondition concentration;
  std::optional<DecayFit> decay;
};

AuditReport audit_solution(const SolutionBundle& solution, const ProfileConstants& constants);

nlohmann::ordered_json to_json(const AuditReport& report);

// ---------------------------------------------------------------------------

struct RefinementQuantity {
  std::string name;
  bool tends_to_zero = true;  ///< residual-type (order from pairs) vs converging value (Richardson triples)
  std::vector<double> values;
  std::vector<double> orders;
};

struct RefinementTable {
  std::vector<double> h;
  std::vector<RefinementQuantity> quantities;

  const RefinementQuantity& at(const std::string& name) const;
};

/// Fills in observed orders: log(q_k / q_{k+1}) / log(h_k / h_{k+1}) for residuals and
/// log(|q_k - q_{k+1}| / |q_{k+1} - q_{k+2}|) / log(h_k / h_{k+1}) for converging values.
void compute_orders(RefinementTable& table);

/// One refinement case: a solve at each points-per-width level.
struct RefinementCase {
  CouplingParams coupling;
  PotentialPair potentials;
  double lambda = 1.0;
  double r0 = 0.0;  ///< ansatz center
  Geometry geometry = Geometry::Radial;
  double pad = 15.0;
  std::vector<double> points_per_width;
};

/// Solves every level (Newton from the corrected ansatz in radial mode, from the ansatz in
/// line mode) and tabulates identity1, poho2, mass and, for constant potentials in line mode,
/// the sup residual of the sampled ansatz off the Dirichlet row. Throws InvalidConfig for fewer than 3 levels.
RefinementTable refinement_study(const RefinementCase& refinement);

nlohmann::ordered_json to_json(const RefinementTable& table);

}  // namespace ringbec
