#pragma once

#include <vector>

#include "ringbec/banded.hpp"
#include "ringbec/grid.hpp"
#include "ringbec/potential.hpp"
#include "ringbec/profile.hpp"

namespace ringbec {

struct FieldPair {
  std::vector<double> u;
  std::vector<double> v;

  static FieldPair zeros(int n) {
    return {std::vector<double>(static_cast<std::size_t>(n), 0.0), std::vector<double>(static_cast<std::size_t>(n), 0.0)};
  }
  std::size_t size() const { return u.size(); }
  bool finite() const;
};

FieldPair operator+(const FieldPair& a, const FieldPair& b);
FieldPair operator-(const FieldPair& a, const FieldPair& b);
FieldPair operator*(double s, const FieldPair& a);

/// Everything that defines the discrete stationary system at one lambda.
struct Problem {
  CouplingParams coupling;
  PotentialPair potentials;
  double lambda = 1.0;
  RadialGrid grid;
  Geometry geometry = Geometry::Radial;
};

/// Samples of U_{r0,lambda}(r) = s_P c_U w(s_P (r - r0)), s_P = sqrt(lambda + P(r0)),
/// and likewise V with Q and c_V.
FieldPair build_ansatz(const Problem& problem, double r0);

/// d/dr of the ansatz samples (the translation direction).
FieldPair ansatz_tangent(const Problem& problem, double r0);

/// Strong-form residual
///   -u'' - (1/r) u' + (lambda + P) u - alpha u^3 - beta u v^2
///   -v'' - (1/r) v' + (lambda + Q) v - gamma v^3 - beta u^2 v
/// with centered differences (the 1/r term is absent in line geometry).
FieldPair residual(const Problem& problem, const FieldPair& fields);

/// Linearization of `residual` at `fields`: tridiagonal diagonal blocks and
/// diagonal coupling blocks -2 beta u v.
struct BlockJacobian {
  std::vector<double> uu_sub, uu_diag, uu_sup;
  std::vector<double> vv_sub, vv_diag, vv_sup;
  std::vector<double> uv;  ///< d F_u / d v
  std::vector<double> vu;  ///< d F_v / d u

  FieldPair apply(const FieldPair& x) const;

  /// Interleaved (u_0, v_0, u_1, v_1, ...) band matrix of S^{-1} J S with
  /// S = diag(scale_u, scale_v); bandwidth 2 on each side.
  BandedMatrix interleaved(double scale_u = 1.0, double scale_v = 1.0) const;
};

BlockJacobian jacobian(const Problem& problem, const FieldPair& fields);

struct SolveConfig {
  double tol = 1e-10;  ///< on ||F|| / (lambda ||x||)
  int max_iter = 50;
  double armijo_slope = 1e-4;
  double backtrack = 0.5;
  double min_step = 0x1p-30;
  bool rescale = true;  ///< iterate on (u / c_U, v / c_V)
  double pivot_threshold = 1e-14;
};

struct SolutionBundle {
  Problem problem;
  FieldPair fields;
  double r_peak = 0.0;
  bool interior_peak = false;
  int iterations = 0;
  double residual = 0.0;  ///< final relative residual
  double mass = 0.0;
  bool trivial = false;
  bool positive = false;
  std::vector<double> residual_history;
};

/// Damped Newton with Armijo backtracking on ||F||_2.
SolutionBundle newton_solve(const Problem& problem, FieldPair initial, const SolveConfig& config = {});

double relative_residual(const Problem& problem, const FieldPair& fields);

struct PeakPair {
  double u = 0.0;
  double v = 0.0;
};

/// Quadratic-interpolated maxima of u and v. Throws BoundaryPeak when a maximum
/// sits at the first or last node.
PeakPair peak_locations(const FieldPair& fields, const RadialGrid& grid);

/// u-peak; throws PeakMismatch when the two peaks differ by more than h.
double peak_location(const FieldPair& fields, const RadialGrid& grid);

/// 2 pi int r (u^2 + v^2) dr (radial) or int_R (u^2 + v^2) over the even extension (line).
double field_mass(const FieldPair& fields, const RadialGrid& grid, Geometry geometry);

}  // namespace ringbec
