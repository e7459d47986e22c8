#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ringbec/landscape.hpp"
#include "ringbec/profile.hpp"
#include "ringbec/solver.hpp"

namespace ringbec {

struct SweepOptions {
  std::vector<double> lambdas{50.0, 100.0, 200.0, 400.0};
  double points_per_width = 20.0;
  bool richardson = true;  ///< extrapolate asymptotic ratios from ppw and 2 ppw solves
  RelativeWindow window;
  double contraction_tol = 1e-13;
  unsigned workers = 0;  ///< 0: hardware concurrency
};

/// One lambda of the sweep. Reduction diagnostics are taken at r0 = y_lambda; the
/// fixed-point mismatch compares the contraction at the aligned r0 with the Newton solution.
struct SweepRow {
  double lambda = 0.0;
  double y = 0.0;
  double r_peak = 0.0;
  int iterations = 0;
  double mass = 0.0;
  double l_norm = 0.0;
  double omega_norm = 0.0;
  double rho_hat = 0.0;
  double max_contraction_ratio = 0.0;  ///< over iterates after the first
  double b1 = 0.0;
  double b2 = 0.0;
  double reduced_value = 0.0;
  double fixed_point_mismatch = 0.0;
  double identity1 = 0.0;
  double poho2 = 0.0;
  double kinetic_ratio = 0.0;
  double quartic_over_kinetic = 0.0;
  double mass_ratio = 0.0;
  double moment_ratio = 0.0;
  double m_prime_peak = 0.0;
  double eta = 0.0;
  int branches = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> columns;
  std::vector<double> slopes;  ///< log-log slope of |column| against lambda; NaN where undefined
};

SweepRow sweep_point(const CouplingParams& coupling, const PotentialPair& potentials, double lambda,
                     const ProfileConstants& constants, const SweepOptions& options);

/// Runs every lambda (in parallel, assembled in input order) and fits slopes.
SweepResult run_sweep(const CouplingParams& coupling, const PotentialPair& potentials,
                      const ProfileConstants& constants, const SweepOptions& options);

/// Least-squares slope of log|y| against log x; NaN when any |y| is zero or fewer than 2 points.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Header, one row per lambda, and a footer row starting with "slope".
void write_sweep_csv(std::ostream& out, const SweepResult& result);

}  // namespace ringbec
