#include "ringbec/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <thread>

#include "ringbec/audit.hpp"
#include "ringbec/error.hpp"
#include "ringbec/reduction.hpp"
#include "ringbec/solution_io.hpp"

namespace ringbec {

namespace {

struct RatioSet {
  double kinetic = 0.0;
  double quartic_over_kinetic = 0.0;
  double mass = 0.0;
  double moment = 0.0;
};

RatioSet ratio_set(const SolutionBundle& s, const ProfileConstants& k) {
  const auto r = audit_asymptotics(s, k);
  RatioSet out;
  out.kinetic = find_ratio(r, "kinetic").ratio;
  out.quartic_over_kinetic = find_ratio(r, "quartic_over_kinetic").measured;
  out.mass = find_ratio(r, "mass").ratio;
  out.moment = s.problem.potentials.both_zero() ? 0.0 : find_ratio(r, "moment").ratio;
  return out;
}

SolutionBundle solve_at(const CouplingParams& c, const PotentialPair& pots, double lambda, double y, double ppw) {
  GridOptions go;
  go.points_per_width = ppw;
  const Problem pb{c, pots, lambda, build_grid(lambda, y, go), Geometry::Radial};
  return newton_solve(pb, corrected_ansatz(pb, y));
}

}  // namespace

SweepRow sweep_point(const CouplingParams& c, const PotentialPair& pots, double lambda,
                     const ProfileConstants& constants, const SweepOptions& opt) {
  SweepRow row;
  row.lambda = lambda;
  const CriticalPoint cp = predicted_concentration(pots, c, lambda, opt.window);
  row.y = cp.y;
  row.branches = count_branches(pots, c, lambda, Window{opt.window.c1 * lambda, opt.window.c2 * lambda});

  GridOptions go;
  go.points_per_width = opt.points_per_width;
  const Problem pb{c, pots, lambda, build_grid(lambda, cp.y, go), Geometry::Radial};

  const ReductionEngine engine(pb, cp.y);
  row.l_norm = engine.metric().norm(engine.compute_l(Source::Functional));
  row.rho_hat = engine.coercivity_estimate().rho_hat;
  ContractionReport cr;
  const FieldPair omega = engine.contraction_solve(opt.contraction_tol, &cr);
  row.omega_norm = cr.omega_norms.back();
  row.max_contraction_ratio = cr.ratios.empty() ? 0.0 : *std::max_element(cr.ratios.begin(), cr.ratios.end());
  const Multipliers m = engine.multipliers(engine.ansatz() + omega);
  row.b1 = m.b1;
  row.b2 = m.b2;
  row.reduced_value = m.reduced_value;

  const SolutionBundle sol = newton_solve(pb, engine.ansatz() + omega);
  row.r_peak = sol.r_peak;
  row.iterations = sol.iterations;
  row.mass = sol.mass;

  const double r_star = align_r0(pb, sol.fields, sol.r_peak);
  const ReductionEngine aligned(pb, r_star);
  const FieldPair omega_star = aligned.contraction_solve(opt.contraction_tol);
  row.fixed_point_mismatch =
      aligned.metric().norm((sol.fields - aligned.ansatz()) - omega_star) / aligned.metric().norm(omega_star);

  row.identity1 = audit_identity1(sol).residual;
  row.poho2 = audit_poho2(sol).residual;
  row.m_prime_peak = audit_concentration_condition(sol).m_prime;
  try {
    row.eta = audit_decay(sol).eta;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientTail) throw;
    row.eta = std::numeric_limits<double>::quiet_NaN();
  }

  RatioSet ratios = ratio_set(sol, constants);
  if (opt.richardson) {
    const RatioSet fine = ratio_set(solve_at(c, pots, lambda, cp.y, 2.0 * opt.points_per_width), constants);
    auto extrapolate = [](double coarse, double f) { return (4.0 * f - coarse) / 3.0; };
    ratios.kinetic = extrapolate(ratios.kinetic, fine.kinetic);
    ratios.quartic_over_kinetic = extrapolate(ratios.quartic_over_kinetic, fine.quartic_over_kinetic);
    ratios.mass = extrapolate(ratios.mass, fine.mass);
    ratios.moment = extrapolate(ratios.moment, fine.moment);
  }
  row.kinetic_ratio = ratios.kinetic;
  row.quartic_over_kinetic = ratios.quartic_over_kinetic;
  row.mass_ratio = ratios.mass;
  row.moment_ratio = ratios.moment;
  return row;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(std::abs(y[i]) > 0.0) || !std::isfinite(y[i])) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    const double a = std::log(x[i]);
    const double b = std::log(std::abs(y[i]));
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  const double n = static_cast<double>(x.size());
  const double den = n * sxx - sx * sx;
  return den > 0.0 ? (n * sxy - sx * sy) / den : std::numeric_limits<double>::quiet_NaN();
}

namespace {

struct Column {
  const char* name;
  double (*get)(const SweepRow&);
};

const Column kColumns[] = {
    {"lambda", [](const SweepRow& r) { return r.lambda; }},
    {"y", [](const SweepRow& r) { return r.y; }},
    {"r_peak", [](const SweepRow& r) { return r.r_peak; }},
    {"iterations", [](const SweepRow& r) { return static_cast<double>(r.iterations); }},
    {"mass", [](const SweepRow& r) { return r.mass; }},
    {"l_norm", [](const SweepRow& r) { return r.l_norm; }},
    {"omega_norm", [](const SweepRow& r) { return r.omega_norm; }},
    {"rho_hat", [](const SweepRow& r) { return r.rho_hat; }},
    {"max_contraction_ratio", [](const SweepRow& r) { return r.max_contraction_ratio; }},
    {"b1", [](const SweepRow& r) { return r.b1; }},
    {"b2", [](const SweepRow& r) { return r.b2; }},
    {"reduced_value", [](const SweepRow& r) { return r.reduced_value; }},
    {"fixed_point_mismatch", [](const SweepRow& r) { return r.fixed_point_mismatch; }},
    {"identity1", [](const SweepRow& r) { return r.identity1; }},
    {"poho2", [](const SweepRow& r) { return r.poho2; }},
    {"kinetic_ratio", [](const SweepRow& r) { return r.kinetic_ratio; }},
    {"quartic_over_kinetic", [](const SweepRow& r) { return r.quartic_over_kinetic; }},
    {"mass_ratio", [](const SweepRow& r) { return r.mass_ratio; }},
    {"moment_ratio", [](const SweepRow& r) { return r.moment_ratio; }},
    {"m_prime_peak", [](const SweepRow& r) { return r.m_prime_peak; }},
    {"eta", [](const SweepRow& r) { return r.eta; }},
    {"branches", [](const SweepRow& r) { return static_cast<double>(r.branches); }},
};

}  // namespace

SweepResult run_sweep(const CouplingParams& c, const PotentialPair& pots, const ProfileConstants& constants,
                      const SweepOptions& opt) {
  if (opt.lambdas.empty()) throw Error(ErrorCode::InvalidConfig, "sweep needs at least one lambda");
  const std::size_t n = opt.lambdas.size();
  std::vector<SweepRow> rows(n);
  std::vector<std::exception_ptr> errors(n);
  unsigned workers = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += workers) {
          try {
            rows[i] = sweep_point(c, pots, opt.lambdas[i], constants, opt);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SweepResult out;
  out.rows = std::move(rows);
  std::vector<double> lam;
  for (const auto& r : out.rows) lam.push_back(r.lambda);
  for (const auto& col : kColumns) {
    out.columns.emplace_back(col.name);
    std::vector<double> v;
    for (const auto& r : out.rows) v.push_back(col.get(r));
    out.slopes.push_back(loglog_slope(lam, v));
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  for (std::size_t k = 0; k < std::size(kColumns); ++k) out << (k ? "," : "") << kColumns[k].name;
  out << '\n';
  for (const auto& r : result.rows) {
    for (std::size_t k = 0; k < std::size(kColumns); ++k) out << (k ? "," : "") << format_number(kColumns[k].get(r));
    out << '\n';
  }
  out << "slope";
  for (std::size_t k = 1; k < result.slopes.size(); ++k) {
    out << ',';
    if (std::isfinite(result.slopes[k])) out << format_number(result.slopes[k]);
  }
  out << '\n';
}

}  // namespace ringbec
