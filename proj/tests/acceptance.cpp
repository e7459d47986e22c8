// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ringbec/audit.hpp"
#include "ringbec/cli.hpp"
#include "ringbec/error.hpp"
#include "ringbec/landscape.hpp"
#include "ringbec/normalizer.hpp"
#include "ringbec/reduction.hpp"
#include "ringbec/sweep.hpp"

using namespace ringbec;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double sup_norm(const FieldPair& x) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max({m, std::abs(x.u[i]), std::abs(x.v[i])});
  return m;
}

double l2_norm(const FieldPair& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x.u[i] * x.u[i] + x.v[i] * x.v[i];
  return std::sqrt(s);
}

FieldPair random_fields(std::mt19937& rng, std::size_t n, double scale) {
  std::uniform_real_distribution<double> d(-scale, scale);
  FieldPair f{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    f.u[i] = d(rng);
    f.v[i] = d(rng);
  }
  return f;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Verdict()>& body) {
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("threw ") + e.what()};
  }
  if (!v.pass) ++failures;
  std::printf("criterion %2d %s: %s (%s)\n", id, v.pass ? "PASS" : "FAIL", title.c_str(), v.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const CouplingParams kCoupling = coupling_for_epsilon(1e-4);
const std::vector<double> kSweep{50.0, 100.0, 200.0, 400.0};

bool approaches(const std::vector<SweepRow>& rows, double SweepRow::*field, double target) {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (std::abs(rows[k].*field - target) > std::abs(rows[k - 1].*field - target)) return false;
  }
  return true;
}

Verdict profile_constants() {
  const auto t0 = Clock::now();
  const ScalarProfile w = solve_w(1e-8);
  const ProfileConstants k = compute_constants(w, 1e-3);
  double sup = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    sup = std::max(sup, std::abs(w.samples()[i] - line_soliton(w.step() * static_cast<double>(i))));
  }
  const double dt = seconds_since(t0);
  const double r1 = std::abs(3 * k.i4 - 4 * k.i2) / (4 * k.i2);
  const double r2 = std::abs(4 * k.i2 - 12 * k.a) / (12 * k.a);
  return {r1 <= 1e-8 && r2 <= 1e-8 && sup <= 1e-6 && dt < 1.0,
          fmt("|3I4-4I2|/4I2=%.2e |4I2-12A|/12A=%.2e sup|w-sqrt2 sech|=%.2e %.3fs", r1, r2, sup, dt)};
}

Verdict line_exactness() {
  const auto t0 = Clock::now();
  std::mt19937 rng(2024u);
  std::vector<CouplingParams> couplings{validate_coupling(1, 1, 0), validate_coupling(2, 2, 1), validate_coupling(1, 1, 3),
                                        validate_coupling(1, 2, 0.5), validate_coupling(0.8, 1.5, -0.6),
                                        validate_coupling(1, 1, 19999)};
  double worst_err = 0.0;
  int worst_it = 0;
  for (const auto& c : couplings) {
    const Problem pb{c, zero_potentials(), 1.0, RadialGrid{1024, 40.0 / 1024}, Geometry::Line};
    const FieldPair exact = build_ansatz(pb, 0.0);
    SolveConfig cfg;
    cfg.tol = 1e-12;
    const SolutionBundle reference = newton_solve(pb, exact, cfg);
    FieldPair start = exact;
    std::uniform_real_distribution<double> d(-0.01, 0.01);
    for (std::size_t i = 0; i < start.size(); ++i) {
      start.u[i] *= 1.0 + d(rng);
      start.v[i] *= 1.0 + d(rng);
    }
    const SolutionBundle s = newton_solve(pb, start, cfg);
    worst_err = std::max(worst_err, sup_norm(s.fields - reference.fields) / sup_norm(reference.fields));
    worst_it = std::max(worst_it, s.iterations);
  }
  const double dt = seconds_since(t0);
  return {worst_err <= 1e-8 && worst_it <= 6 && dt < 1.0,
          fmt("%zu couplings, worst relative field error %.2e, worst iterations %d, %.3fs", couplings.size(), worst_err,
              worst_it, dt)};
}

Verdict jacobian_consistency() {
  std::mt19937 rng(512u);
  const double lambda = 100.0;
  const double y = predicted_concentration(sine_potentials(), kCoupling, lambda).y;
  const Problem pb{kCoupling, sine_potentials(), lambda, RadialGrid{512, 1.2 * y / 512}, Geometry::Radial};
  const FieldPair x = build_ansatz(pb, y);
  const double scale = sup_norm(x);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const FieldPair d = random_fields(rng, 512, scale);
    const double step = 1e-5;
    const FieldPair fd = (0.5 / step) * (residual(pb, x + step * d) - residual(pb, x - step * d));
    const FieldPair jd = jacobian(pb, x).apply(d);
    worst = std::max(worst, l2_norm(fd - jd) / l2_norm(jd));
  }
  return {worst <= 1e-6, fmt("20 directions on 512 nodes, worst relative mismatch %.2e", worst)};
}

Verdict identity_refinement() {
  const double lambda = 100.0;
  const double y = predicted_concentration(sine_potentials(), kCoupling, lambda).y;
  RefinementTable t;
  RefinementQuantity id1{"identity1", true, {}, {}}, poho{"poho2", true, {}, {}};
  double slowest = 0.0;
  for (double ppw : {20.0, 40.0, 80.0}) {
    const auto t0 = Clock::now();
    GridOptions go;
    go.points_per_width = ppw;
    const Problem pb{kCoupling, sine_potentials(), lambda, build_grid(lambda, y, go), Geometry::Radial};
    SolveConfig cfg;
    cfg.tol = 1e-11;
    const SolutionBundle s = newton_solve(pb, corrected_ansatz(pb, y), cfg);
    id1.values.push_back(audit_identity1(s).residual);
    poho.values.push_back(audit_poho2(s).residual);
    t.h.push_back(pb.grid.h);
    slowest = std::max(slowest, seconds_since(t0));
  }
  t.quantities = {id1, poho};
  compute_orders(t);
  bool ok = slowest < 30.0;
  for (const auto& q : t.quantities) {
    for (double v : q.values) ok = ok && v <= 1e-3;
    for (double o : q.orders) ok = ok && std::abs(o - 2.0) <= 0.3;
  }
  return {ok, fmt("identity1 %.2e/%.2e/%.2e orders %.3f %.3f; poho2 %.2e/%.2e/%.2e orders %.3f %.3f; slowest level %.2fs",
                  id1.values[0], id1.values[1], id1.values[2], t.quantities[0].orders[0], t.quantities[0].orders[1],
                  poho.values[0], poho.values[1], poho.values[2], t.quantities[1].orders[0], t.quantities[1].orders[1],
                  slowest)};
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  report(1, "profile constants", profile_constants);
  report(2, "line-mode exactness", line_exactness);
  report(3, "Jacobian consistency", jacobian_consistency);
  report(4, "identity audits under refinement", identity_refinement);

  SweepResult sweep;
  double sweep_seconds = 0.0;
  std::string sweep_error;
  try {
    const auto t0 = Clock::now();
    SweepOptions opt;
    opt.lambdas = kSweep;
    sweep = run_sweep(kCoupling, sine_potentials(), compute_constants(solve_w(1e-10), 1e-3), opt);
    sweep_seconds = seconds_since(t0);
  } catch (const std::exception& e) {
    sweep_error = e.what();
  }
  auto column_slope = [&](double SweepRow::*field) {
    std::vector<double> x, yv;
    for (const auto& r : sweep.rows) {
      x.push_back(r.lambda);
      yv.push_back(r.*field);
    }
    return loglog_slope(x, yv);
  };
  auto need_sweep = [&](auto body) {
    return [&, body]() -> Verdict {
      if (!sweep_error.empty() || sweep.rows.size() != kSweep.size()) return {false, "sweep failed: " + sweep_error};
      return body();
    };
  };

  report(5, "asymptotic ratios", need_sweep([&] {
           const SweepRow& last = sweep.rows.back();
           const bool monotone = approaches(sweep.rows, &SweepRow::kinetic_ratio, 1.0) &&
                                 approaches(sweep.rows, &SweepRow::quartic_over_kinetic, 4.0) &&
                                 approaches(sweep.rows, &SweepRow::mass_ratio, 1.0);
           const bool ok = std::abs(last.kinetic_ratio - 1.0) <= 0.10 && std::abs(last.quartic_over_kinetic - 4.0) <= 0.40 &&
                           std::abs(last.mass_ratio - 1.0) <= 0.15 && monotone && sweep_seconds < 300.0;
           return Verdict{ok, fmt("at lambda=400 kinetic %.4f quartic/kinetic %.4f mass %.4f; monotone %s; %.1fs",
                                  last.kinetic_ratio, last.quartic_over_kinetic, last.mass_ratio, monotone ? "yes" : "no",
                                  sweep_seconds)};
         }));

  report(6, "concentration law", need_sweep([&] {
           const double slope = column_slope(&SweepRow::m_prime_peak);
           return Verdict{slope <= -0.4, fmt("slope of |M'(r_peak)| vs lambda %.3f", slope)};
         }));

  report(7, "reduction diagnostics", need_sweep([&] {
           const double slope = column_slope(&SweepRow::l_norm);
           double ratio = 0.0, mismatch = 0.0, rho_min = INFINITY, rho_max = 0.0;
           for (const auto& r : sweep.rows) {
             ratio = std::max(ratio, r.max_contraction_ratio);
             mismatch = std::max(mismatch, r.fixed_point_mismatch);
             rho_min = std::min(rho_min, r.rho_hat);
             rho_max = std::max(rho_max, r.rho_hat);
           }
           const bool ok = slope >= -0.40 && slope <= -0.10 && ratio <= 0.5 && mismatch <= 1e-6 && rho_min > 0.0 &&
                           rho_max / rho_min < 2.0;
           return Verdict{ok, fmt("l slope %.3f, max contraction ratio %.2e, max mismatch %.2e, rho_hat in [%.4f, %.4f]",
                                  slope, ratio, mismatch, rho_min, rho_max)};
         }));

  report(8, "normalization", [] {
    const auto t0 = Clock::now();
    const NormalizedSolution n = solve_lambda_for_mass(kCoupling, sine_potentials());
    const double dt = seconds_since(t0);
    const double pi = 3.141592653589793;
    const double a = 4.0 / 3.0;
    const double lo = std::pow(8.0 * a * pi * 1e-4, -1.0 / 1.6);
    const double hi = std::pow(4.0 * a * pi * 1e-4, -1.0 / 1.4);
    const double mass_err = std::abs(n.bundle.mass - 1.0);
    const double offset_bound = std::pow(n.lambda, -0.4);
    const double c = n.omega_norm / std::pow(n.lambda, -0.2);
    const bool ok = mass_err <= 1e-8 && n.lambda > lo && n.lambda < hi && n.peak_offset <= offset_bound && c <= 10.0 &&
                    dt < 180.0;
    return Verdict{ok, fmt("lambda_eps %.6f in (%.3f, %.3f), |mass-1| %.1e, |r_peak-y| %.2e <= %.2e, C %.3f, %.1fs",
                           n.lambda, lo, hi, mass_err, n.peak_offset, offset_bound, c, dt)};
  });

  report(9, "necessity mirror", [] {
    const auto dir = std::filesystem::temp_directory_path() / "ringbec_acceptance";
    std::filesystem::create_directories(dir);
    const auto pots = dir / "zero.json";
    std::ofstream(pots) << R"({"P": {"kind": "zero"}, "Q": {"kind": "zero"}})";
    std::ostringstream out, err1, err2;
    const int solve = run_cli({"solve", "--potentials", pots.string(), "--out", dir.string()}, out, err1);
    const int normalize = run_cli({"normalize", "--potentials", pots.string(), "--out", dir.string()}, out, err2);
    const bool named = err1.str().find("NoCriticalPoint") != std::string::npos &&
                       err2.str().find("NoBracket") != std::string::npos;
    return Verdict{solve == kExitConfig && normalize == kExitSolver && named,
                   fmt("solve exit %d, normalize exit %d", solve, normalize)};
  });

  report(10, "branch counting", [] {
    std::vector<int> counts;
    bool ok = true;
    for (double lambda : kSweep) {
      counts.push_back(count_branches(sine_potentials(), kCoupling, lambda, {0.6 * lambda, 1.5 * lambda}));
      if (counts.size() > 1 && counts.back() < counts[counts.size() - 2]) ok = false;
    }
    return Verdict{ok, fmt("counts %d %d %d %d", counts[0], counts[1], counts[2], counts[3])};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
