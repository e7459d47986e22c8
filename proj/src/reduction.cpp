#include "ringbec/reduction.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "ringbec/error.hpp"

namespace ringbec {

namespace {

double dot(const FieldPair& a, const FieldPair& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.u[i] * b.u[i] + a.v[i] * b.v[i];
  return s;
}

}  // namespace

WeightedMetric::WeightedMetric(const Problem& problem) : problem_(problem) {
  const Stiffness k = build_stiffness(problem.grid, problem.geometry);
  const auto n = static_cast<std::size_t>(problem.grid.n);
  gu_diag_ = k.diag;
  gv_diag_ = k.diag;
  g_off_ = k.off;
  cell_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int j = static_cast<int>(i);
    const double r = problem.grid.node(j);
    cell_[i] = cell_weight(problem.grid, problem.geometry, j);
    const double bp = problem.lambda + problem.potentials.p.value(r);
    const double bq = problem.lambda + problem.potentials.q.value(r);
    if (!(bp > 0.0) || !(bq > 0.0)) {
      throw Error(ErrorCode::NegativeBase, "lambda + P and lambda + Q must stay positive on the grid");
    }
    gu_diag_[i] += cell_[i] * bp;
    gv_diag_[i] += cell_[i] * bq;
  }
}

FieldPair WeightedMetric::gram(const FieldPair& x) const {
  const std::size_t n = cell_.size();
  FieldPair y = FieldPair::zeros(static_cast<int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double su = gu_diag_[i] * x.u[i];
    double sv = gv_diag_[i] * x.v[i];
    if (i > 0) {
      su += g_off_[i - 1] * x.u[i - 1];
      sv += g_off_[i - 1] * x.v[i - 1];
    }
    if (i + 1 < n) {
      su += g_off_[i] * x.u[i + 1];
      sv += g_off_[i] * x.v[i + 1];
    }
    y.u[i] = su;
    y.v[i] = sv;
  }
  return y;
}

double WeightedMetric::inner(const FieldPair& x, const FieldPair& y) const { return dot(x, gram(y)); }

double WeightedMetric::norm(const FieldPair& x) const { return std::sqrt(std::max(0.0, inner(x, x))); }

FieldPair WeightedMetric::representer(const FieldPair& weak) const {
  return {solve_tridiagonal(gu_diag_, g_off_, weak.u), solve_tridiagonal(gv_diag_, g_off_, weak.v)};
}

FieldPair WeightedMetric::to_weak(const FieldPair& density) const {
  FieldPair out = density;
  for (std::size_t i = 0; i < cell_.size(); ++i) {
    out.u[i] *= cell_[i];
    out.v[i] *= cell_[i];
  }
  return out;
}

// ---------------------------------------------------------------------------

ReductionEngine::ReductionEngine(const Problem& problem, double r0)
    : problem_(problem), r0_(r0), metric_(problem) {
  if (!(r0 > 0.0) || !(r0 < problem.grid.r_max())) {
    std::ostringstream msg;
    msg << "r0=" << r0 << " must lie inside the grid (0, " << problem.grid.r_max() << ")";
    throw Error(ErrorCode::InvalidConfig, msg.str());
  }
  ansatz_ = build_ansatz(problem, r0);
  tangent_ = ansatz_tangent(problem, r0);
  tangent_sq_ = metric_.inner(tangent_, tangent_);
  if (!(tangent_sq_ > 0.0)) throw Error(ErrorCode::InvalidConfig, "tangent pair vanishes on the grid");
  jac_ = jacobian(problem, ansatz_);
  try {
    lu_.emplace(jac_.interleaved(problem.coupling.c_u, problem.coupling.c_v));
  } catch (const Error& e) {
    throw Error(ErrorCode::SingularOperator, std::string("linearization at the ansatz is singular: ") + e.what());
  }
  g_tangent_ = metric_.gram(tangent_);
  j_inv_g_tangent_ = solve_J(g_tangent_);
  schur_ = dot(g_tangent_, j_inv_g_tangent_);
  if (!(std::abs(schur_) > 0.0) || !std::isfinite(schur_)) {
    throw Error(ErrorCode::SingularOperator, "bordered system for the projected solve is singular");
  }
}

FieldPair ReductionEngine::solve_J(const FieldPair& weak) const {
  // J_w = C J with C the cell weights; solve (S^{-1} J S) y = S^{-1} C^{-1} b, z = S y.
  const double su = problem_.coupling.c_u;
  const double sv = problem_.coupling.c_v;
  const std::size_t n = weak.size();
  std::vector<double> rhs(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = cell_weight(problem_.grid, problem_.geometry, static_cast<int>(i));
    rhs[2 * i] = weak.u[i] / (c * su);
    rhs[2 * i + 1] = weak.v[i] / (c * sv);
  }
  lu_->solve_in_place(rhs);
  FieldPair z = FieldPair::zeros(static_cast<int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    z.u[i] = rhs[2 * i] * su;
    z.v[i] = rhs[2 * i + 1] * sv;
  }
  return z;
}

FieldPair ReductionEngine::source_weak(Source source) const {
  if (source == Source::Discrete) return metric_.to_weak(-1.0 * residual(problem_, ansatz_));
  const int n = problem_.grid.n;
  FieldPair density = FieldPair::zeros(n);
  const double p0 = problem_.potentials.p.value(r0_);
  const double q0 = problem_.potentials.q.value(r0_);
  const bool radial = problem_.geometry == Geometry::Radial;
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double r = problem_.grid.node(i);
    density.u[k] = (p0 - problem_.potentials.p.value(r)) * ansatz_.u[k] + (radial ? tangent_.u[k] / r : 0.0);
    density.v[k] = (q0 - problem_.potentials.q.value(r)) * ansatz_.v[k] + (radial ? tangent_.v[k] / r : 0.0);
  }
  return metric_.to_weak(density);
}

FieldPair ReductionEngine::compute_l(Source source) const { return metric_.representer(source_weak(source)); }

FieldPair ReductionEngine::apply_L(const FieldPair& x) const {
  return metric_.representer(metric_.to_weak(jac_.apply(x)));
}

FieldPair ReductionEngine::project_E(const FieldPair& x) const {
  const double c = metric_.inner(x, tangent_) / tangent_sq_;
  return x - c * tangent_;
}

FieldPair ReductionEngine::remainder_density(const FieldPair& w) const {
  const auto& cp = problem_.coupling;
  FieldPair out = FieldPair::zeros(problem_.grid.n);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double a = w.u[i], b = w.v[i];
    const double u = ansatz_.u[i], v = ansatz_.v[i];
    out.u[i] = cp.alpha * (a * a * a + 3.0 * u * a * a) + cp.beta * (a * b * b + u * b * b + 2.0 * v * a * b);
    out.v[i] = cp.gamma * (b * b * b + 3.0 * v * b * b) + cp.beta * (b * a * a + v * a * a + 2.0 * u * a * b);
  }
  return out;
}

FieldPair ReductionEngine::compute_R(const FieldPair& omega) const {
  return metric_.representer(metric_.to_weak(remainder_density(omega)));
}

FieldPair ReductionEngine::solve_projected_weak(const FieldPair& weak) const {
  // J_w z = b + c G t with t^T G z = 0.
  const FieldPair base = solve_J(weak);
  const double c = -dot(g_tangent_, base) / schur_;
  return base + c * j_inv_g_tangent_;
}

FieldPair ReductionEngine::solve_projected(const FieldPair& y) const { return solve_projected_weak(metric_.gram(y)); }

CoercivityEstimate ReductionEngine::coercivity_estimate(int max_iter, double rtol) const {
  std::mt19937 rng(20240611u);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  FieldPair z = FieldPair::zeros(problem_.grid.n);
  for (std::size_t i = 0; i < z.size(); ++i) {
    z.u[i] = dist(rng) * problem_.coupling.c_u;
    z.v[i] = dist(rng) * problem_.coupling.c_v;
  }
  z = project_E(z);
  z = (1.0 / metric_.norm(z)) * z;

  CoercivityEstimate est;
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= max_iter; ++it) {
    FieldPair next = solve_projected_weak(metric_.gram(z));
    const double nn = metric_.norm(next);
    if (!std::isfinite(nn) || nn == 0.0) {
      throw Error(ErrorCode::SingularOperator, "inverse iteration produced a non-finite iterate");
    }
    z = (1.0 / nn) * next;
    const FieldPair jz = metric_.to_weak(jac_.apply(z));
    const double mu = dot(z, jz);  // z is unit in the metric
    est.iterations = it;
    est.rayleigh = mu;
    if (std::isfinite(previous) && std::abs(mu - previous) <= rtol * std::abs(mu)) {
      est.converged = true;
      break;
    }
    previous = mu;
  }
  est.rho_hat = std::abs(est.rayleigh);
  if (!(est.rho_hat > 1e-8)) {
    std::ostringstream msg;
    msg << "projected linearization has a numerically zero eigenvalue (" << est.rayleigh << ")";
    throw Error(ErrorCode::SingularOperator, msg.str());
  }
  return est;
}

FieldPair ReductionEngine::contraction_solve(double tol, ContractionReport* report, Source source_kind,
                                             int max_iter) const {
  const FieldPair source = source_weak(source_kind);

  // Steps below this are rounding noise in A + omega.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * metric_.norm(ansatz_);
  ContractionReport local;
  local.l_norm = metric_.norm(metric_.representer(source));
  FieldPair omega = FieldPair::zeros(problem_.grid.n);
  double last_step = std::numeric_limits<double>::quiet_NaN();
  int over = 0;
  for (int k = 1; k <= max_iter; ++k) {
    const FieldPair next = solve_projected_weak(source + metric_.to_weak(remainder_density(omega)));
    if (!next.finite()) throw Error(ErrorCode::ContractionFailed, "fixed-point iterate is not finite");
    const double step = metric_.norm(next - omega);
    const double size = metric_.norm(next);
    omega = next;
    local.iterations = k;
    local.omega_norms.push_back(size);
    if (std::isfinite(last_step)) {
      const double ratio = last_step > 0.0 ? step / last_step : 0.0;
      local.ratios.push_back(ratio);
      over = ratio > 0.9 ? over + 1 : 0;
      if (over >= 3) {
        if (report) *report = local;
        throw Error(ErrorCode::ContractionFailed, "successive-difference ratios above 0.9 for 3 steps");
      }
    }
    last_step = step;
    if (step <= tol * size || step <= floor) {
      if (report) *report = local;
      return omega;
    }
  }
  if (report) *report = local;
  std::ostringstream msg;
  msg << "no convergence in " << max_iter << " fixed-point steps";
  throw Error(ErrorCode::ContractionFailed, msg.str());
}

Multipliers ReductionEngine::multipliers(const FieldPair& fields) const {
  const FieldPair f = residual(problem_, fields);
  const auto du = node_derivative(fields.u, problem_.grid.h);
  const auto dv = node_derivative(fields.v, problem_.grid.h);
  const bool radial = problem_.geometry == Geometry::Radial;
  double nu = 0.0, du2 = 0.0, nv = 0.0, dv2 = 0.0, reduced = 0.0;
  for (int i = 0; i < problem_.grid.n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double c = cell_weight(problem_.grid, problem_.geometry, i);
    nu += c * f.u[k] * tangent_.u[k];
    du2 += c * tangent_.u[k] * tangent_.u[k];
    nv += c * f.v[k] * tangent_.v[k];
    dv2 += c * tangent_.v[k] * tangent_.v[k];
    reduced += c * (radial ? problem_.grid.node(i) : 1.0) * (f.u[k] * du[k] + f.v[k] * dv[k]);
  }
  return {du2 > 0.0 ? nu / du2 : 0.0, dv2 > 0.0 ? nv / dv2 : 0.0, reduced};
}

// ---------------------------------------------------------------------------

ReducedEvaluation evaluate_reduced(const Problem& problem, double r0, double tol) {
  const ReductionEngine engine(problem, r0);
  ReducedEvaluation out;
  out.r0 = r0;
  out.omega = engine.contraction_solve(tol, &out.contraction);
  out.corrected = engine.multipliers(engine.ansatz() + out.omega);
  out.bare = engine.multipliers(engine.ansatz());
  return out;
}

ReducedEvaluation solve_reduced_for_r(const Problem& problem, Window bracket, double r_tol, double tol) {
  if (!(bracket.lo < bracket.hi) || !(r_tol > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "bracket must satisfy lo < hi and r_tol > 0");
  }
  ReducedEvaluation lo = evaluate_reduced(problem, bracket.lo, tol);
  ReducedEvaluation hi = evaluate_reduced(problem, bracket.hi, tol);
  if (lo.corrected.reduced_value == 0.0) return lo;
  if (hi.corrected.reduced_value == 0.0) return hi;
  if ((lo.corrected.reduced_value > 0.0) == (hi.corrected.reduced_value > 0.0)) {
    std::ostringstream msg;
    msg << "reduced equation has the same sign at r=" << bracket.lo << " (" << lo.corrected.reduced_value
        << ") and r=" << bracket.hi << " (" << hi.corrected.reduced_value << ")";
    throw Error(ErrorCode::NoSignChange, msg.str());
  }
  while (hi.r0 - lo.r0 > r_tol) {
    const double mid = 0.5 * (lo.r0 + hi.r0);
    if (mid <= lo.r0 || mid >= hi.r0) break;
    ReducedEvaluation m = evaluate_reduced(problem, mid, tol);
    if (m.corrected.reduced_value == 0.0) return m;
    if ((m.corrected.reduced_value > 0.0) == (lo.corrected.reduced_value > 0.0)) {
      lo = std::move(m);
    } else {
      hi = std::move(m);
    }
  }
  return std::abs(lo.corrected.reduced_value) <= std::abs(hi.corrected.reduced_value) ? lo : hi;
}

ReducedEvaluation locate_reduced_root(const Problem& problem, double guess, double step, double r_tol, double tol) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidConfig, "search step must be positive");
  const double r_min = problem.grid.node(0);
  const double r_max = problem.grid.r_max() - 15.0 / std::sqrt(problem.lambda);
  const ReducedEvaluation centre = evaluate_reduced(problem, guess, tol);
  if (centre.corrected.reduced_value == 0.0) return centre;
  const bool positive = centre.corrected.reduced_value > 0.0;
  for (double d = step; guess - d > r_min || guess + d < r_max; d *= 2.0) {
    for (double r : {guess - d, guess + d}) {
      if (r <= r_min || r >= r_max) continue;
      const ReducedEvaluation e = evaluate_reduced(problem, r, tol);
      if ((e.corrected.reduced_value > 0.0) != positive || e.corrected.reduced_value == 0.0) {
        return solve_reduced_for_r(problem, {std::min(r, guess), std::max(r, guess)}, r_tol, tol);
      }
    }
  }
  std::ostringstream msg;
  msg << "reduced equation keeps one sign around r=" << guess;
  throw Error(ErrorCode::NoSignChange, msg.str());
}

FieldPair corrected_ansatz(const Problem& problem, double r0, double tol) {
  const ReductionEngine engine(problem, r0);
  return engine.ansatz() + engine.contraction_solve(tol);
}

double align_r0(const Problem& problem, const FieldPair& fields, double guess) {
  const WeightedMetric metric(problem);
  auto g = [&](double r0) {
    const FieldPair t = ansatz_tangent(problem, r0);
    return metric.inner(fields - build_ansatz(problem, r0), t) / metric.norm(t);
  };
  const double width = 1.0 / std::sqrt(problem.lambda);
  double a = guess - 0.25 * width, b = guess + 0.25 * width;
  double ga = g(a), gb = g(b);
  for (int k = 0; k < 8 && (ga > 0.0) == (gb > 0.0); ++k) {
    a -= 0.25 * width;
    b += 0.25 * width;
    ga = g(a);
    gb = g(b);
  }
  if ((ga > 0.0) == (gb > 0.0)) {
    throw Error(ErrorCode::NoSignChange, "no translation alignment found near the guessed radius");
  }
  // Illinois false position, falling back to bisection when it stalls.
  int side = 0;
  for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, guess); ++it) {
    double c = (a * gb - b * ga) / (gb - ga);
    if (!(c > a && c < b)) c = 0.5 * (a + b);
    const double gc = g(c);
    if (gc == 0.0) return c;
    if ((gc > 0.0) == (ga > 0.0)) {
      a = c;
      ga = gc;
      if (side == -1) gb *= 0.5;
      side = -1;
    } else {
      b = c;
      gb = gc;
      if (side == 1) ga *= 0.5;
      side = 1;
    }
  }
  return 0.5 * (a + b);
}

ReductionReport reduction_report(const Problem& problem, double r0, double tol) {
  const ReductionEngine engine(problem, r0);
  ReductionReport rep;
  rep.lambda = problem.lambda;
  rep.r0 = r0;
  rep.l_norm = engine.metric().norm(engine.compute_l(Source::Functional));
  rep.l_discrete_norm = engine.metric().norm(engine.compute_l(Source::Discrete));
  const CoercivityEstimate est = engine.coercivity_estimate();
  rep.rho_hat = est.rho_hat;
  rep.coercivity_iterations = est.iterations;
  ContractionReport cr;
  const FieldPair omega = engine.contraction_solve(tol, &cr);
  rep.omega_norms = cr.omega_norms;
  rep.contraction_ratios = cr.ratios;
  rep.corrected = engine.multipliers(engine.ansatz() + omega);
  rep.bare = engine.multipliers(engine.ansatz());
  return rep;
}

nlohmann::ordered_json to_json(const ReductionReport& r) {
  auto mult = [](const Multipliers& m) {
    return nlohmann::ordered_json{{"b1", m.b1}, {"b2", m.b2}, {"reduced_value", m.reduced_value}};
  };
  nlohmann::ordered_json j;
  j["lambda"] = r.lambda;
  j["r0"] = r.r0;
  j["l_norm"] = r.l_norm;
  j["l_discrete_norm"] = r.l_discrete_norm;
  j["omega_norm"] = r.omega_norms.empty() ? 0.0 : r.omega_norms.back();
  j["omega_norms"] = r.omega_norms;
  j["contraction_ratios"] = r.contraction_ratios;
  j["rho_hat"] = r.rho_hat;
  j["coercivity_iterations"] = r.coercivity_iterations;
  j["corrected"] = mult(r.corrected);
  j["bare_ansatz"] = mult(r.bare);
  return j;
}

}  // namespace ringbec
