#include "ringbec/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ringbec/error.hpp"

namespace ringbec {

bool FieldPair::finite() const {
  auto ok = [](const std::vector<double>& x) {
    return std::all_of(x.begin(), x.end(), [](double a) { return std::isfinite(a); });
  };
  return ok(u) && ok(v);
}

FieldPair operator+(const FieldPair& a, const FieldPair& b) {
  FieldPair out = a;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.u[i] += b.u[i];
    out.v[i] += b.v[i];
  }
  return out;
}

FieldPair operator-(const FieldPair& a, const FieldPair& b) {
  FieldPair out = a;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.u[i] -= b.u[i];
    out.v[i] -= b.v[i];
  }
  return out;
}

FieldPair operator*(double s, const FieldPair& a) {
  FieldPair out = a;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.u[i] *= s;
    out.v[i] *= s;
  }
  return out;
}

namespace {

struct Scales {
  double p;  // sqrt(lambda + P(r0))
  double q;
};

Scales ansatz_scales(const Problem& pb, double r0) {
  const double bp = pb.lambda + pb.potentials.p.value(r0);
  const double bq = pb.lambda + pb.potentials.q.value(r0);
  if (!(bp > 0.0) || !(bq > 0.0)) {
    std::ostringstream msg;
    msg << "lambda + P(r0) and lambda + Q(r0) must be positive at r0=" << r0;
    throw Error(ErrorCode::NegativeBase, msg.str());
  }
  return {std::sqrt(bp), std::sqrt(bq)};
}

}  // namespace

FieldPair build_ansatz(const Problem& pb, double r0) {
  const Scales s = ansatz_scales(pb, r0);
  FieldPair out = FieldPair::zeros(pb.grid.n);
  for (int i = 0; i < pb.grid.n; ++i) {
    const double r = pb.grid.node(i);
    const auto k = static_cast<std::size_t>(i);
    out.u[k] = s.p * pb.coupling.c_u * line_soliton(s.p * (r - r0));
    out.v[k] = s.q * pb.coupling.c_v * line_soliton(s.q * (r - r0));
  }
  return out;
}

FieldPair ansatz_tangent(const Problem& pb, double r0) {
  const Scales s = ansatz_scales(pb, r0);
  FieldPair out = FieldPair::zeros(pb.grid.n);
  for (int i = 0; i < pb.grid.n; ++i) {
    const double r = pb.grid.node(i);
    const auto k = static_cast<std::size_t>(i);
    out.u[k] = s.p * s.p * pb.coupling.c_u * line_soliton_derivative(s.p * (r - r0));
    out.v[k] = s.q * s.q * pb.coupling.c_v * line_soliton_derivative(s.q * (r - r0));
  }
  return out;
}

FieldPair residual(const Problem& pb, const FieldPair& x) {
  const Stiffness k = build_stiffness(pb.grid, pb.geometry);
  const auto ku = apply_stiffness(k, x.u);
  const auto kv = apply_stiffness(k, x.v);
  const auto& c = pb.coupling;
  FieldPair f = FieldPair::zeros(pb.grid.n);
  for (int i = 0; i < pb.grid.n; ++i) {
    const auto j = static_cast<std::size_t>(i);
    const double r = pb.grid.node(i);
    const double m = cell_weight(pb.grid, pb.geometry, i);
    const double u = x.u[j];
    const double v = x.v[j];
    f.u[j] = ku[j] / m + (pb.lambda + pb.potentials.p.value(r)) * u - c.alpha * u * u * u - c.beta * u * v * v;
    f.v[j] = kv[j] / m + (pb.lambda + pb.potentials.q.value(r)) * v - c.gamma * v * v * v - c.beta * u * u * v;
  }
  return f;
}

BlockJacobian jacobian(const Problem& pb, const FieldPair& x) {
  const Stiffness k = build_stiffness(pb.grid, pb.geometry);
  const auto n = static_cast<std::size_t>(pb.grid.n);
  const auto& c = pb.coupling;
  BlockJacobian j;
  j.uu_sub.assign(n, 0.0);
  j.uu_diag.assign(n, 0.0);
  j.uu_sup.assign(n, 0.0);
  j.uv.assign(n, 0.0);
  j.vu.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = pb.grid.node(static_cast<int>(i));
    const double m = cell_weight(pb.grid, pb.geometry, static_cast<int>(i));
    const double u = x.u[i];
    const double v = x.v[i];
    if (i > 0) j.uu_sub[i] = k.off[i - 1] / m;
    if (i + 1 < n) j.uu_sup[i] = k.off[i] / m;
    j.uu_diag[i] = k.diag[i] / m + pb.lambda + pb.potentials.p.value(r) - 3.0 * c.alpha * u * u - c.beta * v * v;
    j.uv[i] = -2.0 * c.beta * u * v;
    j.vu[i] = -2.0 * c.beta * u * v;
  }
  j.vv_sub = j.uu_sub;
  j.vv_sup = j.uu_sup;
  j.vv_diag.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = pb.grid.node(static_cast<int>(i));
    const double m = cell_weight(pb.grid, pb.geometry, static_cast<int>(i));
    const double u = x.u[i];
    const double v = x.v[i];
    j.vv_diag[i] = k.diag[i] / m + pb.lambda + pb.potentials.q.value(r) - 3.0 * c.gamma * v * v - c.beta * u * u;
  }
  return j;
}

FieldPair BlockJacobian::apply(const FieldPair& x) const {
  const std::size_t n = uu_diag.size();
  FieldPair y = FieldPair::zeros(static_cast<int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double su = uu_diag[i] * x.u[i] + uv[i] * x.v[i];
    double sv = vv_diag[i] * x.v[i] + vu[i] * x.u[i];
    if (i > 0) {
      su += uu_sub[i] * x.u[i - 1];
      sv += vv_sub[i] * x.v[i - 1];
    }
    if (i + 1 < n) {
      su += uu_sup[i] * x.u[i + 1];
      sv += vv_sup[i] * x.v[i + 1];
    }
    y.u[i] = su;
    y.v[i] = sv;
  }
  return y;
}

BandedMatrix BlockJacobian::interleaved(double scale_u, double scale_v) const {
  const int n = static_cast<int>(uu_diag.size());
  BandedMatrix m(2 * n, 2, 2);
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const int a = 2 * i;
    const int b = 2 * i + 1;
    m.at(a, a) = uu_diag[k];
    m.at(b, b) = vv_diag[k];
    m.at(a, b) = uv[k] * scale_v / scale_u;
    m.at(b, a) = vu[k] * scale_u / scale_v;
    if (i > 0) {
      m.at(a, a - 2) = uu_sub[k];
      m.at(b, b - 2) = vv_sub[k];
    }
    if (i + 1 < n) {
      m.at(a, a + 2) = uu_sup[k];
      m.at(b, b + 2) = vv_sup[k];
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

namespace {

double scaled_norm(const FieldPair& x, double su, double sv) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += (x.u[i] / su) * (x.u[i] / su) + (x.v[i] / sv) * (x.v[i] / sv);
  }
  return std::sqrt(s);
}

}  // namespace

double relative_residual(const Problem& pb, const FieldPair& x) {
  const FieldPair f = residual(pb, x);
  const double fn = scaled_norm(f, pb.coupling.c_u, pb.coupling.c_v);
  const double xn = scaled_norm(x, pb.coupling.c_u, pb.coupling.c_v);
  if (xn == 0.0) return fn == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return fn / (pb.lambda * xn);
}

SolutionBundle newton_solve(const Problem& pb, FieldPair x, const SolveConfig& cfg) {
  if (x.size() != static_cast<std::size_t>(pb.grid.n) || !x.finite()) {
    throw Error(ErrorCode::InvalidConfig, "initial fields must be finite and match the grid");
  }
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1) throw Error(ErrorCode::InvalidConfig, "tol > 0 and max_iter >= 1 required");
  const double su = cfg.rescale ? pb.coupling.c_u : 1.0;
  const double sv = cfg.rescale ? pb.coupling.c_v : 1.0;
  const double mu = pb.coupling.c_u;  // merit-function scales, independent of the rescale flag
  const double mv = pb.coupling.c_v;

  SolutionBundle out;
  out.problem = pb;
  FieldPair f = residual(pb, x);
  double fnorm = scaled_norm(f, mu, mv);
  auto rel = [&](double fn, const FieldPair& at) {
    const double xn = scaled_norm(at, mu, mv);
    if (xn == 0.0) return fn == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return fn / (pb.lambda * xn);
  };
  double current = rel(fnorm, x);
  out.residual_history.push_back(current);

  // Watchdog line search: up to `kWatchdog` full Newton steps may pass without
  // the Armijo decrease relative to the reference point (ring translations make
  // |F| rise before it falls). If none achieves it, the iteration returns to the
  // reference point and backtracks monotonically from there.
  constexpr int kWatchdog = 4;
  FieldPair x_ref = x;
  FieldPair f_ref = f;
  double fnorm_ref = fnorm;
  int relaxed = 0;

  auto newton_direction = [&](const FieldPair& at, const FieldPair& f_at) {
    const BlockJacobian jac = jacobian(pb, at);
    const BandedLU lu(jac.interleaved(su, sv), cfg.pivot_threshold);
    std::vector<double> rhs(2 * at.size());
    for (std::size_t i = 0; i < at.size(); ++i) {
      rhs[2 * i] = -f_at.u[i] / su;
      rhs[2 * i + 1] = -f_at.v[i] / sv;
    }
    lu.solve_in_place(rhs);
    FieldPair dx = FieldPair::zeros(pb.grid.n);
    for (std::size_t i = 0; i < at.size(); ++i) {
      dx.u[i] = rhs[2 * i] * su;
      dx.v[i] = rhs[2 * i + 1] * sv;
    }
    return dx;
  };
  auto sufficient = [&](double trial, double reference, double t) {
    return std::isfinite(trial) && trial * trial <= (1.0 - 2.0 * cfg.armijo_slope * t) * reference * reference;
  };

  int it = 0;
  while (current > cfg.tol) {
    if (it == cfg.max_iter) {
      std::ostringstream msg;
      msg << "max_iter=" << cfg.max_iter << " reached at lambda=" << pb.lambda << ", relative residual " << current;
      throw Error(ErrorCode::NewtonDiverged, msg.str());
    }
    ++it;

    if (relaxed < kWatchdog) {
      const FieldPair dx = newton_direction(x, f);
      FieldPair trial = x + dx;
      FieldPair ft = residual(pb, trial);
      const double ftn = scaled_norm(ft, mu, mv);
      if (std::isfinite(ftn) && trial.finite()) {
        x = std::move(trial);
        f = std::move(ft);
        fnorm = ftn;
        if (sufficient(ftn, fnorm_ref, 1.0)) {
          x_ref = x;
          f_ref = f;
          fnorm_ref = fnorm;
          relaxed = 0;
        } else {
          ++relaxed;
        }
        current = rel(fnorm, x);
        out.residual_history.push_back(current);
        continue;
      }
    }

    // Monotone backtracking from the reference point.
    x = x_ref;
    f = f_ref;
    fnorm = fnorm_ref;
    const FieldPair dx = newton_direction(x, f);
    double t = cfg.backtrack;  // the full step from here already failed the watchdog
    while (true) {
      FieldPair trial = x + t * dx;
      FieldPair ft = residual(pb, trial);
      const double ftn = scaled_norm(ft, mu, mv);
      if (sufficient(ftn, fnorm, t)) {
        x = std::move(trial);
        f = std::move(ft);
        fnorm = ftn;
        break;
      }
      t *= cfg.backtrack;
      if (t < cfg.min_step) {
        std::ostringstream msg;
        msg << "line search collapsed at lambda=" << pb.lambda << ", relative residual " << rel(fnorm, x);
        throw Error(ErrorCode::NewtonDiverged, msg.str());
      }
    }
    x_ref = x;
    f_ref = f;
    fnorm_ref = fnorm;
    relaxed = 0;
    current = rel(fnorm, x);
    out.residual_history.push_back(current);
  }

  out.iterations = it;
  out.residual = current;
  out.trivial = std::all_of(x.u.begin(), x.u.end(), [](double a) { return a == 0.0; }) &&
                std::all_of(x.v.begin(), x.v.end(), [](double a) { return a == 0.0; });
  out.mass = field_mass(x, pb.grid, pb.geometry);
  if (!out.trivial) {
    out.positive = std::all_of(x.u.begin(), x.u.end(), [](double a) { return a >= 0.0; }) &&
                   std::all_of(x.v.begin(), x.v.end(), [](double a) { return a >= 0.0; });
    try {
      out.r_peak = peak_location(x, pb.grid);
      out.interior_peak = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BoundaryPeak) throw;
      const auto top = std::max_element(x.u.begin(), x.u.end()) - x.u.begin();
      out.r_peak = pb.grid.node(static_cast<int>(top));
    }
  }
  out.fields = std::move(x);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double interpolated_peak(const std::vector<double>& f, const RadialGrid& grid, const char* name) {
  const auto top = static_cast<int>(std::max_element(f.begin(), f.end()) - f.begin());
  if (top == 0 || top == grid.n - 1) {
    throw Error(ErrorCode::BoundaryPeak, std::string(name) + " attains its maximum at a boundary node");
  }
  const auto k = static_cast<std::size_t>(top);
  const double fm = f[k - 1], f0 = f[k], fp = f[k + 1];
  const double curvature = fm - 2.0 * f0 + fp;
  const double offset = curvature != 0.0 ? 0.5 * (fm - fp) / curvature : 0.0;
  return grid.node(top) + offset * grid.h;
}

}  // namespace

PeakPair peak_locations(const FieldPair& fields, const RadialGrid& grid) {
  return {interpolated_peak(fields.u, grid, "u"), interpolated_peak(fields.v, grid, "v")};
}

double peak_location(const FieldPair& fields, const RadialGrid& grid) {
  const PeakPair p = peak_locations(fields, grid);
  if (std::abs(p.u - p.v) > grid.h) {
    std::ostringstream msg;
    msg << "u peak " << p.u << " and v peak " << p.v << " differ by more than h=" << grid.h;
    throw Error(ErrorCode::PeakMismatch, msg.str());
  }
  return p.u;
}

double field_mass(const FieldPair& x, const RadialGrid& grid, Geometry geometry) {
  double s = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    s += cell_weight(grid, geometry, i) * (x.u[k] * x.u[k] + x.v[k] * x.v[k]);
  }
  return geometry == Geometry::Radial ? 2.0 * std::numbers::pi * s : 2.0 * s;
}

}  // namespace ringbec
