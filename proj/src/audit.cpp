#include "ringbec/audit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ringbec/error.hpp"
#include "ringbec/landscape.hpp"
#include "ringbec/reduction.hpp"

namespace ringbec {

SolutionIntegrals solution_integrals(const SolutionBundle& s) {
  const Problem& pb = s.problem;
  const auto& c = pb.coupling;
  const auto du = node_derivative(s.fields.u, pb.grid.h);
  const auto dv = node_derivative(s.fields.v, pb.grid.h);
  SolutionIntegrals out;
  for (int i = 0; i < pb.grid.n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double r = pb.grid.node(i);
    const double w = cell_weight(pb.grid, pb.geometry, i);
    const double u2 = s.fields.u[k] * s.fields.u[k];
    const double v2 = s.fields.v[k] * s.fields.v[k];
    out.kinetic += w * (du[k] * du[k] + dv[k] * dv[k]);
    out.potential += w * ((pb.lambda + pb.potentials.p.value(r)) * u2 + (pb.lambda + pb.potentials.q.value(r)) * v2);
    out.quartic += w * (c.alpha * u2 * u2 + c.gamma * v2 * v2 + 2.0 * c.beta * u2 * v2);
    out.quartic_r_coupling += w * (c.alpha * u2 * u2 + c.gamma * v2 * v2 + 2.0 * c.beta * r * u2 * v2);
    out.moment += w * r * (pb.potentials.p.derivative(r) * u2 + pb.potentials.q.derivative(r) * v2);
    out.l2 += w * (u2 + v2);
  }
  return out;
}

namespace {

IdentityResidual relative_gap(double lhs, double rhs) {
  if (lhs == 0.0 && rhs == 0.0) return {0.0, true};
  const double scale = rhs != 0.0 ? std::abs(rhs) : std::abs(lhs);
  return {std::abs(lhs - rhs) / scale, false};
}

}  // namespace

IdentityResidual audit_identity1(const SolutionBundle& s) {
  const SolutionIntegrals q = solution_integrals(s);
  return relative_gap(q.kinetic + q.potential, q.quartic);
}

PohozaevResidual audit_poho2(const SolutionBundle& s) {
  const SolutionIntegrals q = solution_integrals(s);
  const double weight = s.problem.geometry == Geometry::Radial ? 1.0 : 0.5;
  const double lhs = 2.0 * q.kinetic - q.moment;
  const IdentityResidual derived = relative_gap(lhs, weight * q.quartic);
  PohozaevResidual out;
  out.residual = derived.residual;
  out.degenerate = derived.degenerate;
  out.printed_residual = s.problem.geometry == Geometry::Radial
                             ? relative_gap(lhs, q.quartic_r_coupling).residual
                             : derived.residual;
  return out;
}

std::vector<AsymptoticRatio> audit_asymptotics(const SolutionBundle& s, const ProfileConstants& k) {
  const Problem& pb = s.problem;
  const auto& c = pb.coupling;
  const double eps = c.epsilon;
  const double lam = pb.lambda;
  const double r = s.r_peak;
  const SolutionIntegrals q = solution_integrals(s);
  const double det = c.alpha * c.gamma - c.beta * c.beta;

  std::vector<AsymptoticRatio> out;
  auto add = [&](std::string name, std::string anchor, double measured, double predicted) {
    const double ratio = predicted != 0.0 ? measured / predicted : (measured == 0.0 ? 1.0 : 0.0);
    out.push_back({std::move(name), std::move(anchor), measured, predicted, ratio});
  };
  add("kinetic", "kinetic ~ eps A lambda^{3/2} r", q.kinetic, eps * k.a * std::pow(lam, 1.5) * r);
  add("quartic", "quartic ~ 4 eps A lambda^{3/2} r", q.quartic, 4.0 * eps * k.a * std::pow(lam, 1.5) * r);
  add("quartic_over_kinetic", "quartic / kinetic -> 4", q.kinetic != 0.0 ? q.quartic / q.kinetic : 0.0, 4.0);
  if (!pb.potentials.both_zero()) {
    const double slope = (c.gamma - c.beta) * pb.potentials.p.derivative(r) + (c.alpha - c.beta) * pb.potentials.q.derivative(r);
    add("moment", "potential moment ~ 3A [(gamma-beta)P' + (alpha-beta)Q'] lambda^{1/2} r^2 / det", q.moment,
        3.0 * k.a * slope * std::sqrt(lam) * r * r / det);
  }
  add("mass", "mass ~ 2 pi eps lambda^{1/2} r I2", s.mass, 2.0 * std::numbers::pi * eps * std::sqrt(lam) * r * k.i2);
  return out;
}

const AsymptoticRatio& find_ratio(const std::vector<AsymptoticRatio>& ratios, const std::string& name) {
  for (const auto& r : ratios) {
    if (r.name == name) return r;
  }
  throw Error(ErrorCode::InvalidConfig, "no asymptotic ratio named " + name);
}

ConcentrationCondition audit_concentration_condition(const SolutionBundle& s) {
  const Problem& pb = s.problem;
  const auto& c = pb.coupling;
  const double r = s.r_peak;
  ConcentrationCondition out;
  out.m_prime = eval_M_prime(pb.potentials, c, pb.lambda, r);
  out.combination = c.alpha + c.gamma - 2.0 * c.beta +
                    1.5 * ((c.gamma - c.beta) * pb.potentials.p.derivative(r) +
                           (c.alpha - c.beta) * pb.potentials.q.derivative(r)) * r / pb.lambda;
  out.no_critical_point = pb.potentials.both_zero() ||
                          count_branches(pb.potentials, c, pb.lambda, Window{0.6 * pb.lambda, 1.5 * pb.lambda}) == 0;
  return out;
}

namespace {

struct TailFit {
  double eta = 0.0;
  int samples = 0;
};

TailFit fit_tail(const std::vector<double>& f, const SolutionBundle& s) {
  const RadialGrid& g = s.problem.grid;
  const double sl = std::sqrt(s.problem.lambda);
  const double peak = *std::max_element(f.begin(), f.end());
  TailFit out;
  if (!(peak > 0.0)) return out;
  const double lo = 1e-8 * peak;
  const double hi = 1e-2 * peak;
  const double r_cut = g.r_max() - 3.0 / sl;  // the Dirichlet closure bends the last few widths
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double r = g.node(i);
    const double val = f[static_cast<std::size_t>(i)];
    if (r > r_cut || !(val >= lo && val <= hi)) continue;
    const double x = sl * std::abs(r - s.r_peak);
    const double y = std::log(val);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++out.samples;
  }
  if (out.samples < 10) return out;
  const double n = out.samples;
  const double den = n * sxx - sx * sx;
  if (den <= 0.0) {
    out.samples = 0;
    return out;
  }
  out.eta = -(n * sxy - sx * sy) / den;
  return out;
}

}  // namespace

DecayFit audit_decay(const SolutionBundle& s) {
  const TailFit fu = fit_tail(s.fields.u, s);
  const TailFit fv = fit_tail(s.fields.v, s);
  if (fu.samples < 10 || fv.samples < 10) {
    std::ostringstream msg;
    msg << "tail fit needs 10 samples per component, got " << fu.samples << " (u) and " << fv.samples << " (v)";
    throw Error(ErrorCode::InsufficientTail, msg.str());
  }
  return {fu.eta, fv.eta, std::min(fu.eta, fv.eta), fu.samples, fv.samples};
}

AuditReport audit_solution(const SolutionBundle& s, const ProfileConstants& constants) {
  AuditReport rep;
  rep.identity1 = audit_identity1(s);
  rep.poho2 = audit_poho2(s);
  if (s.problem.geometry == Geometry::Radial && !s.trivial) rep.ratios = audit_asymptotics(s, constants);
  rep.concentration = audit_concentration_condition(s);
  try {
    rep.decay = audit_decay(s);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientTail) throw;
  }
  return rep;
}

nlohmann::ordered_json to_json(const AuditReport& r) {
  nlohmann::ordered_json j;
  j["identity1"] = {{"anchor", "energy identity"}, {"residual", r.identity1.residual},
                    {"degenerate", r.identity1.degenerate}};
  j["poho2"] = {{"anchor", "pohozaev balance"},
                {"residual", r.poho2.residual},
                {"printed_form_residual", r.poho2.printed_residual},
                {"degenerate", r.poho2.degenerate}};
  auto ratios = nlohmann::ordered_json::array();
  for (const auto& a : r.ratios) {
    ratios.push_back({{"name", a.name}, {"anchor", a.anchor}, {"measured", a.measured},
                      {"predicted", a.predicted}, {"ratio", a.ratio}});
  }
  j["asymptotics"] = ratios;
  j["concentration"] = {{"anchor", "M'(r_peak) -> 0"},
                        {"m_prime", r.concentration.m_prime},
                        {"combination", r.concentration.combination},
                        {"no_critical_point", r.concentration.no_critical_point}};
  if (r.decay) {
    j["decay"] = {{"anchor", "exponential decay away from the ring"},
                  {"eta_u", r.decay->eta_u},
                  {"eta_v", r.decay->eta_v},
                  {"eta", r.decay->eta},
                  {"samples_u", r.decay->samples_u},
                  {"samples_v", r.decay->samples_v}};
  } else {
    j["decay"] = nullptr;
  }
  return j;
}

// ---------------------------------------------------------------------------

const RefinementQuantity& RefinementTable::at(const std::string& name) const {
  for (const auto& q : quantities) {
    if (q.name == name) return q;
  }
  throw Error(ErrorCode::InvalidConfig, "no refinement quantity named " + name);
}

void compute_orders(RefinementTable& t) {
  for (auto& q : t.quantities) {
    q.orders.clear();
    if (q.tends_to_zero) {
      for (std::size_t k = 0; k + 1 < q.values.size(); ++k) {
        q.orders.push_back(std::log(std::abs(q.values[k] / q.values[k + 1])) / std::log(t.h[k] / t.h[k + 1]));
      }
    } else {
      for (std::size_t k = 0; k + 2 < q.values.size(); ++k) {
        const double d1 = std::abs(q.values[k] - q.values[k + 1]);
        const double d2 = std::abs(q.values[k + 1] - q.values[k + 2]);
        q.orders.push_back(std::log(d1 / d2) / std::log(t.h[k] / t.h[k + 1]));
      }
    }
  }
}

RefinementTable refinement_study(const RefinementCase& rc) {
  if (rc.points_per_width.size() < 3) throw Error(ErrorCode::InvalidConfig, "refinement needs at least 3 levels");
  const bool constant_line = rc.geometry == Geometry::Line && rc.potentials.both_zero();
  RefinementTable t;
  RefinementQuantity id1{"identity1", true, {}, {}};
  RefinementQuantity poho{"poho2", true, {}, {}};
  RefinementQuantity mass{"mass", false, {}, {}};
  RefinementQuantity ansatz_res{"ansatz_residual", true, {}, {}};
  SolveConfig cfg;
  cfg.tol = 1e-11;
  for (double ppw : rc.points_per_width) {
    GridOptions go;
    go.points_per_width = ppw;
    go.pad = rc.pad;
    Problem pb{rc.coupling, rc.potentials, rc.lambda, build_grid(rc.lambda, rc.r0, go), rc.geometry};
    const FieldPair start = rc.geometry == Geometry::Radial ? corrected_ansatz(pb, rc.r0) : build_ansatz(pb, rc.r0);
    const SolutionBundle s = newton_solve(pb, start, cfg);
    t.h.push_back(pb.grid.h);
    id1.values.push_back(audit_identity1(s).residual);
    poho.values.push_back(audit_poho2(s).residual);
    mass.values.push_back(s.mass);
    if (constant_line) {
      const FieldPair a = build_ansatz(pb, rc.r0);
      const FieldPair f = residual(pb, a);
      double fmax = 0.0, amax = 0.0;
      for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        fmax = std::max({fmax, std::abs(f.u[i]), std::abs(f.v[i])});
        amax = std::max({amax, std::abs(a.u[i]), std::abs(a.v[i])});
      }
      ansatz_res.values.push_back(fmax / (rc.lambda * amax));
    }
  }
  t.quantities = {id1, poho, mass};
  if (constant_line) t.quantities.push_back(ansatz_res);
  compute_orders(t);
  return t;
}

nlohmann::ordered_json to_json(const RefinementTable& t) {
  nlohmann::ordered_json j;
  j["h"] = t.h;
  auto qs = nlohmann::ordered_json::array();
  for (const auto& q : t.quantities) {
    qs.push_back({{"name", q.name}, {"values", q.values}, {"orders", q.orders}});
  }
  j["quantities"] = qs;
  return j;
}

}  // namespace ringbec
