#include "ringbec/normalizer.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ringbec/error.hpp"
#include "ringbec/reduction.hpp"

namespace ringbec {

double mass(const SolutionBundle& s) { return field_mass(s.fields, s.problem.grid, s.problem.geometry); }

TheoremBracket theorem_bracket(double epsilon, double theta, double a) {
  if (!(epsilon > 0.0) || !(theta > 0.0 && theta < 0.5) || !(a > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "theorem bracket needs epsilon > 0, theta in (0, 1/2), A > 0");
  }
  const double pi = std::numbers::pi;
  TheoremBracket b;
  b.lo = std::pow(8.0 * a * pi * epsilon, -1.0 / (1.5 + theta));
  b.hi = std::pow(4.0 * a * pi * epsilon, -1.0 / (1.5 - theta));
  b.asymptotic_valid = b.lo >= kMinSolverLambda && b.lo < b.hi;
  return b;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class MassProblem {
 public:
  MassProblem(const CouplingParams& c, const PotentialPair& pots, const NormalizerOptions& opt)
      : c_(c), pots_(pots), opt_(opt) {}

  Window window(double lambda) const {
    return opt_.radius_window ? *opt_.radius_window : Window{opt_.window.c1 * lambda, opt_.window.c2 * lambda};
  }

  std::vector<CriticalPoint> critical_points(double lambda) const {
    try {
      return find_critical_points(pots_, c_, lambda, window(lambda));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoCriticalPoint) throw;
      return {};
    }
  }

  static double nearest(const std::vector<CriticalPoint>& cps, double target) {
    double best = kNaN;
    for (const auto& p : cps) {
      if (std::isnan(best) || std::abs(p.y - target) < std::abs(best - target)) best = p.y;
    }
    return best;
  }

  struct Eval {
    double lambda = 0.0;
    double y = 0.0;
    double g = 0.0;
    SolutionBundle bundle;
  };

  /// mass - 1 at lambda on `grid`, following the branch through y_ref.
  Eval evaluate(double lambda, double y_ref, const RadialGrid& grid, const FieldPair* warm) {
    ++evaluations;
    Eval e;
    e.lambda = lambda;
    e.y = nearest(critical_points(lambda), y_ref);
    if (std::isnan(e.y)) throw Error(ErrorCode::NoBracket, "concentration branch lost inside a scan segment");
    const Problem pb{c_, pots_, lambda, grid, Geometry::Radial};
    SolveConfig cfg;
    cfg.tol = 1e-12;
    bool done = false;
    if (warm) {
      try {
        e.bundle = newton_solve(pb, *warm, cfg);
        done = e.bundle.interior_peak && std::abs(e.bundle.r_peak - e.y) < 0.5;
      } catch (const Error& err) {
        if (err.code() != ErrorCode::NewtonDiverged && err.code() != ErrorCode::SingularJacobian) throw;
      }
    }
    if (!done) e.bundle = newton_solve(pb, corrected_ansatz(pb, e.y), cfg);
    e.g = mass(e.bundle) - 1.0;
    return e;
  }

  int evaluations = 0;

 private:
  CouplingParams c_;
  PotentialPair pots_;
  NormalizerOptions opt_;
};

struct Segment {
  double lo = 0.0, hi = 0.0;
  double y_lo = 0.0, y_hi = 0.0, y_max = 0.0;
};

std::vector<Segment> branch_segments(MassProblem& mp, double lo, double hi, double step) {
  const auto cells = static_cast<long>(std::ceil((hi - lo) / step));
  std::vector<Segment> out;
  double prev_y = kNaN;
  for (long k = 0; k <= cells; ++k) {
    const double lambda = k == cells ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(cells);
    const auto cps = mp.critical_points(lambda);
    const double y = MassProblem::nearest(cps, lambda);
    if (std::isnan(y)) {
      prev_y = kNaN;
      continue;
    }
    const bool continues = !std::isnan(prev_y) && !out.empty() && MassProblem::nearest(cps, prev_y) == y;
    if (continues) {
      out.back().hi = lambda;
      out.back().y_hi = y;
      out.back().y_max = std::max(out.back().y_max, y);
    } else {
      out.push_back({lambda, lambda, y, y, y});
    }
    prev_y = y;
  }
  return out;
}

}  // namespace

NormalizedSolution solve_lambda_for_mass(const CouplingParams& c, const PotentialPair& pots,
                                         const NormalizerOptions& opt) {
  if (!(opt.mass_tol > 0.0) || !(opt.scan_step > 0.0) || !(opt.points_per_width > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "mass_tol, scan_step and points_per_width must be positive");
  }
  NormalizedSolution out;
  out.epsilon = c.epsilon;
  out.theta = opt.theta;
  out.bracket = theorem_bracket(c.epsilon, opt.theta, opt.profile_a);
  if (out.bracket.lo < kMinSolverLambda) {
    std::ostringstream msg;
    msg << "bracket lower end " << out.bracket.lo << " is below the solver minimum " << kMinSolverLambda
        << " (epsilon too large for the concentration regime)";
    throw Error(ErrorCode::InvalidConfig, msg.str());
  }

  MassProblem mp(c, pots, opt);
  struct Found {
    Segment seg;
    RadialGrid grid;
    MassProblem::Eval a, b;
  };
  std::optional<Found> first;
  bool any_branch = false;

  auto scan = [&](double lo, double hi, bool record_ends) {
    const auto segments = branch_segments(mp, lo, hi, opt.scan_step);
    any_branch = any_branch || !segments.empty();
    for (std::size_t k = 0; k < segments.size(); ++k) {
      const Segment& s = segments[k];
      GridOptions go;
      go.points_per_width = opt.points_per_width * std::sqrt(s.hi / s.lo);
      const RadialGrid grid = build_grid(s.lo, s.y_max, go);
      MassProblem::Eval a = mp.evaluate(s.lo, s.y_lo, grid, nullptr);
      MassProblem::Eval b = s.hi > s.lo ? mp.evaluate(s.hi, s.y_hi, grid, &a.bundle.fields) : a;
      if (record_ends && k == 0) out.g_lo = a.g;
      if (record_ends && k + 1 == segments.size()) out.g_hi = b.g;
      if ((a.g < 0.0) != (b.g < 0.0) || a.g == 0.0 || b.g == 0.0) {
        out.sign_changes.push_back({s.lo, s.hi});
        if (!first) first = Found{s, grid, std::move(a), std::move(b)};
      }
    }
  };

  scan(out.bracket.lo, out.bracket.hi, true);
  if (!first) {
    out.widened = true;
    scan(std::max(0.5 * out.bracket.lo, kMinSolverLambda), 2.0 * out.bracket.hi, false);
  }
  if (!first) {
    std::ostringstream msg;
    if (!any_branch) {
      msg << "no concentration radius (critical point of M) for any lambda in the bracket";
    } else {
      msg << "mass - 1 does not change sign on any branch segment in [" << 0.5 * out.bracket.lo << ", "
          << 2.0 * out.bracket.hi << "]";
    }
    throw Error(ErrorCode::NoBracket, msg.str());
  }

  // False position (Illinois) on the first sign-change segment.
  Found& f = *first;
  MassProblem::Eval a = std::move(f.a), b = std::move(f.b);
  MassProblem::Eval best = std::abs(a.g) <= std::abs(b.g) ? a : b;
  const double g_tol = 0.01 * opt.mass_tol;
  int side = 0;
  double ga = a.g, gb = b.g;
  for (int it = 0; it < 200 && std::abs(best.g) > g_tol && b.lambda - a.lambda > 1e-14 * b.lambda; ++it) {
    double lambda = (a.lambda * gb - b.lambda * ga) / (gb - ga);
    if (!(lambda > a.lambda && lambda < b.lambda)) lambda = 0.5 * (a.lambda + b.lambda);
    const double y_ref = f.seg.y_lo + (f.seg.y_hi - f.seg.y_lo) * (lambda - f.seg.lo) / std::max(f.seg.hi - f.seg.lo, 1e-300);
    MassProblem::Eval m = mp.evaluate(lambda, y_ref, f.grid, &best.bundle.fields);
    if (std::abs(m.g) < std::abs(best.g)) best = m;
    if ((m.g < 0.0) == (ga < 0.0)) {
      a = std::move(m);
      ga = a.g;
      if (side == -1) gb *= 0.5;
      side = -1;
    } else {
      b = std::move(m);
      gb = b.g;
      if (side == 1) ga *= 0.5;
      side = 1;
    }
  }

  out.lambda = best.lambda;
  out.y = best.y;
  out.bundle = std::move(best.bundle);
  out.in_bracket = out.lambda > out.bracket.lo && out.lambda < out.bracket.hi;
  out.peak_offset = std::abs(out.bundle.r_peak - out.y);
  const WeightedMetric metric(out.bundle.problem);
  out.omega_norm = metric.norm(out.bundle.fields - build_ansatz(out.bundle.problem, out.bundle.r_peak));
  out.evaluations = mp.evaluations;
  return out;
}

nlohmann::ordered_json to_json(const NormalizedSolution& s) {
  nlohmann::ordered_json j;
  j["lambda_eps"] = s.lambda;
  j["epsilon"] = s.epsilon;
  j["theta"] = s.theta;
  j["bracket"] = {{"lo", s.bracket.lo}, {"hi", s.bracket.hi}, {"asymptotic_valid", s.bracket.asymptotic_valid}};
  j["in_bracket"] = s.in_bracket;
  j["widened"] = s.widened;
  j["y"] = s.y;
  j["r_peak"] = s.bundle.r_peak;
  j["peak_offset"] = s.peak_offset;
  j["omega_norm"] = s.omega_norm;
  j["mass"] = s.bundle.mass;
  j["mass_error"] = std::abs(s.bundle.mass - 1.0);
  auto changes = nlohmann::ordered_json::array();
  for (const auto& w : s.sign_changes) changes.push_back({w.lo, w.hi});
  j["sign_changes"] = changes;
  j["g_at_bracket_lo"] = s.g_lo;
  j["g_at_bracket_hi"] = s.g_hi;
  j["evaluations"] = s.evaluations;
  return j;
}

}  // namespace ringbec
