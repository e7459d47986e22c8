#include "ringbec/profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "ringbec/error.hpp"

namespace ringbec {

CouplingParams validate_coupling(double alpha, double gamma, double beta) {
  if (!std::isfinite(alpha) || !std::isfinite(gamma) || !std::isfinite(beta)) {
    throw Error(ErrorCode::InvalidConfig, "coupling parameters must be finite");
  }
  if (alpha <= 0.0 || gamma <= 0.0) {
    std::ostringstream msg;
    msg << "alpha and gamma must be positive (alpha=" << alpha << ", gamma=" << gamma << ")";
    throw Error(ErrorCode::NonPositive, msg.str());
  }
  const double lo = std::min(alpha, gamma);
  const double hi = std::max(alpha, gamma);
  const double attractive_floor = -std::sqrt(alpha * gamma);
  const bool admissible = (beta > attractive_floor && beta < lo) || beta > hi;
  if (!admissible) {
    std::ostringstream msg;
    msg << "beta=" << beta << " outside (" << attractive_floor << ", " << lo << ") U (" << hi
        << ", inf)";
    throw Error(ErrorCode::InadmissibleBeta, msg.str());
  }
  const double det = alpha * gamma - beta * beta;
  CouplingParams c;
  c.alpha = alpha;
  c.gamma = gamma;
  c.beta = beta;
  c.c_u = std::sqrt((gamma - beta) / det);
  c.c_v = std::sqrt((alpha - beta) / det);
  c.epsilon = (alpha + gamma - 2.0 * beta) / det;
  return c;
}

CouplingParams coupling_for_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "target epsilon must lie in (0, 1)");
  }
  return validate_coupling(1.0, 1.0, 2.0 / epsilon - 1.0);
}

double line_soliton(double t) { return std::sqrt(2.0) / std::cosh(t); }

double line_soliton_derivative(double t) {
  return -std::sqrt(2.0) * std::tanh(t) / std::cosh(t);
}

// ---------------------------------------------------------------------------

ScalarProfile::ScalarProfile(double step, std::vector<double> w, std::vector<double> dw,
                             double decay_rate)
    : step_(step), w_(std::move(w)), dw_(std::move(dw)), decay_rate_(decay_rate) {}

namespace {

struct Hermite {
  double value;
  double slope;
};

Hermite hermite(double h, double y0, double d0, double y1, double d1, double s) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  const double value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
  const double slope = ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * h * d0 +
                        (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * h * d1) /
                       h;
  return {value, slope};
}

}  // namespace

double ScalarProfile::value(double r) const {
  const double x = std::abs(r);
  const double big_r = radius();
  if (x >= big_r) return w_.back() * std::exp(-decay_rate_ * (x - big_r));
  const auto i = std::min(static_cast<std::size_t>(x / step_), w_.size() - 2);
  const double s = (x - static_cast<double>(i) * step_) / step_;
  return hermite(step_, w_[i], dw_[i], w_[i + 1], dw_[i + 1], s).value;
}

double ScalarProfile::derivative(double r) const {
  const double x = std::abs(r);
  const double sign = r < 0.0 ? -1.0 : 1.0;
  const double big_r = radius();
  if (x >= big_r) {
    return -sign * decay_rate_ * w_.back() * std::exp(-decay_rate_ * (x - big_r));
  }
  const auto i = std::min(static_cast<std::size_t>(x / step_), w_.size() - 2);
  const double s = (x - static_cast<double>(i) * step_) / step_;
  return sign * hermite(step_, w_[i], dw_[i], w_[i + 1], dw_[i + 1], s).slope;
}

std::vector<double> ScalarProfile::symmetric_samples() const {
  std::vector<double> out(2 * w_.size() - 1);
  const std::size_t mid = w_.size() - 1;
  for (std::size_t k = 0; k < w_.size(); ++k) {
    out[mid + k] = w_[k];
    out[mid - k] = w_[k];
  }
  return out;
}

double ScalarProfile::max_ode_residual() const {
  const double h2 = step_ * step_;
  double worst = 0.0;
  // Mirror through r = 0 so the stencil is available at the first nodes too.
  auto at = [&](long k) { return w_[static_cast<std::size_t>(std::abs(k))]; };
  const long n = static_cast<long>(w_.size());
  for (long k = 0; k + 2 < n; ++k) {
    const double d2 =
        (-at(k + 2) + 16.0 * at(k + 1) - 30.0 * at(k) + 16.0 * at(k - 1) - at(k - 2)) / (12.0 * h2);
    const double w = at(k);
    worst = std::max(worst, std::abs(-d2 + w - w * w * w));
  }
  return worst;
}

// ---------------------------------------------------------------------------

namespace {

using State = std::array<double, 4>;  // w, w', dw/da, dw'/da

State rhs(const State& y) {
  const double w = y[0];
  return {y[1], w - w * w * w, y[3], (1.0 - 3.0 * w * w) * y[2]};
}

State rk4_step(const State& y, double h) {
  auto axpy = [](const State& a, double s, const State& b) {
    State out;
    for (int i = 0; i < 4; ++i) out[i] = a[i] + s * b[i];
    return out;
  };
  const State k1 = rhs(y);
  const State k2 = rhs(axpy(y, 0.5 * h, k1));
  const State k3 = rhs(axpy(y, 0.5 * h, k2));
  const State k4 = rhs(axpy(y, h, k3));
  State out;
  for (int i = 0; i < 4; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return out;
}

struct ShotResult {
  double mismatch;    // w'(R) + w(R), or a signed stand-in on early exit
  double sensitivity; // d(mismatch)/d(w(0)); only meaningful without early exit
  bool early_exit;
};

// Early exit when the trajectory crosses zero (overshoot) or turns upward (undershoot).
ShotResult shoot(double a, double step, std::size_t steps) {
  State y{a, 0.0, 1.0, 0.0};
  for (std::size_t k = 0; k < steps; ++k) {
    y = rk4_step(y, step);
    if (y[0] < 0.0) return {-1.0, 0.0, true};
    if (y[1] > 0.0) return {1.0, 0.0, true};
  }
  return {y[1] + y[0], y[3] + y[2], false};
}

}  // namespace

ScalarProfile solve_w(double tol, double radius) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidConfig, "solve_w: tol must be positive");
  // RK4 at 1e-3 lands near 1e-9 of the closed form; halve it for tighter requests.
  const double step = tol >= 1e-10 ? 1e-3 : 5e-4;
  const auto steps = static_cast<std::size_t>(std::llround(radius / step));

  double lo = 1.0;  // constant equilibrium w = 1: undershoot
  double hi = 2.0;  // overshoots through zero
  if (!(shoot(lo, step, steps).mismatch > 0.0) || !(shoot(hi, step, steps).mismatch < 0.0)) {
    throw Error(ErrorCode::ShootingFailed, "no sign change bracket for w(0) in [1, 2]");
  }
  // Bisect to machine precision: any residual error in w(0) seeds the growing
  // mode e^r, which dominates the tail long before R.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (shoot(mid, step, steps).mismatch > 0.0 ? lo : hi) = mid;
  }
  double a = 0.5 * (lo + hi);
  for (int it = 0; it < 5; ++it) {
    const ShotResult s = shoot(a, step, steps);
    if (s.early_exit || s.sensitivity == 0.0) break;
    const double next = a - s.mismatch / s.sensitivity;
    if (!(next > lo && next < hi) || next == a) break;
    a = next;
  }

  // Tabulate. Past the switch radius the shooting error grows like e^r, so the
  // table continues with the decaying linear tail matched in value.
  std::vector<double> w(steps + 1);
  std::vector<double> dw(steps + 1);
  State y{a, 0.0, 1.0, 0.0};
  w[0] = a;
  dw[0] = 0.0;
  std::size_t switch_index = steps;
  for (std::size_t k = 1; k <= steps; ++k) {
    y = rk4_step(y, step);
    w[k] = y[0];
    dw[k] = y[1];
    if (y[0] < 1e-4 * a) {
      switch_index = k;
      break;
    }
  }
  if (switch_index < 4) throw Error(ErrorCode::ShootingFailed, "profile decayed implausibly fast");
  const double r_switch = static_cast<double>(switch_index) * step;
  const std::size_t half = switch_index / 2;
  const double decay = -(std::log(w[switch_index]) - std::log(w[half])) /
                       (r_switch - static_cast<double>(half) * step);
  for (std::size_t k = switch_index + 1; k <= steps; ++k) {
    const double r = static_cast<double>(k) * step;
    w[k] = w[switch_index] * std::exp(-(r - r_switch));
    dw[k] = -w[k];
  }
  dw[switch_index] = -w[switch_index];
  return ScalarProfile(step, std::move(w), std::move(dw), decay);
}

// ---------------------------------------------------------------------------

ProfileConstants compute_constants(const ScalarProfile& profile, double quadrature_step) {
  if (!(quadrature_step > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "quadrature step must be positive");
  }
  auto intervals = static_cast<long>(std::llround(profile.radius() / quadrature_step));
  if (intervals % 2 != 0) ++intervals;
  const double h = profile.radius() / static_cast<double>(intervals);
  ProfileConstants c;
  for (long k = 0; k <= intervals; ++k) {
    const double r = static_cast<double>(k) * h;
    const double weight = (k == 0 || k == intervals) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    const double w = profile.value(r);
    const double dw = profile.derivative(r);
    c.i2 += weight * w * w;
    c.i4 += weight * w * w * w * w;
    c.a += weight * dw * dw;
  }
  // Simpson on [0, R], doubled for the even extension.
  const double scale = 2.0 * h / 3.0;
  c.i2 *= scale;
  c.i4 *= scale;
  c.a *= scale;
  return c;
}

VectorProfile vector_profile(const CouplingParams& coupling, const ScalarProfile& profile) {
  return VectorProfile{coupling.c_u, coupling.c_v, profile};
}

double vector_profile_residual(const CouplingParams& coupling, const VectorProfile& vp) {
  const auto& w = vp.profile.samples();
  const double h2 = vp.profile.step() * vp.profile.step();
  auto at = [&](long k) { return w[static_cast<std::size_t>(std::abs(k))]; };
  const long n = static_cast<long>(w.size());
  double worst = 0.0;
  for (long k = 0; k + 2 < n; ++k) {
    const double w2 =
        (-at(k + 2) + 16.0 * at(k + 1) - 30.0 * at(k) + 16.0 * at(k - 1) - at(k - 2)) / (12.0 * h2);
    const double u = vp.c_u * at(k);
    const double v = vp.c_v * at(k);
    const double ru = -vp.c_u * w2 + u - coupling.alpha * u * u * u - coupling.beta * u * v * v;
    const double rv = -vp.c_v * w2 + v - coupling.gamma * v * v * v - coupling.beta * u * u * v;
    worst = std::max({worst, std::abs(ru), std::abs(rv)});
  }
  const double scale = std::max(vp.c_u, vp.c_v) * w.front();
  return worst / scale;
}

VectorPohozaevReport audit_vector_pohozaev(const CouplingParams& c, const ProfileConstants& k) {
  const double cu2 = c.c_u * c.c_u;
  const double cv2 = c.c_v * c.c_v;
  VectorPohozaevReport r;
  r.mass = (cu2 + cv2) * k.i2;
  r.quartic = 0.75 * (c.alpha * cu2 * cu2 + c.gamma * cv2 * cv2 + 2.0 * c.beta * cu2 * cv2) * k.i4;
  r.kinetic = 3.0 * (cu2 + cv2) * k.a;
  r.mass_vs_quartic = std::abs(r.mass - r.quartic) / std::abs(r.mass);
  r.mass_vs_kinetic = std::abs(r.mass - r.kinetic) / std::abs(r.mass);
  return r;
}

}  // namespace ringbec
