#include "ringbec/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ringbec/error.hpp"

namespace ringbec {

LandscapeWeights landscape_weights(const CouplingParams& c) {
  const double denom = c.alpha + c.gamma - 2.0 * c.beta;
  const double w_p = (c.gamma - c.beta) / denom;
  // w_Q written as 1 - w_P keeps the pair summing to one exactly.
  return {w_p, 1.0 - w_p};
}

namespace {

struct Base {
  double value;  // 1 + (wP P + wQ Q)/lambda
  double slope;  // (wP P' + wQ Q')/lambda
};

Base base(const PotentialPair& pots, const CouplingParams& c, double lambda, double r) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidConfig, "lambda must be positive");
  const LandscapeWeights w = landscape_weights(c);
  const double mix = w.w_p * pots.p.value(r) + w.w_q * pots.q.value(r);
  const double mix_slope = w.w_p * pots.p.derivative(r) + w.w_q * pots.q.derivative(r);
  const Base b{1.0 + mix / lambda, mix_slope / lambda};
  if (!(b.value > 0.0)) {
    std::ostringstream msg;
    msg << "landscape base " << b.value << " <= 0 at r=" << r << ", lambda=" << lambda;
    throw Error(ErrorCode::NegativeBase, msg.str());
  }
  return b;
}

}  // namespace

double eval_M(const PotentialPair& pots, const CouplingParams& c, double lambda, double r) {
  const Base b = base(pots, c, lambda, r);
  return r * b.value * std::sqrt(b.value);
}

double eval_M_prime(const PotentialPair& pots, const CouplingParams& c, double lambda, double r) {
  const Base b = base(pots, c, lambda, r);
  return std::sqrt(b.value) * (b.value + 1.5 * r * b.slope);
}

double eval_M_second(const PotentialPair& pots, const CouplingParams& c, double lambda, double r) {
  const double h = 1e-4 * std::max(1.0, r);
  return (eval_M_prime(pots, c, lambda, r + h) - eval_M_prime(pots, c, lambda, r - h)) / (2.0 * h);
}

std::vector<CriticalPoint> find_critical_points(const PotentialPair& pots, const CouplingParams& c,
                                                double lambda, Window window, double c0) {
  if (!(window.hi > window.lo) || window.lo < 0.0) {
    throw Error(ErrorCode::InvalidConfig, "critical-point window must satisfy 0 <= lo < hi");
  }
  const double step = std::min({pots.p.scan_step(), pots.q.scan_step(), (window.hi - window.lo) / 8.0});
  const auto cells = static_cast<long>(std::ceil((window.hi - window.lo) / step));
  const double h = (window.hi - window.lo) / static_cast<double>(cells);
  auto f = [&](double r) { return eval_M_prime(pots, c, lambda, r); };

  std::vector<CriticalPoint> found;
  bool any_sign_change = false;
  double a = window.lo;
  double fa = f(a);
  for (long k = 1; k <= cells; ++k) {
    const double b = k == cells ? window.hi : window.lo + static_cast<double>(k) * h;
    const double fb = f(b);
    const bool crosses = (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) || (fb == 0.0 && fa != 0.0);
    if (crosses) {
      any_sign_change = true;
      double lo = a, hi = b, flo = fa;
      const double tol = 1e-10 * lambda;
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      const double y = 0.5 * (lo + hi);
      const double m2 = eval_M_second(pots, c, lambda, y);
      if (std::abs(m2) >= c0) found.push_back(CriticalPoint{y, m2, Window{a, b}, lambda});
    }
    a = b;
    fa = fb;
  }
  if (!any_sign_change) {
    std::ostringstream msg;
    msg << "M' has no sign change in [" << window.lo << ", " << window.hi << "] at lambda=" << lambda;
    throw Error(ErrorCode::NoCriticalPoint, msg.str());
  }
  return found;
}

CriticalPoint nearest_concentration(const PotentialPair& pots, const CouplingParams& c, double lambda, Window window,
                                    double c0) {
  const auto points = find_critical_points(pots, c, lambda, window, c0);
  if (points.empty()) {
    throw Error(ErrorCode::NoCriticalPoint, "no nondegenerate critical point in the concentration window");
  }
  // Ascending order plus strict '<' keeps the smaller radius on ties.
  const CriticalPoint* best = &points.front();
  for (const auto& p : points) {
    if (std::abs(p.y - lambda) < std::abs(best->y - lambda)) best = &p;
  }
  return *best;
}

CriticalPoint predicted_concentration(const PotentialPair& pots, const CouplingParams& c, double lambda,
                                      RelativeWindow window, double c0) {
  return nearest_concentration(pots, c, lambda, Window{window.c1 * lambda, window.c2 * lambda}, c0);
}

int count_branches(const PotentialPair& pots, const CouplingParams& c, double lambda, Window window,
                   double c0) {
  try {
    return static_cast<int>(find_critical_points(pots, c, lambda, window, c0).size());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoCriticalPoint) return 0;
    throw;
  }
}

}  // namespace ringbec
