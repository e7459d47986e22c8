#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ringbec/profile.hpp"
#include "ringbec/solver.hpp"

namespace ringbec::testing {

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Admissible coupling drawn from one of the three beta branches (chosen uniformly),
/// kept a few percent away from every endpoint.
inline CouplingParams random_coupling(std::mt19937& rng) {
  const double alpha = uniform(rng, 0.5, 3.0);
  const double gamma = uniform(rng, 0.5, 3.0);
  const double t = uniform(rng, 0.05, 0.95);
  double beta = 0.0;
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: beta = -t * std::sqrt(alpha * gamma); break;
    case 1: beta = t * std::min(alpha, gamma); break;
    default: beta = std::max(alpha, gamma) * (1.05 + 4.0 * t); break;
  }
  return validate_coupling(alpha, gamma, beta);
}

inline std::vector<double> random_vector(std::mt19937& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> x(n);
  for (auto& e : x) e = uniform(rng, -scale, scale);
  return x;
}

inline FieldPair random_fields(std::mt19937& rng, std::size_t n, double scale = 1.0) {
  return {random_vector(rng, n, scale), random_vector(rng, n, scale)};
}

inline double sup_norm(const std::vector<double>& x) {
  double m = 0.0;
  for (double e : x) m = std::max(m, std::abs(e));
  return m;
}

inline double sup_norm(const FieldPair& x) { return std::max(sup_norm(x.u), sup_norm(x.v)); }

inline double l2_norm(const FieldPair& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x.u[i] * x.u[i] + x.v[i] * x.v[i];
  return std::sqrt(s);
}

inline double observed_order(double coarse, double fine, double ratio = 2.0) {
  return std::log(std::abs(coarse) / std::abs(fine)) / std::log(ratio);
}

}  // namespace ringbec::testing
