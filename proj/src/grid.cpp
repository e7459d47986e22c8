#include "ringbec/grid.hpp"

#include <cmath>
#include <sstream>

#include "ringbec/error.hpp"

namespace ringbec {

std::vector<double> RadialGrid::nodes() const {
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = node(i);
  return r;
}

RadialGrid build_grid(double lambda, double r_center, const GridOptions& options) {
  if (!(lambda > 0.0) || !(r_center >= 0.0) || !(options.points_per_width > 0.0) || !(options.pad > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "build_grid: lambda > 0, r_center >= 0, ppw > 0, pad > 0 required");
  }
  const double width = 1.0 / std::sqrt(lambda);
  const double h = width / options.points_per_width;
  const double target = std::max(1.3 * r_center, r_center + options.pad * width);
  const double cells = std::ceil(target / h);
  if (cells > static_cast<double>(options.cap)) {
    std::ostringstream msg;
    msg << "grid needs " << cells << " nodes, cap is " << options.cap;
    throw Error(ErrorCode::GridTooLarge, msg.str());
  }
  return RadialGrid{static_cast<int>(cells), h};
}

double cell_weight(const RadialGrid& grid, Geometry geometry, int i) {
  return geometry == Geometry::Radial ? grid.node(i) * grid.h : grid.h;
}

Stiffness build_stiffness(const RadialGrid& grid, Geometry geometry) {
  const auto n = static_cast<std::size_t>(grid.n);
  Stiffness k{std::vector<double>(n, 0.0), std::vector<double>(n > 0 ? n - 1 : 0, 0.0)};
  auto measure = [&](double r) { return geometry == Geometry::Radial ? r : 1.0; };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double e = measure(static_cast<double>(i + 1) * grid.h) / grid.h;
    k.diag[i] += e;
    k.diag[i + 1] += e;
    k.off[i] = -e;
  }
  // Dirichlet ghost u_n = -u_{n-1} at r_max.
  k.diag[n - 1] += 2.0 * measure(grid.r_max()) / grid.h;
  return k;
}

std::vector<double> apply_stiffness(const Stiffness& k, std::span<const double> u) {
  const std::size_t n = k.diag.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = k.diag[i] * u[i];
    if (i > 0) s += k.off[i - 1] * u[i - 1];
    if (i + 1 < n) s += k.off[i] * u[i + 1];
    out[i] = s;
  }
  return out;
}

std::vector<double> node_derivative(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? f[i - 1] : f[0];
    const double right = i + 1 < n ? f[i + 1] : -f[n - 1];
    d[i] = (right - left) / (2.0 * h);
  }
  return d;
}

std::vector<double> solve_tridiagonal(std::span<const double> diag, std::span<const double> off,
                                      std::span<const double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n), x(rhs.begin(), rhs.end());
  double d = diag[0];
  c[0] = n > 1 ? off[0] / d : 0.0;
  x[0] /= d;
  for (std::size_t i = 1; i < n; ++i) {
    d = diag[i] - off[i - 1] * c[i - 1];
    c[i] = i + 1 < n ? off[i] / d : 0.0;
    x[i] = (x[i] - off[i - 1] * x[i - 1]) / d;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
  return x;
}

}  // namespace ringbec
