#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ringbec {

/// line: the 1D autonomous analog (no 1/r term, unit measure);
/// radial: the 2D radial system on r > 0 with measure r dr.
enum class Geometry { Line, Radial };

/// Cell-centered uniform grid on [0, r_max]: nodes r_i = (i + 1/2) h.
struct RadialGrid {
  int n = 0;
  double h = 0.0;

  double node(int i) const { return (static_cast<double>(i) + 0.5) * h; }
  double r_max() const { return static_cast<double>(n) * h; }
  std::vector<double> nodes() const;
};

struct GridOptions {
  double points_per_width = 10.0;  ///< nodes per peak width 1/sqrt(lambda)
  double pad = 15.0;               ///< margin beyond the peak, in peak widths
  std::size_t cap = 2'000'000;
};

/// h <= 1/(points_per_width sqrt(lambda)); r_max >= max(1.3 r_center, r_center + pad/sqrt(lambda)).
RadialGrid build_grid(double lambda, double r_center, const GridOptions& options = {});

/// Measure weight of node i times h: r_i h (radial) or h (line).
double cell_weight(const RadialGrid& grid, Geometry geometry, int i);

/// Flux-form stiffness K of -(w u')' with zero flux at r = 0 (even reflection)
/// and homogeneous Dirichlet at r_max. K is symmetric; K u / cell_weight is
/// the usual centered -u'' - u'/r (radial) or -u'' (line).
struct Stiffness {
  std::vector<double> diag;
  std::vector<double> off;  ///< K(i, i+1) = K(i+1, i), size n-1
};

Stiffness build_stiffness(const RadialGrid& grid, Geometry geometry);
std::vector<double> apply_stiffness(const Stiffness& k, std::span<const double> u);

/// Node-centered first difference with the even ghost at r = 0 and the Dirichlet ghost at r_max.
std::vector<double> node_derivative(std::span<const double> f, double h);

/// Symmetric tridiagonal solve (Thomas); the matrix must be positive definite.
std::vector<double> solve_tridiagonal(std::span<const double> diag, std::span<const double> off,
                                      std::span<const double> rhs);

}  // namespace ringbec
