#pragma once

#include <span>
#include <vector>

namespace ringbec {

/// Square banded matrix in LAPACK general-band storage (column major, with kl
/// extra rows reserved for fill-in from partial pivoting).
class BandedMatrix {
 public:
  BandedMatrix(int n, int kl, int ku);

  int size() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }

  /// Entry (i, j); (i, j) must lie inside the band.
  double& at(int i, int j) { return ab_[index(i, j)]; }
  double at(int i, int j) const { return ab_[index(i, j)]; }
  bool in_band(int i, int j) const { return j - i <= ku_ && i - j <= kl_ && i >= 0 && j >= 0 && i < n_ && j < n_; }

  std::vector<double> multiply(std::span<const double> x) const;

 private:
  friend class BandedLU;
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(kl_ + ku_ + i - j) + static_cast<std::size_t>(j) * static_cast<std::size_t>(ldab_);
  }

  int n_;
  int kl_;
  int ku_;
  int ldab_;
  std::vector<double> ab_;
};

/// LU factorization with partial pivoting. Throws SingularJacobian when a pivot
/// falls below `pivot_threshold` times the largest pivot.
class BandedLU {
 public:
  explicit BandedLU(BandedMatrix matrix, double pivot_threshold = 1e-14);

  void solve_in_place(std::span<double> rhs) const;
  std::vector<double> solve(std::span<const double> rhs) const;

  /// Smallest |U_ii| divided by the largest.
  double pivot_ratio() const { return pivot_ratio_; }

 private:
  BandedMatrix lu_;
  std::vector<int> pivots_;
  double pivot_ratio_ = 1.0;
};

}  // namespace ringbec
