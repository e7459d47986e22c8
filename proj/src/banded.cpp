#include "ringbec/banded.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <lapacke.h>

#include "ringbec/error.hpp"

namespace ringbec {

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
      ab_(static_cast<std::size_t>(ldab_) * static_cast<std::size_t>(n), 0.0) {}

std::vector<double> BandedMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(n_), 0.0);
  for (int i = 0; i < n_; ++i) {
    const int j0 = std::max(0, i - kl_);
    const int j1 = std::min(n_ - 1, i + ku_);
    double s = 0.0;
    for (int j = j0; j <= j1; ++j) s += at(i, j) * x[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] = s;
  }
  return y;
}

BandedLU::BandedLU(BandedMatrix matrix, double pivot_threshold)
    : lu_(std::move(matrix)), pivots_(static_cast<std::size_t>(lu_.n_)) {
  const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, lu_.n_, lu_.n_, lu_.kl_, lu_.ku_, lu_.ab_.data(),
                                         lu_.ldab_, pivots_.data());
  if (info < 0) throw Error(ErrorCode::SingularJacobian, "dgbtrf: invalid argument");
  // U occupies rows 0..kl+ku of the storage; its diagonal sits at row kl+ku.
  double smallest = std::numeric_limits<double>::infinity();
  double largest = 0.0;
  for (int i = 0; i < lu_.n_; ++i) {
    const double d = std::abs(lu_.ab_[lu_.index(i, i)]);
    smallest = std::min(smallest, d);
    largest = std::max(largest, d);
  }
  pivot_ratio_ = largest > 0.0 ? smallest / largest : 0.0;
  if (info > 0 || !(pivot_ratio_ > pivot_threshold)) {
    std::ostringstream msg;
    msg << "pivot ratio " << pivot_ratio_ << " below threshold " << pivot_threshold;
    throw Error(ErrorCode::SingularJacobian, msg.str());
  }
}

void BandedLU::solve_in_place(std::span<double> rhs) const {
  const lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', lu_.n_, lu_.kl_, lu_.ku_, 1, lu_.ab_.data(),
                                         lu_.ldab_, pivots_.data(), rhs.data(), lu_.n_);
  if (info != 0) throw Error(ErrorCode::SingularJacobian, "dgbtrs failed");
}

std::vector<double> BandedLU::solve(std::span<const double> rhs) const {
  std::vector<double> x(rhs.begin(), rhs.end());
  solve_in_place(x);
  return x;
}

}  // namespace ringbec
