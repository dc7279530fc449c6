#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseCore>

namespace gofd {

class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Threshold incomplete Cholesky A ~ L L^T with optional diagonal compensation.
///
/// Column j keeps L(i, j) when |L(i, j)| >= drop_tol * ||A(j:n, j)||_1. In the
/// modified variant every dropped value is added to both diagonal entries it
/// couples, so that L L^T reproduces the row sums of A. A nonpositive pivot
/// triggers one retry on A + shift I with shift = 1e-8 max_i A(i, i).
class IncompleteCholesky {
 public:
  using Matrix = Eigen::SparseMatrix<double>;  // column major

  /// Only the lower triangle of `a` is read.
  explicit IncompleteCholesky(const Matrix& a, double drop_tol = 1e-3, bool modified = true);

  std::size_t size() const noexcept { return static_cast<std::size_t>(lower_.rows()); }
  const Matrix& lower() const noexcept { return lower_; }
  double shift() const noexcept { return shift_; }

  /// x <- (L L^T)^{-1} x.
  void solve_in_place(std::span<double> x) const;

 private:
  bool factorize(const Matrix& a, double shift);

  double drop_tol_;
  bool modified_;
  double shift_ = 0.0;
  Matrix lower_;
};

}  // namespace gofd
