#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gofd {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Fractional order s of the operator (-Delta)^s. Always strictly inside (0, 1).
class FractionalOrder {
 public:
  explicit FractionalOrder(double s);

  double value() const noexcept { return s_; }

  friend bool operator==(const FractionalOrder&, const FractionalOrder&) = default;

 private:
  double s_;
};

/// Uniform overlay grid on the cube (-r_fd, r_fd)^dim with 2*n_fd+1 nodes per axis.
///
/// Nodes are addressed either by signed coordinates k in [-n_fd, n_fd] or by
/// flat indices. The flat layout is row-major with the last axis fastest.
class OverlayGrid {
 public:
  OverlayGrid(int dim, double r_fd, int n_fd);

  int dim() const noexcept { return dim_; }
  double r_fd() const noexcept { return r_fd_; }
  int n_fd() const noexcept { return n_fd_; }
  double h() const noexcept { return h_; }

  int nodes_per_axis() const noexcept { return 2 * n_fd_ + 1; }
  std::size_t node_count() const noexcept { return node_count_; }

  double coordinate(int k) const noexcept { return k * h_; }

  /// Flat index of the node with signed axis coordinates k (size dim).
  std::size_t flat_index(std::span<const int> k) const;

  /// Signed axis coordinates of a flat node index.
  std::array<int, 3> node_coords(std::size_t flat) const;

  /// Physical position of a flat node index (unused components are zero).
  std::array<double, 3> node_position(std::size_t flat) const;

  friend bool operator==(const OverlayGrid&, const OverlayGrid&) = default;

 private:
  int dim_;
  double r_fd_;
  int n_fd_;
  double h_;
  std::size_t node_count_;
};

/// (4 * sum_j sin^2(xi_j / 2))^s, the symbol of the discrete fractional Laplacian.
double symbol_psi(std::span<const double> xi, FractionalOrder s);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  int order() const noexcept { return static_cast<int>(nodes.size()); }

  /// Integral of f over [a, b] using the rule mapped affinely onto the interval.
  double integrate(double a, double b, const std::function<double(double)>& f) const;
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// Bessel function J_{dim/2 - 1}(r) for dim in {1, 2, 3} and r > 0.
double bessel_j_half_order(int dim, double r);

/// Gamma function.
double gamma_fn(double x);

}  // namespace gofd
