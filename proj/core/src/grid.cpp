#include "gofd/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gofd {

FractionalOrder::FractionalOrder(double s) : s_(s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw std::invalid_argument("fractional order must lie strictly inside (0, 1), got " +
                                std::to_string(s));
  }
}

OverlayGrid::OverlayGrid(int dim, double r_fd, int n_fd)
    : dim_(dim), r_fd_(r_fd), n_fd_(n_fd), h_(0.0), node_count_(1) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  if (!(r_fd > 0.0) || !std::isfinite(r_fd)) throw std::invalid_argument("r_fd must be positive");
  if (n_fd < 1) throw std::invalid_argument("n_fd must be at least 1");
  h_ = r_fd / n_fd;
  for (int d = 0; d < dim; ++d) node_count_ *= static_cast<std::size_t>(2 * n_fd + 1);
}

std::size_t OverlayGrid::flat_index(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != dim_) throw std::invalid_argument("coordinate rank mismatch");
  const auto m = static_cast<std::size_t>(nodes_per_axis());
  std::size_t flat = 0;
  for (int d = 0; d < dim_; ++d) {
    if (k[d] < -n_fd_ || k[d] > n_fd_) throw std::out_of_range("grid coordinate out of range");
    flat = flat * m + static_cast<std::size_t>(k[d] + n_fd_);
  }
  return flat;
}

std::array<int, 3> OverlayGrid::node_coords(std::size_t flat) const {
  std::array<int, 3> k{0, 0, 0};
  const auto m = static_cast<std::size_t>(nodes_per_axis());
  for (int d = dim_ - 1; d >= 0; --d) {
    k[d] = static_cast<int>(flat % m) - n_fd_;
    flat /= m;
  }
  return k;
}

std::array<double, 3> OverlayGrid::node_position(std::size_t flat) const {
  const auto k = node_coords(flat);
  return {k[0] * h_, k[1] * h_, k[2] * h_};
}

double symbol_psi(std::span<const double> xi, FractionalOrder s) {
  double acc = 0.0;
  for (double x : xi) {
    const double sn = std::sin(0.5 * x);
    acc += 4.0 * sn * sn;
  }
  return acc > 0.0 ? std::pow(acc, s.value()) : 0.0;
}

double QuadratureRule::integrate(double a, double b, const std::function<double(double)>& f) const {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(mid + half * nodes[i]);
  return half * acc;
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre order must be at least 1");
  QuadratureRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-like initial guess for the i-th largest root.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      // P_n = p1, P_{n-1} = p0.
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[n - 1 - i] = w;
    rule.weights[i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

double bessel_j_half_order(int dim, double r) {
  if (!(r > 0.0)) throw std::domain_error("Bessel evaluation requires r > 0");
  switch (dim) {
    case 1:
      return std::sqrt(2.0 / (kPi * r)) * std::cos(r);
    case 2:
      return std::cyl_bessel_j(0.0, r);
    case 3:
      return std::sqrt(2.0 / (kPi * r)) * std::sin(r);
    default:
      throw std::invalid_argument("Bessel order only defined for dim in {1, 2, 3}");
  }
}

double gamma_fn(double x) { return std::tgamma(x); }

}  // namespace gofd
