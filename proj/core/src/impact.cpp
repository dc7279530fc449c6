#include "gofd/impact.hpp"

#include <cmath>
#include <stdexcept>

namespace gofd {

double impact_bound(int dim, double s, int delta, double r_fd, double n_fd) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  if (!(r_fd > 0.0) || !(n_fd > 0.0)) throw std::invalid_argument("r_fd and n_fd must be positive");
  return std::pow(2.0 * n_fd + 1.0, dim) * std::pow(n_fd, 2.0 * s) * std::pow(10.0, -delta) /
         std::pow(r_fd, 2.0 * s);
}

ImpactCrossing impact_crossing(int dim, double s, int delta, double r_fd, int order) {
  if (order < 1) throw std::invalid_argument("discretization order must be positive");
  // The gap bound(n) - n^{-order} is increasing in n, so bisection on log n finds the unique root.
  auto gap = [&](double n) { return impact_bound(dim, s, delta, r_fd, n) - std::pow(n, -order); };
  double lo = 1e-3;
  double hi = 1.0;
  if (gap(lo) > 0.0) throw std::domain_error("bound already dominates at the smallest grid");
  while (gap(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw std::domain_error("bound never reaches the discretization error");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    (gap(mid) < 0.0 ? lo : hi) = mid;
  }
  const double n = std::sqrt(lo * hi);
  return {n, std::pow(n, -order)};
}

}  // namespace gofd
