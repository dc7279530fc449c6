#include <gtest/gtest.h>

#include <cmath>

#include "gofd/impact.hpp"

namespace gofd {
namespace {

// Root of (2n+1)^d n^{2s} 10^{-delta} r^{-2s} - n^{-k} by Newton's method on log n.
double newton_crossing(int dim, double s, int delta, double r_fd, int k) {
  double x = std::log(100.0);
  for (int it = 0; it < 100; ++it) {
    const double n = std::exp(x);
    const double g = dim * std::log(2 * n + 1) + 2 * s * std::log(n) - delta * std::log(10.0) - 2 * s * std::log(r_fd) +
                     k * std::log(n);
    const double dg = dim * 2 * n / (2 * n + 1) + 2 * s + k;
    x -= g / dg;
  }
  return std::exp(x);
}

TEST(ImpactBound, Formula) {
  EXPECT_NEAR(impact_bound(2, 0.5, 12, 1.0, 100.0), 201.0 * 201.0 * 100.0 * 1e-12, 1e-20);
  EXPECT_NEAR(impact_bound(3, 0.25, 9, 1.2, 10.0), std::pow(21.0, 3) * std::sqrt(10.0) * 1e-9 / std::sqrt(1.2), 1e-18);
  EXPECT_THROW(impact_bound(4, 0.5, 12, 1.0, 10.0), std::invalid_argument);
}

TEST(ImpactBound, DecreasesWithDelta) {
  double previous = impact_bound(2, 0.5, 1, 1.0, 50.0);
  for (int delta = 2; delta <= 20; ++delta) {
    const double b = impact_bound(2, 0.5, delta, 1.0, 50.0);
    EXPECT_LT(b, previous);
    previous = b;
  }
}

TEST(ImpactCrossing, MatchesNewtonRoot) {
  for (int dim : {1, 2, 3}) {
    for (int k : {1, 2}) {
      for (int delta : {9, 12}) {
        const auto c = impact_crossing(dim, 0.5, delta, 1.0, k);
        const double n = newton_crossing(dim, 0.5, delta, 1.0, k);
        EXPECT_NEAR(c.n_fd, n, 1e-9 * n);
        EXPECT_NEAR(c.error, std::pow(n, -k), 1e-9 * std::pow(n, -k));
      }
    }
  }
}

TEST(ImpactCrossing, TwoDimensionalDeltaTwelve) {
  const auto first = impact_crossing(2, 0.5, 12, 1.0, 1);
  const auto second = impact_crossing(2, 0.5, 12, 1.0, 2);
  EXPECT_NEAR(first.n_fd, 707.0, 1.0);
  EXPECT_NEAR(second.n_fd, 190.0, 1.0);
  EXPECT_LT(second.n_fd, first.n_fd);
  EXPECT_THROW(impact_crossing(2, 0.5, 12, 1.0, 0), std::invalid_argument);
}

}  // namespace
}  // namespace gofd
