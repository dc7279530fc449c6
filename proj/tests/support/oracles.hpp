#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gofd/mesh.hpp"
#include "gofd/stiffness.hpp"

// Reference implementations used by the tests. They avoid the library's own
// algorithms: direct sums instead of FFTs, Gamma ratios instead of the
// recurrence, series instead of library Bessel calls.
namespace gofd::oracle {

inline constexpr double kPi = std::numbers::pi;

/// Row-major multi-index of a flat index.
inline std::array<int, 3> unflatten(std::size_t flat, int dim, int extent) {
  std::array<int, 3> idx{};
  for (int d = dim - 1; d >= 0; --d) {
    idx[static_cast<std::size_t>(d)] = static_cast<int>(flat % static_cast<std::size_t>(extent));
    flat /= static_cast<std::size_t>(extent);
  }
  return idx;
}

inline std::size_t power(int base, int dim) {
  std::size_t n = 1;
  for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(base);
  return n;
}

/// O(N^2) multi-dimensional DFT with the library's sign and scaling conventions.
inline std::vector<std::complex<double>> naive_dft(std::span<const std::complex<double>> values,
                                                   std::span<const std::size_t> shape, bool inverse) {
  const std::size_t total = values.size();
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<std::complex<double>> out(total);
  auto index = [&](std::size_t flat) {
    std::vector<std::size_t> idx(shape.size());
    for (std::size_t d = shape.size(); d-- > 0;) {
      idx[d] = flat % shape[d];
      flat /= shape[d];
    }
    return idx;
  };
  for (std::size_t k = 0; k < total; ++k) {
    const auto kk = index(k);
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < total; ++j) {
      const auto jj = index(j);
      double phase = 0.0;
      for (std::size_t d = 0; d < shape.size(); ++d) {
        phase += static_cast<double>(jj[d] * kk[d] % shape[d]) / static_cast<double>(shape[d]);
      }
      acc += values[j] * std::polar(1.0, sign * 2.0 * kPi * phase);
    }
    out[k] = inverse ? acc / static_cast<double>(total) : acc;
  }
  return out;
}

/// T_p of the closed-form 1D kernel written with the reflection formula:
/// T_0 = Gamma(2s+1)/Gamma(s+1)^2, T_p = -Gamma(2s+1) sin(pi s) Gamma(p-s) / (pi Gamma(p+s+1)).
inline double analytic_coefficient(double s, int p) {
  p = std::abs(p);
  if (p == 0) return std::tgamma(2 * s + 1) / (std::tgamma(s + 1) * std::tgamma(s + 1));
  const double log_ratio = std::lgamma(p - s) - std::lgamma(p + s + 1.0);
  return -std::tgamma(2 * s + 1) * std::sin(kPi * s) * std::exp(log_ratio) / kPi;
}

/// Power series of J0, accurate for r up to about 20.
inline double j0_series(double r) {
  // Extended precision absorbs the cancellation of the alternating terms for r up to about 15.
  long double term = 1.0L;
  long double sum = 1.0L;
  const long double q = 0.25L * r * r;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<long double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-21L * std::abs(sum) && k > 5) break;
  }
  return static_cast<double>(sum);
}

/// (4 sum sin^2(xi_j/2))^s.
inline double psi(std::span<const double> xi, double s) {
  double acc = 0.0;
  for (double x : xi) acc += std::sin(0.5 * x) * std::sin(0.5 * x);
  return std::pow(4.0 * acc, s);
}

/// Brute-force tensor-product quadrature of (2 pi)^{-d} int psi(xi) cos(p.xi) dxi
/// over (-pi, pi)^d given one-dimensional nodes and weights.
inline double tensor_quadrature(int dim, double s, std::span<const int> p, std::span<const double> nodes,
                                std::span<const double> weights) {
  const std::size_t m = nodes.size();
  const std::size_t total = power(static_cast<int>(m), dim);
  double acc = 0.0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    const auto idx = unflatten(flat, dim, static_cast<int>(m));
    std::array<double, 3> xi{};
    double w = 1.0;
    double phase = 0.0;
    for (int d = 0; d < dim; ++d) {
      const auto j = static_cast<std::size_t>(idx[static_cast<std::size_t>(d)]);
      xi[static_cast<std::size_t>(d)] = nodes[j];
      w *= weights[j];
      phase += p[static_cast<std::size_t>(d)] * nodes[j];
    }
    acc += w * psi(std::span<const double>(xi.data(), static_cast<std::size_t>(dim)), s) * std::cos(phase);
  }
  return acc / std::pow(2.0 * kPi, dim);
}

/// Periodic trapezoid nodes -pi + 2 pi j / M with weights 2 pi / M.
inline void uniform_rule(int m, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(static_cast<std::size_t>(m));
  weights.assign(static_cast<std::size_t>(m), 2.0 * kPi / m);
  for (int j = 0; j < m; ++j) nodes[static_cast<std::size_t>(j)] = -kPi + 2.0 * kPi * j / m;
}

/// Nodes pi t|t| for t_j = 2j/M - 1, j = 0..M, with composite trapezoid weights in xi.
inline void clustered_rule(int m, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(static_cast<std::size_t>(m + 1));
  weights.assign(static_cast<std::size_t>(m + 1), 0.0);
  for (int j = 0; j <= m; ++j) {
    const double t = 2.0 * j / m - 1.0;
    nodes[static_cast<std::size_t>(j)] = kPi * t * std::abs(t);
  }
  // Trapezoid in xi: each interval contributes half its length to both endpoints.
  for (int j = 0; j < m; ++j) {
    const double len = nodes[static_cast<std::size_t>(j + 1)] - nodes[static_cast<std::size_t>(j)];
    weights[static_cast<std::size_t>(j)] += 0.5 * len;
    weights[static_cast<std::size_t>(j + 1)] += 0.5 * len;
  }
}

/// Composite Gauss-Legendre (5 points, tabulated) over `panels` equal panels.
inline double composite_gauss(const std::function<double(double)>& f, double a, double b, int panels) {
  static constexpr std::array<double, 5> x{0.0, 0.5384693101056831, -0.5384693101056831, 0.9061798459386640,
                                           -0.9061798459386640};
  static constexpr std::array<double, 5> w{0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                           0.2369268850561891, 0.2369268850561891};
  const double width = (b - a) / panels;
  double acc = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * width;
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * f(lo + 0.5 * width * (x[i] + 1.0));
  }
  return 0.5 * width * acc;
}

/// Dense A[j][m] = T_{j-m} over the (2 n_fd + 1)^d grid, read through kernel.at().
inline Eigen::MatrixXd dense_from_kernel(const StiffnessKernel& kernel) {
  const int dim = kernel.dim();
  const int extent = 2 * kernel.n_fd() + 1;
  const std::size_t n = power(extent, dim);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = unflatten(j, dim, extent);
    for (std::size_t m = 0; m < n; ++m) {
      const auto mm = unflatten(m, dim, extent);
      std::array<int, 3> off{};
      for (int d = 0; d < dim; ++d) off[static_cast<std::size_t>(d)] = jj[static_cast<std::size_t>(d)] - mm[static_cast<std::size_t>(d)];
      a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m)) =
          kernel.at(std::span<const int>(off.data(), static_cast<std::size_t>(dim)));
    }
  }
  return a;
}

/// v_j = sum_m T_{j-m} u_m by direct summation.
inline std::vector<double> direct_apply(const StiffnessKernel& kernel, std::span<const double> u) {
  const int dim = kernel.dim();
  const int extent = 2 * kernel.n_fd() + 1;
  const std::size_t n = u.size();
  std::vector<double> v(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = unflatten(j, dim, extent);
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const auto mm = unflatten(m, dim, extent);
      std::array<int, 3> off{};
      for (int d = 0; d < dim; ++d) off[static_cast<std::size_t>(d)] = jj[static_cast<std::size_t>(d)] - mm[static_cast<std::size_t>(d)];
      acc += kernel.at(std::span<const int>(off.data(), static_cast<std::size_t>(dim))) * u[m];
    }
    v[j] = acc;
  }
  return v;
}

/// 2^{-2s} Gamma(d/2) / (Gamma(d/2 + s) Gamma(1 + s)) (1 - |x|^2)_+^s.
inline double ball_solution(int dim, double s, const Point& x) {
  double r2 = 0.0;
  for (int d = 0; d < dim; ++d) r2 += x[static_cast<std::size_t>(d)] * x[static_cast<std::size_t>(d)];
  if (r2 >= 1.0) return 0.0;
  const double c = std::pow(2.0, -2.0 * s) * std::tgamma(0.5 * dim) / (std::tgamma(0.5 * dim + s) * std::tgamma(1.0 + s));
  return c * std::pow(1.0 - r2, s);
}

/// Deterministic pseudo-random values in [-1, 1].
inline std::vector<double> sample_vector(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace gofd::oracle
