#include "gofd/stiffness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "line_transforms.hpp"

namespace gofd {

namespace {

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("kernel dimension must be 1, 2 or 3");
}

void check_sampling(int n_fd, int m) {
  if (n_fd < 1) throw std::invalid_argument("n_fd must be at least 1");
  if (m < 2 * n_fd + 1) {
    throw std::invalid_argument("sample count M = " + std::to_string(m) +
                                " must be at least 2 n_fd + 1 = " + std::to_string(2 * n_fd + 1));
  }
}

/// Calls f(p, flat) for every offset p of the stored orthant, in flat order.
template <typename F>
void for_each_offset(int dim, int extent, F&& f) {
  std::array<int, 3> p{0, 0, 0};
  const std::size_t total = ipow(static_cast<std::size_t>(extent), dim);
  for (std::size_t flat = 0; flat < total; ++flat) {
    f(p, flat);
    for (int d = dim - 1; d >= 0; --d) {
      if (++p[d] < extent) break;
      p[d] = 0;
    }
  }
}

enum class Integrand { Psi, PsiMinusPower };

std::vector<double> fft_coefficients(FractionalOrder s, int dim, int n_fd, int m,
                                     Integrand integrand) {
  check_dim(dim);
  check_sampling(n_fd, m);
  const int outputs = 2 * n_fd + 1;
  detail::UniformEvenTransform transform(m, outputs);
  const int half = transform.half_length();

  // Per-axis pieces of the integrand on the half grid xi_j = pi (2j/M - 1) <= 0.
  std::vector<double> sin2(half);
  std::vector<double> xi2(half);
  for (int j = 0; j < half; ++j) {
    const double xi = kPi * (2.0 * j / m - 1.0);
    const double sn = std::sin(0.5 * xi);
    sin2[j] = 4.0 * sn * sn;
    xi2[j] = xi * xi;
  }
  const double sv = s.value();

  auto fill = [&](std::span<const int> outer, std::span<double> line) {
    double a0 = 0.0;
    double r0 = 0.0;
    for (int o : outer) {
      a0 += sin2[o];
      r0 += xi2[o];
    }
    for (int j = 0; j < half; ++j) {
      const double a = a0 + sin2[j];
      double v = a > 0.0 ? std::pow(a, sv) : 0.0;
      if (integrand == Integrand::PsiMinusPower) {
        const double r = r0 + xi2[j];
        v -= r > 0.0 ? std::pow(r, sv) : 0.0;
      }
      line[j] = v;
    }
  };
  std::vector<double> coeffs = detail::separable_even_transform(dim, transform, fill);

  if (transform.imaginary_residue() > 1e-10) {
    throw std::runtime_error("FFT kernel has a non-negligible imaginary part");
  }

  const double scale = 1.0 / std::pow(static_cast<double>(m), dim);
  for_each_offset(dim, outputs, [&](const std::array<int, 3>& p, std::size_t flat) {
    const int parity = (p[0] + p[1] + p[2]) & 1;
    coeffs[flat] *= parity ? -scale : scale;
  });
  return coeffs;
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Analytic1D: return "analytic";
    case Scheme::FftUniform: return "fft";
    case Scheme::NonUniform: return "nufft";
    case Scheme::Spectral: return "spectral";
    case Scheme::ModifiedSpectral: return "modspec";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "analytic") return Scheme::Analytic1D;
  if (name == "fft") return Scheme::FftUniform;
  if (name == "nufft") return Scheme::NonUniform;
  if (name == "spectral") return Scheme::Spectral;
  if (name == "modspec") return Scheme::ModifiedSpectral;
  throw std::invalid_argument("unknown kernel scheme '" + std::string(name) + "'");
}

StiffnessKernel::StiffnessKernel(int dim, FractionalOrder s, int n_fd, Scheme scheme,
                                 std::vector<double> coeffs)
    : dim_(dim), s_(s), n_fd_(n_fd), scheme_(scheme), coeffs_(std::move(coeffs)) {
  check_dim(dim);
  if (n_fd < 1) throw std::invalid_argument("n_fd must be at least 1");
  if (coeffs_.size() != ipow(static_cast<std::size_t>(extent()), dim)) {
    throw std::invalid_argument("kernel coefficient count does not match (2 n_fd + 1)^dim");
  }
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw std::invalid_argument("kernel has non-finite coefficients");
  }
  if (!(coeffs_[0] > 0.0)) throw std::invalid_argument("kernel diagonal entry T_0 must be positive");
}

StiffnessKernel StiffnessKernel::unchecked(int dim, FractionalOrder s, int n_fd, Scheme scheme,
                                           std::vector<double> coeffs) {
  StiffnessKernel k(dim, s, n_fd, scheme);
  if (coeffs.size() != ipow(static_cast<std::size_t>(k.extent()), dim)) {
    throw std::invalid_argument("kernel coefficient count does not match (2 n_fd + 1)^dim");
  }
  k.coeffs_ = std::move(coeffs);
  return k;
}

double StiffnessKernel::at(std::span<const int> offset) const {
  if (static_cast<int>(offset.size()) != dim_) throw std::invalid_argument("offset rank mismatch");
  std::size_t flat = 0;
  const int e = extent();
  for (int d = 0; d < dim_; ++d) {
    const int a = std::abs(offset[d]);
    if (a >= e) throw std::out_of_range("kernel offset beyond 2 n_fd");
    flat = flat * static_cast<std::size_t>(e) + static_cast<std::size_t>(a);
  }
  return coeffs_[flat];
}

StiffnessKernel StiffnessKernel::truncated(int n_fd) const {
  if (n_fd < 1 || n_fd > n_fd_) throw std::invalid_argument("can only truncate to a smaller n_fd");
  if (n_fd == n_fd_) return *this;
  const int e_new = 2 * n_fd + 1;
  const auto e_old = static_cast<std::size_t>(extent());
  std::vector<double> out(ipow(static_cast<std::size_t>(e_new), dim_));
  for_each_offset(dim_, e_new, [&](const std::array<int, 3>& p, std::size_t flat) {
    std::size_t src = 0;
    for (int d = 0; d < dim_; ++d) src = src * e_old + static_cast<std::size_t>(p[d]);
    out[flat] = coeffs_[src];
  });
  return StiffnessKernel(dim_, s_, n_fd, scheme_, std::move(out));
}

StiffnessKernel analytic_1d(FractionalOrder s, int n_fd) {
  if (n_fd < 1) throw std::invalid_argument("n_fd must be at least 1");
  const double sv = s.value();
  std::vector<double> t(2 * n_fd + 1);
  // T_0 = Gamma(2s+1) / Gamma(s+1)^2; consecutive ratios avoid Gamma overflow at large p.
  t[0] = gamma_fn(2.0 * sv + 1.0) / std::pow(gamma_fn(sv + 1.0), 2);
  for (std::size_t p = 0; p + 1 < t.size(); ++p) {
    const double pd = static_cast<double>(p);
    t[p + 1] = t[p] * (pd - sv) / (pd + sv + 1.0);
  }
  return StiffnessKernel(1, s, n_fd, Scheme::Analytic1D, std::move(t));
}

StiffnessKernel fft_uniform(FractionalOrder s, int dim, int n_fd, int m) {
  return StiffnessKernel(dim, s, n_fd, Scheme::FftUniform,
                         fft_coefficients(s, dim, n_fd, m, Integrand::Psi));
}

StiffnessKernel fft_regularized_part(FractionalOrder s, int dim, int n_fd, int m) {
  // psi - |xi|^{2s} vanishes at the origin, so T_0 of this part need not be positive.
  return StiffnessKernel::unchecked(dim, s, n_fd, Scheme::ModifiedSpectral,
                                    fft_coefficients(s, dim, n_fd, m, Integrand::PsiMinusPower));
}

double volume_matched_radius(int dim) {
  check_dim(dim);
  return 2.0 * std::sqrt(kPi) * std::pow(gamma_fn(0.5 * dim + 1.0), 1.0 / dim);
}

StiffnessKernel spectral(FractionalOrder s, int dim, int n_fd, int n_gauss) {
  check_dim(dim);
  if (n_fd < 1) throw std::invalid_argument("n_fd must be at least 1");
  if (n_gauss < 4) throw std::invalid_argument("spectral kernel needs at least 4 Gauss points");
  const int extent = 2 * n_fd + 1;
  const double sv = s.value();
  const double dd = dim;
  const double radius = volume_matched_radius(dim);

  const auto q_max = static_cast<std::size_t>(dim) * static_cast<std::size_t>(2 * n_fd) *
                     static_cast<std::size_t>(2 * n_fd);
  // Squared radii |p|^2 are integers; repeated radii share one cumulative integral.
  std::vector<char> present(q_max + 1, 0);
  for_each_offset(dim, extent, [&](const std::array<int, 3>& p, std::size_t) {
    present[static_cast<std::size_t>(p[0] * p[0] + p[1] * p[1] + p[2] * p[2])] = 1;
  });

  const QuadratureRule rule = gauss_legendre(n_gauss);
  const double alpha = 2.0 * sv + 0.5 * dd;
  std::vector<double> cumulative(q_max + 1, 0.0);
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t q = 1; q <= q_max; ++q) {
    if (!present[q]) continue;
    const double r = radius * std::sqrt(static_cast<double>(q));
    const double half = 0.5 * (r - prev);
    const double mid = 0.5 * (r + prev);
    double sum = 0.0;
    for (int i = 0; i < rule.order(); ++i) {
      const double t = mid + half * rule.nodes[i];
      sum += rule.weights[i] * std::pow(t, alpha) * bessel_j_half_order(dim, t);
    }
    acc += half * sum;
    cumulative[q] = acc;
    prev = r;
  }

  const double norm = std::pow(2.0 * kPi, 0.5 * dd);
  const double t0 = 2.0 * std::pow(radius, dd + 2.0 * sv) /
                    ((dd + 2.0 * sv) * std::pow(2.0, dd) * std::pow(kPi, 0.5 * dd) * gamma_fn(0.5 * dd));
  std::vector<double> coeffs(ipow(static_cast<std::size_t>(extent), dim));
  for_each_offset(dim, extent, [&](const std::array<int, 3>& p, std::size_t flat) {
    const auto q = static_cast<std::size_t>(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    if (q == 0) {
      coeffs[flat] = t0;
    } else {
      coeffs[flat] = cumulative[q] / (norm * std::pow(static_cast<double>(q), 0.5 * (2.0 * sv + dd)));
    }
  });
  return StiffnessKernel(dim, s, n_fd, Scheme::Spectral, std::move(coeffs));
}

StiffnessKernel modified_spectral(FractionalOrder s, int dim, int n_fd, int m, int n_gauss) {
  const StiffnessKernel regular = fft_regularized_part(s, dim, n_fd, m);
  const StiffnessKernel ball = spectral(s, dim, n_fd, n_gauss);
  std::vector<double> coeffs(regular.coefficients().size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] = regular[i] + ball[i];
  return StiffnessKernel(dim, s, n_fd, Scheme::ModifiedSpectral, std::move(coeffs));
}

StiffnessKernel build_kernel(const KernelSpec& spec, FractionalOrder s, int dim, int n_fd) {
  switch (spec.scheme) {
    case Scheme::Analytic1D:
      if (dim != 1) throw std::invalid_argument("the analytic kernel exists only in one dimension");
      return analytic_1d(s, n_fd);
    case Scheme::FftUniform: return fft_uniform(s, dim, n_fd, spec.m);
    case Scheme::NonUniform: return nonuniform(s, dim, n_fd, spec.m);
    case Scheme::Spectral: return spectral(s, dim, n_fd, spec.n_gauss);
    case Scheme::ModifiedSpectral: return modified_spectral(s, dim, n_fd, spec.m, spec.n_gauss);
  }
  throw std::invalid_argument("unknown kernel scheme");
}

DecayProfile decay_profile(const StiffnessKernel& kernel) {
  const int dim = kernel.dim();
  std::vector<std::pair<double, double>> entries;
  entries.reserve(kernel.coefficients().size());
  for_each_offset(dim, kernel.extent(), [&](const std::array<int, 3>& p, std::size_t flat) {
    if (flat == 0) return;
    const double r = std::sqrt(static_cast<double>(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
    entries.emplace_back(r, std::abs(kernel[flat]));
  });
  std::sort(entries.begin(), entries.end());

  DecayProfile profile;
  profile.radii.reserve(entries.size());
  profile.magnitudes.reserve(entries.size());
  for (const auto& [r, t] : entries) {
    profile.radii.push_back(r);
    profile.magnitudes.push_back(t);
  }

  const double r_max = entries.empty() ? 0.0 : entries.back().first;
  const double floor = kDecayZeroThreshold * std::abs(kernel[0]);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (const auto& [r, t] : entries) {
    if (r < 0.5 * r_max || !(t > floor)) continue;
    const double x = std::log(r);
    const double y = std::log(t);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 8) {
    throw std::runtime_error("decay fit needs at least 8 nonzero tail entries, found " + std::to_string(n));
  }
  const double nd = static_cast<double>(n);
  profile.fitted_slope = (nd * sxy - sx * sy) / (nd * sxx - sx * sx);
  profile.tail_points = n;
  return profile;
}

void write_kernel_csv(std::ostream& out, const StiffnessKernel& kernel) {
  const int dim = kernel.dim();
  for (int d = 0; d < dim; ++d) out << 'p' << (d + 1) << ',';
  out << "T\n";
  out << std::scientific << std::setprecision(16);
  for_each_offset(dim, kernel.extent(), [&](const std::array<int, 3>& p, std::size_t flat) {
    for (int d = 0; d < dim; ++d) out << p[d] << ',';
    out << kernel[flat] << '\n';
  });
  out << std::defaultfloat;
}

void write_decay_csv(std::ostream& out, const DecayProfile& profile) {
  out << "abs_p,abs_T\n" << std::scientific << std::setprecision(16);
  for (std::size_t i = 0; i < profile.radii.size(); ++i) {
    out << profile.radii[i] << ',' << profile.magnitudes[i] << '\n';
  }
  out << std::defaultfloat;
}

double max_error_vs_analytic(const StiffnessKernel& kernel) {
  if (kernel.dim() != 1) throw std::invalid_argument("analytic comparison is only defined in 1D");
  const StiffnessKernel exact = analytic_1d(kernel.order(), kernel.n_fd());
  double err = 0.0;
  for (std::size_t i = 0; i < exact.coefficients().size(); ++i) {
    err = std::max(err, std::abs(kernel[i] - exact[i]));
  }
  return err;
}

}  // namespace gofd
