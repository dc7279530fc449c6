#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gofd/grid.hpp"

namespace gofd {

enum class Scheme { Analytic1D, FftUniform, NonUniform, Spectral, ModifiedSpectral };

std::string_view to_string(Scheme scheme);
/// Accepts the CLI spellings: analytic, fft, nufft, spectral, modspec.
Scheme parse_scheme(std::string_view name);

/// Stiffness kernel T_p of the uniform-grid fractional Laplacian.
///
/// Only the nonnegative orthant 0 <= p_j <= 2 n_fd is stored; the remaining
/// entries follow from T_{..,-p_j,..} = T_{..,p_j,..}. Coefficients are laid
/// out row-major with the last axis fastest.
class StiffnessKernel {
 public:
  StiffnessKernel(int dim, FractionalOrder s, int n_fd, Scheme scheme, std::vector<double> coeffs);

  int dim() const noexcept { return dim_; }
  FractionalOrder order() const noexcept { return s_; }
  int n_fd() const noexcept { return n_fd_; }
  Scheme scheme() const noexcept { return scheme_; }

  /// Offsets per axis in the stored orthant, 2 n_fd + 1.
  int extent() const noexcept { return 2 * n_fd_ + 1; }
  std::span<const double> coefficients() const noexcept { return coeffs_; }

  /// Skips the T_0 > 0 check; used for partial kernels that are summed later.
  static StiffnessKernel unchecked(int dim, FractionalOrder s, int n_fd, Scheme scheme,
                                   std::vector<double> coeffs);

  /// T at a signed offset with |p_j| <= 2 n_fd.
  double at(std::span<const int> offset) const;
  double operator[](std::size_t flat) const noexcept { return coeffs_[flat]; }

  /// Same kernel restricted to a smaller overlay grid. None of the schemes
  /// depend on n_fd beyond the index range, so this is exact.
  StiffnessKernel truncated(int n_fd) const;

  friend bool operator==(const StiffnessKernel&, const StiffnessKernel&) = default;

 private:
  StiffnessKernel(int dim, FractionalOrder s, int n_fd, Scheme scheme)
      : dim_(dim), s_(s), n_fd_(n_fd), scheme_(scheme) {}

  int dim_;
  FractionalOrder s_;
  int n_fd_;
  Scheme scheme_;
  std::vector<double> coeffs_;
};

/// Closed-form 1D kernel (-1)^p Gamma(2s+1) / (Gamma(p+s+1) Gamma(s-p+1)).
StiffnessKernel analytic_1d(FractionalOrder s, int n_fd);

/// Trapezoidal rule on M uniform samples per axis, evaluated with FFTs.
StiffnessKernel fft_uniform(FractionalOrder s, int dim, int n_fd, int m);

/// Only the first term of the modified spectral kernel: the FFT treatment of
/// psi(xi) - |xi|^{2s}.
StiffnessKernel fft_regularized_part(FractionalOrder s, int dim, int n_fd, int m);

enum class NonUniformMethod {
  Auto,      ///< direct when M^dim <= 2^24, gridding otherwise
  Direct,    ///< separable direct summation
  Gridding,  ///< Gaussian-gridding type-1 transform per axis
};

/// Trapezoidal rule on the origin-clustered nodes xi_j = pi t_j |t_j|, t_j = 2j/M - 1.
StiffnessKernel nonuniform(FractionalOrder s, int dim, int n_fd, int m,
                           NonUniformMethod method = NonUniformMethod::Auto);

/// Ball-integral kernel of |xi|^{2s} over the ball with the volume of (-pi, pi)^dim.
StiffnessKernel spectral(FractionalOrder s, int dim, int n_fd, int n_gauss);

/// fft_regularized_part + spectral.
StiffnessKernel modified_spectral(FractionalOrder s, int dim, int n_fd, int m, int n_gauss);

/// Radius of the ball with the same volume as (-pi, pi)^dim.
double volume_matched_radius(int dim);

/// Parameters that select and configure one of the kernel schemes.
struct KernelSpec {
  Scheme scheme = Scheme::FftUniform;
  int m = 1 << 14;
  int n_gauss = 64;
};

StiffnessKernel build_kernel(const KernelSpec& spec, FractionalOrder s, int dim, int n_fd);

struct DecayProfile {
  std::vector<double> radii;
  std::vector<double> magnitudes;
  double fitted_slope = 0.0;
  std::size_t tail_points = 0;
};

/// Magnitudes below this fraction of |T_0| count as zero in the tail fit.
inline constexpr double kDecayZeroThreshold = 1e-12;

/// (|p|, |T_p|) for every stored offset p != 0, plus the least-squares slope
/// of log|T_p| against log|p| over the entries with |p| >= max|p| / 2 and
/// |T_p| above the zero threshold. Throws std::runtime_error when fewer than
/// 8 such entries remain.
DecayProfile decay_profile(const StiffnessKernel& kernel);

/// CSV with header p1[,p2[,p3]],T and 17 significant digits.
void write_kernel_csv(std::ostream& out, const StiffnessKernel& kernel);
void write_decay_csv(std::ostream& out, const DecayProfile& profile);

/// Max-norm difference of a 1D kernel against the closed form.
double max_error_vs_analytic(const StiffnessKernel& kernel);

}  // namespace gofd
