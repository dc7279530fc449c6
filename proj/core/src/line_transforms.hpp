#pragma once

// Separable cosine sums used by the FFT and non-uniform kernel schemes.
//
// Every sampling grid used for the kernel is symmetric about the origin on
// each axis, so a line of samples is described by its "half": the samples
// with xi_j <= 0, j = 0 .. M/2. A line transform maps such a half line to
// out_k = sum over the full line of x_j * cos(k * xi_j), k = 0 .. P-1,
// including whatever quadrature weights the scheme attaches to xi_j.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "fftw_util.hpp"

namespace gofd::detail {

class LineTransform {
 public:
  virtual ~LineTransform() = default;
  virtual int half_length() const = 0;
  virtual int outputs() const = 0;
  /// Not reentrant: implementations own scratch buffers.
  virtual void apply(std::span<const double> half, std::span<double> out) = 0;
};

/// Uniform trapezoid on xi_j = pi (2j/M - 1), j = 0 .. M-1, via a length-M real FFT.
/// Computes sum_j x_j cos(2 pi j k / M) (no sign flip, no 1/M).
class UniformEvenTransform final : public LineTransform {
 public:
  UniformEvenTransform(int m, int outputs);
  int half_length() const override { return m_ / 2 + 1; }
  int outputs() const override { return outputs_; }
  void apply(std::span<const double> half, std::span<double> out) override;

  /// Largest |Im| / max|Re| seen so far; the exact transform is real.
  double imaginary_residue() const noexcept { return max_imag_ / (max_real_ > 0 ? max_real_ : 1.0); }

 private:
  int m_;
  int outputs_;
  RealBuffer line_;
  ComplexBuffer spectrum_;
  FftwPlan plan_;
  double max_imag_ = 0.0;
  double max_real_ = 0.0;
};

/// Node set and trapezoid weights of the origin-clustered grid with M + 1 nodes.
struct ClusteredNodes {
  explicit ClusteredNodes(int m);
  int m;
  std::vector<double> xi;      ///< j = 0 .. M
  std::vector<double> weight;  ///< composite trapezoid, one-sided at both ends
};

/// Weighted cosine sum at the clustered nodes by dense direct summation.
class ClusteredDirectTransform final : public LineTransform {
 public:
  ClusteredDirectTransform(const ClusteredNodes& nodes, int outputs);
  int half_length() const override { return half_; }
  int outputs() const override { return outputs_; }
  void apply(std::span<const double> half, std::span<double> out) override;

 private:
  int half_;
  int outputs_;
  std::vector<double> matrix_;  ///< outputs x half, row-major
};

/// Weighted cosine sum at the clustered nodes by a type-1 non-uniform FFT with
/// Gaussian gridding (oversampling 2, `spread` grid points on each side).
class ClusteredGriddingTransform final : public LineTransform {
 public:
  ClusteredGriddingTransform(const ClusteredNodes& nodes, int outputs, int spread = 12);
  int half_length() const override { return half_; }
  int outputs() const override { return outputs_; }
  void apply(std::span<const double> half, std::span<double> out) override;

 private:
  static std::size_t next_even(std::size_t n);

  int m_;
  int half_;
  int outputs_;
  int spread_;
  int fine_size_;
  std::vector<double> weight_;       ///< trapezoid weight times multiplicity, per half node
  std::vector<int> start_;           ///< first fine-grid index touched by node j
  std::vector<double> kernel_;       ///< half nodes x 2*spread Gaussian values
  std::vector<double> deconvolve_;   ///< per output k
  RealBuffer fine_;
  ComplexBuffer spectrum_;
  FftwPlan plan_;
};

/// Separable d-dimensional cosine sum over a symmetric tensor grid.
///
/// `fill_line(outer, line)` writes the half line along the last axis for the
/// fixed outer half-indices `outer` (size dim - 1). Returns the P^dim output
/// tensor, last axis fastest. Every axis uses the same transform.
std::vector<double> separable_even_transform(
    int dim, LineTransform& transform,
    const std::function<void(std::span<const int> outer, std::span<double> line)>& fill_line);

}  // namespace gofd::detail
