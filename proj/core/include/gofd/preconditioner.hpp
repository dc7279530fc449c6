#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "gofd/mic.hpp"
#include "gofd/operator.hpp"

namespace gofd {

enum class PreconditionerKind { None, Sparse, Circulant };

std::string_view to_string(PreconditionerKind kind);
/// Accepts none, sparse, circulant.
PreconditionerKind parse_preconditioner(std::string_view name);

/// Symmetric approximation of the inverse system matrix. Positive definite
/// except for the circulant variant built from a kernel whose symbol changes sign.
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual PreconditionerKind kind() const noexcept = 0;
  /// z = M r. Not reentrant.
  virtual void apply(std::span<const double> r, std::span<double> z) const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
 public:
  PreconditionerKind kind() const noexcept override { return PreconditionerKind::None; }
  void apply(std::span<const double> r, std::span<double> z) const override;
};

/// Offsets with max-norm <= 1 (3, 9 or 27 of them) of the kernel, sandwiched as
/// I^T A_stencil I and factored by modified incomplete Cholesky.
class SparsePreconditioner final : public Preconditioner {
 public:
  explicit SparsePreconditioner(const GoFDOperator& op, double drop_tol = 1e-3);

  PreconditionerKind kind() const noexcept override { return PreconditionerKind::Sparse; }
  void apply(std::span<const double> r, std::span<double> z) const override;

  /// I^T A_stencil I (full symmetric storage).
  const Eigen::SparseMatrix<double>& stencil_matrix() const noexcept { return stencil_; }
  const IncompleteCholesky& factor() const noexcept { return factor_; }

 private:
  static Eigen::SparseMatrix<double> assemble(const GoFDOperator& op);

  Eigen::SparseMatrix<double> stencil_;
  IncompleteCholesky factor_;
};

/// Inverse of the periodic operator on the (2 n_fd)^dim torus generated by the
/// kernel offsets -n_fd .. n_fd - 1, diagonalized by the DFT.
class CirculantInverse {
 public:
  explicit CirculantInverse(const StiffnessKernel& kernel);
  ~CirculantInverse();
  CirculantInverse(CirculantInverse&&) noexcept;
  CirculantInverse& operator=(CirculantInverse&&) noexcept;

  int dim() const noexcept { return dim_; }
  int period() const noexcept { return period_; }
  std::size_t size() const noexcept { return size_; }

  /// Real eigenvalues in r2c layout, after clamping. Eigenvalues with magnitude
  /// below kFloor * max|lambda| are replaced by that floor; larger negative
  /// eigenvalues are kept, so kernels whose symbol changes sign give an
  /// indefinite circulant.
  const std::vector<double>& symbol() const noexcept { return symbol_; }
  /// Eigenvalues before clamping.
  const std::vector<double>& raw_symbol() const noexcept { return raw_symbol_; }
  std::size_t clamped_count() const noexcept { return clamped_; }
  std::size_t negative_count() const noexcept { return negative_; }

  /// x <- C^{-1} x (clamped symbol).
  void solve_in_place(std::span<double> x) const;
  /// x <- C x (unclamped symbol, i.e. the circulant itself).
  void multiply_in_place(std::span<double> x) const;

  /// Relative clamping floor on the eigenvalues.
  static constexpr double kFloor = 1e-8;

 private:
  struct Transform;
  void filter(std::span<double> x, const std::vector<double>& factor, bool invert) const;

  int dim_;
  int period_;
  std::size_t size_;
  std::unique_ptr<Transform> transform_;
  std::vector<double> symbol_;
  std::vector<double> raw_symbol_;
  std::size_t clamped_ = 0;
  std::size_t negative_ = 0;
};

/// The operator must outlive the preconditioner.
///
/// M = C^{-1} I^T E Ã^{-1} E^T I C^{-1}, where C = MIC(I^T I), Ã is the
/// circulant and E copies torus values onto the overlay grid periodically.
class CirculantPreconditioner final : public Preconditioner {
 public:
  explicit CirculantPreconditioner(const GoFDOperator& op, double drop_tol = 1e-3);

  PreconditionerKind kind() const noexcept override { return PreconditionerKind::Circulant; }
  void apply(std::span<const double> r, std::span<double> z) const override;

  const CirculantInverse& circulant() const noexcept { return circulant_; }
  const IncompleteCholesky& gram_factor() const noexcept { return gram_; }

  /// E^T: fold a grid vector onto the torus.
  void fold(std::span<const double> grid, std::span<double> torus) const;
  /// E: periodic copy of a torus vector onto the grid.
  void unfold(std::span<const double> torus, std::span<double> grid) const;

 private:
  const TransferMatrix* transfer_;
  CirculantInverse circulant_;
  IncompleteCholesky gram_;
  std::vector<std::size_t> torus_index_;  ///< per grid node
  mutable std::vector<double> mesh_buf_;
  mutable std::vector<double> grid_buf_;
  mutable std::vector<double> torus_buf_;
};

std::unique_ptr<Preconditioner> make_preconditioner(PreconditionerKind kind, const GoFDOperator& op);

}  // namespace gofd
