#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "gofd/grid.hpp"
#include "gofd/mesh.hpp"

namespace gofd {

enum class GridCondition {
  Practical,  ///< h_fd <= a_h
  Strict,     ///< h_fd <= a_h / ((d + 1) sqrt(d))
};

/// Default cap on n_fd: 4096 in 1D/2D, 256 in 3D.
int default_grid_cap(int dim);

/// Smallest overlay grid on (-r_fd, r_fd)^dim whose spacing satisfies `condition`.
/// Throws std::length_error when the required n_fd exceeds `cap` (0 selects the default).
OverlayGrid choose_grid(const MeshQuality& quality, int dim, double r_fd,
                        GridCondition condition = GridCondition::Practical, int cap = 0);

/// Piecewise-linear interpolation from interior mesh vertices to overlay-grid nodes.
class TransferMatrix {
 public:
  using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  TransferMatrix(OverlayGrid grid, Sparse matrix);

  const OverlayGrid& grid() const noexcept { return grid_; }
  const Sparse& matrix() const noexcept { return matrix_; }
  std::size_t rows() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(matrix_.cols()); }

  /// d_j, the column sums.
  const std::vector<double>& column_sums() const noexcept { return column_sums_; }
  /// Columns with d_j = 0; their basis functions miss every grid node.
  std::vector<std::size_t> empty_columns() const;

  /// v_grid = I u_mesh.
  void apply(std::span<const double> u_mesh, std::span<double> v_grid) const;
  /// u_mesh = I^T v_grid.
  void apply_transpose(std::span<const double> v_grid, std::span<double> u_mesh) const;

 private:
  OverlayGrid grid_;
  Sparse matrix_;
  std::vector<double> column_sums_;
};

class TransferError : public std::runtime_error {
 public:
  TransferError(const std::string& what, std::vector<std::size_t> columns)
      : std::runtime_error(what), columns_(std::move(columns)) {}
  const std::vector<std::size_t>& columns() const noexcept { return columns_; }

 private:
  std::vector<std::size_t> columns_;
};

/// Grid nodes on a shared facet belong to the lowest-index simplex containing them
/// (barycentric tolerance 1e-12). In strict mode an empty column raises TransferError.
TransferMatrix build_transfer(const SimplicialMesh& mesh, const OverlayGrid& grid, bool strict = false);

enum class RankCheckMode {
  Auto,       ///< exact for at most 5000 columns, heuristic otherwise
  Exact,      ///< pivots of a sparse LDL^T factorization of I^T I
  Heuristic,  ///< all d_j > 0 and distinct leading rows per column
};

struct RankCheckResult {
  bool full_rank = false;
  RankCheckMode mode = RankCheckMode::Auto;  ///< mode actually used
  std::size_t rank = 0;                     ///< exact mode only; 0 when too large to count
};

inline constexpr std::size_t kExactRankColumnLimit = 5000;

RankCheckResult column_rank_check(const TransferMatrix& transfer, RankCheckMode mode = RankCheckMode::Auto);

/// One `row col value` line per nonzero (0-based indices).
void write_transfer_coordinates(std::ostream& out, const TransferMatrix& transfer);

}  // namespace gofd
