#include "gofd/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

namespace gofd {

namespace {

constexpr double kRankTolerance = 1e-13;
// Largest rows x cols product counted by the dense fallback.
constexpr double kDenseRankLimit = 2.5e7;

}  // namespace

int default_grid_cap(int dim) { return dim >= 3 ? 256 : 4096; }

OverlayGrid choose_grid(const MeshQuality& quality, int dim, double r_fd, GridCondition condition, int cap) {
  if (!(quality.a_h > 0.0)) throw std::invalid_argument("mesh quality a_h must be positive");
  if (!(r_fd > 0.0)) throw std::invalid_argument("r_fd must be positive");
  if (cap <= 0) cap = default_grid_cap(dim);
  double bound = quality.a_h;
  if (condition == GridCondition::Strict) bound /= (dim + 1) * std::sqrt(static_cast<double>(dim));

  const double estimate = std::ceil(r_fd / bound);
  if (estimate > static_cast<double>(cap) + 1.0) {
    throw std::length_error("overlay grid needs n_fd = " + std::to_string(static_cast<long long>(estimate)) +
                            ", above the cap of " + std::to_string(cap));
  }
  int n = std::max(1, static_cast<int>(estimate));
  // Correct for rounding in the division so that n is exactly the smallest admissible value.
  while (n > 1 && r_fd / (n - 1) <= bound) --n;
  while (r_fd / n > bound) ++n;
  if (n > cap) {
    throw std::length_error("overlay grid needs n_fd = " + std::to_string(n) + ", above the cap of " +
                            std::to_string(cap));
  }
  return OverlayGrid(dim, r_fd, n);
}

TransferMatrix::TransferMatrix(OverlayGrid grid, Sparse matrix)
    : grid_(std::move(grid)), matrix_(std::move(matrix)) {
  if (static_cast<std::size_t>(matrix_.rows()) != grid_.node_count()) {
    throw std::invalid_argument("transfer matrix rows must match the grid node count");
  }
  matrix_.makeCompressed();
  column_sums_.assign(static_cast<std::size_t>(matrix_.cols()), 0.0);
  for (Eigen::Index r = 0; r < matrix_.outerSize(); ++r) {
    for (Sparse::InnerIterator it(matrix_, r); it; ++it) column_sums_[static_cast<std::size_t>(it.col())] += it.value();
  }
}

std::vector<std::size_t> TransferMatrix::empty_columns() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < column_sums_.size(); ++j) {
    if (!(column_sums_[j] > 0.0)) out.push_back(j);
  }
  return out;
}

void TransferMatrix::apply(std::span<const double> u_mesh, std::span<double> v_grid) const {
  if (u_mesh.size() != cols() || v_grid.size() != rows()) throw std::invalid_argument("transfer apply: dimension mismatch");
  Eigen::Map<const Eigen::VectorXd> u(u_mesh.data(), static_cast<Eigen::Index>(u_mesh.size()));
  Eigen::Map<Eigen::VectorXd> v(v_grid.data(), static_cast<Eigen::Index>(v_grid.size()));
  v.noalias() = matrix_ * u;
}

void TransferMatrix::apply_transpose(std::span<const double> v_grid, std::span<double> u_mesh) const {
  if (u_mesh.size() != cols() || v_grid.size() != rows()) {
    throw std::invalid_argument("transfer transpose apply: dimension mismatch");
  }
  Eigen::Map<const Eigen::VectorXd> v(v_grid.data(), static_cast<Eigen::Index>(v_grid.size()));
  Eigen::Map<Eigen::VectorXd> u(u_mesh.data(), static_cast<Eigen::Index>(u_mesh.size()));
  u.noalias() = matrix_.transpose() * v;
}

TransferMatrix build_transfer(const SimplicialMesh& mesh, const OverlayGrid& grid, bool strict) {
  const int dim = mesh.dim();
  if (grid.dim() != dim) throw std::invalid_argument("grid and mesh dimensions differ");
  const double r = grid.r_fd();
  for (const Point& p : mesh.vertices()) {
    for (int d = 0; d < dim; ++d) {
      if (std::abs(p[d]) > r) throw std::invalid_argument("the overlay grid cube must contain the mesh");
    }
  }

  constexpr double kTol = 1e-12;
  const double h = grid.h();
  const int n = grid.n_fd();
  const auto ni = mesh.n_interior();
  std::vector<char> owned(grid.node_count(), 0);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(grid.node_count());

  using Small = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
  Small b(dim, dim);
  Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1> rhs(dim);
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};
  std::array<int, 3> k{0, 0, 0};
  std::array<double, 4> lambda{};

  for (std::size_t s = 0; s < mesh.simplex_count(); ++s) {
    const auto idx = mesh.simplex(s);
    const Point& v0 = mesh.vertices()[static_cast<std::size_t>(idx[0])];
    for (int d = 0; d < dim; ++d) {
      double mn = v0[d];
      double mx = v0[d];
      for (int i = 1; i <= dim; ++i) {
        const double c = mesh.vertices()[static_cast<std::size_t>(idx[i])][d];
        mn = std::min(mn, c);
        mx = std::max(mx, c);
        b(d, i - 1) = c - v0[d];
      }
      lo[d] = std::max(-n, static_cast<int>(std::ceil(mn / h - 1e-9)));
      hi[d] = std::min(n, static_cast<int>(std::floor(mx / h + 1e-9)));
      if (lo[d] > hi[d]) break;
    }
    bool empty = false;
    for (int d = 0; d < dim; ++d) empty = empty || lo[d] > hi[d];
    if (empty) continue;
    const Small inv = b.inverse();

    k = lo;
    while (true) {
      const std::size_t node = grid.flat_index(std::span<const int>(k.data(), static_cast<std::size_t>(dim)));
      if (!owned[node]) {
        for (int d = 0; d < dim; ++d) rhs(d) = k[d] * h - v0[d];
        const auto bary = (inv * rhs).eval();
        double sum = 0.0;
        bool inside = true;
        for (int i = 0; i < dim; ++i) {
          lambda[i + 1] = bary(i);
          sum += bary(i);
          inside = inside && bary(i) >= -kTol;
        }
        lambda[0] = 1.0 - sum;
        inside = inside && lambda[0] >= -kTol;
        if (inside) {
          owned[node] = 1;
          for (int i = 0; i <= dim; ++i) {
            const auto v = static_cast<std::size_t>(idx[i]);
            const double w = std::clamp(lambda[i], 0.0, 1.0);
            if (v < ni && w > 0.0) {
              entries.emplace_back(static_cast<int>(node), static_cast<int>(v), w);
            }
          }
        }
      }
      int d = dim - 1;
      while (d >= 0 && ++k[d] > hi[d]) {
        k[d] = lo[d];
        --d;
      }
      if (d < 0) break;
    }
  }

  TransferMatrix::Sparse matrix(static_cast<Eigen::Index>(grid.node_count()), static_cast<Eigen::Index>(ni));
  matrix.setFromTriplets(entries.begin(), entries.end());
  TransferMatrix transfer(grid, std::move(matrix));
  if (strict) {
    auto empty_cols = transfer.empty_columns();
    if (!empty_cols.empty()) {
      throw TransferError(std::to_string(empty_cols.size()) +
                              " interior vertices have no overlay-grid node in their support; refine the grid",
                          std::move(empty_cols));
    }
  }
  return transfer;
}

RankCheckResult column_rank_check(const TransferMatrix& transfer, RankCheckMode mode) {
  RankCheckResult result;
  if (mode == RankCheckMode::Auto) {
    mode = transfer.cols() <= kExactRankColumnLimit ? RankCheckMode::Exact : RankCheckMode::Heuristic;
  }
  result.mode = mode;
  if (transfer.cols() == 0) {
    result.full_rank = true;
    return result;
  }
  const auto& m = transfer.matrix();
  if (mode == RankCheckMode::Heuristic) {
    if (!transfer.empty_columns().empty()) return result;
    // Distinct leading rows put the columns in echelon form, which is sufficient for full rank.
    std::vector<long long> leading(transfer.cols(), std::numeric_limits<long long>::max());
    for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
      for (TransferMatrix::Sparse::InnerIterator it(m, r); it; ++it) {
        auto& l = leading[static_cast<std::size_t>(it.col())];
        l = std::min<long long>(l, r);
      }
    }
    std::sort(leading.begin(), leading.end());
    result.full_rank = std::adjacent_find(leading.begin(), leading.end()) == leading.end();
    return result;
  }

  // Pivots of an LDL^T factorization of the Gram matrix I^T I; a pivot below
  // kRankTolerance times the largest one counts as a rank deficiency.
  // Empty columns add nothing to the rank; factor the Gram matrix of the rest.
  Eigen::SparseMatrix<double> t = m;
  const auto empty_columns = transfer.empty_columns();
  if (!empty_columns.empty()) {
    std::vector<char> empty(transfer.cols(), 0);
    for (auto c : empty_columns) empty[static_cast<std::size_t>(c)] = 1;
    std::vector<Eigen::Triplet<double>> kept;
    std::vector<int> new_col(transfer.cols(), -1);
    int next = 0;
    for (std::size_t c = 0; c < transfer.cols(); ++c) {
      if (!empty[c]) new_col[c] = next++;
    }
    for (Eigen::Index k = 0; k < t.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(t, k); it; ++it) {
        kept.emplace_back(it.row(), new_col[static_cast<std::size_t>(it.col())], it.value());
      }
    }
    if (next == 0) return result;
    t = Eigen::SparseMatrix<double>(t.rows(), next);
    t.setFromTriplets(kept.begin(), kept.end());
  }
  Eigen::SparseMatrix<double> gram = t.transpose() * t;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(gram);
  if (ldlt.info() != Eigen::Success) {
    // An exactly zero pivot already rules out full rank; count the rank densely when affordable.
    if (static_cast<double>(t.rows()) * static_cast<double>(t.cols()) <= kDenseRankLimit) {
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr{Eigen::MatrixXd(t)};
      qr.setThreshold(std::sqrt(kRankTolerance));
      result.rank = static_cast<std::size_t>(qr.rank());
    }
    return result;
  }
  const Eigen::VectorXd pivots = ldlt.vectorD();
  const double largest = pivots.cwiseAbs().maxCoeff();
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < pivots.size(); ++i) {
    if (pivots(i) > kRankTolerance * largest) ++rank;
  }
  result.rank = rank;
  result.full_rank = rank == transfer.cols();
  return result;
}

void write_transfer_coordinates(std::ostream& out, const TransferMatrix& transfer) {
  const auto& m = transfer.matrix();
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    for (TransferMatrix::Sparse::InnerIterator it(m, r); it; ++it) {
      out << r << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

}  // namespace gofd
