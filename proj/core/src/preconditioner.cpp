#include "gofd/preconditioner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fftw_util.hpp"

namespace gofd {

std::string_view to_string(PreconditionerKind kind) {
  switch (kind) {
    case PreconditionerKind::None: return "none";
    case PreconditionerKind::Sparse: return "sparse";
    case PreconditionerKind::Circulant: return "circulant";
  }
  return "unknown";
}

PreconditionerKind parse_preconditioner(std::string_view name) {
  if (name == "none") return PreconditionerKind::None;
  if (name == "sparse") return PreconditionerKind::Sparse;
  if (name == "circulant") return PreconditionerKind::Circulant;
  throw std::invalid_argument("unknown preconditioner '" + std::string(name) + "'");
}

void IdentityPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  if (r.size() != z.size()) throw std::invalid_argument("preconditioner size mismatch");
  std::copy(r.begin(), r.end(), z.begin());
}

Eigen::SparseMatrix<double> SparsePreconditioner::assemble(const GoFDOperator& op) {
  const auto& transfer = op.transfer();
  const auto& grid = op.grid();
  const auto& t = transfer.matrix();
  const int dim = grid.dim();

  std::vector<long long> active(grid.node_count(), -1);
  std::vector<std::size_t> nodes;
  for (Eigen::Index r = 0; r < t.outerSize(); ++r) {
    if (t.outerIndexPtr()[r + 1] > t.outerIndexPtr()[r]) {
      active[static_cast<std::size_t>(r)] = static_cast<long long>(nodes.size());
      nodes.push_back(static_cast<std::size_t>(r));
    }
  }

  std::vector<std::array<int, 3>> offsets;
  for (int a = -1; a <= 1; ++a) {
    for (int b = (dim >= 2 ? -1 : 0); b <= (dim >= 2 ? 1 : 0); ++b) {
      for (int c = (dim >= 3 ? -1 : 0); c <= (dim >= 3 ? 1 : 0); ++c) offsets.push_back({a, b, c});
    }
  }

  const int n = grid.n_fd();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(nodes.size() * offsets.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto k = grid.node_coords(nodes[i]);
    for (const auto& o : offsets) {
      std::array<int, 3> q{k[0] + o[0], k[1] + o[1], k[2] + o[2]};
      bool inside = true;
      for (int d = 0; d < dim; ++d) inside = inside && q[d] >= -n && q[d] <= n;
      if (!inside) continue;
      const long long j = active[grid.flat_index(std::span<const int>(q.data(), static_cast<std::size_t>(dim)))];
      if (j < 0) continue;
      const double value = op.kernel().at(std::span<const int>(o.data(), static_cast<std::size_t>(dim)));
      entries.emplace_back(static_cast<int>(i), static_cast<int>(j), value);
    }
  }
  Eigen::SparseMatrix<double> a_s(static_cast<Eigen::Index>(nodes.size()), static_cast<Eigen::Index>(nodes.size()));
  a_s.setFromTriplets(entries.begin(), entries.end());

  std::vector<Eigen::Triplet<double>> rows;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (TransferMatrix::Sparse::InnerIterator it(t, static_cast<Eigen::Index>(nodes[i])); it; ++it) {
      rows.emplace_back(static_cast<int>(i), static_cast<int>(it.col()), it.value());
    }
  }
  Eigen::SparseMatrix<double> t_active(static_cast<Eigen::Index>(nodes.size()), t.cols());
  t_active.setFromTriplets(rows.begin(), rows.end());

  Eigen::SparseMatrix<double> product = t_active.transpose() * (a_s * t_active);
  // Symmetrize away the rounding asymmetry of the triple product.
  Eigen::SparseMatrix<double> sym = 0.5 * (product + Eigen::SparseMatrix<double>(product.transpose()));
  sym.makeCompressed();
  return sym;
}

SparsePreconditioner::SparsePreconditioner(const GoFDOperator& op, double drop_tol)
    : stencil_(assemble(op)), factor_(stencil_, drop_tol, true) {}

void SparsePreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  if (r.size() != z.size() || r.size() != factor_.size()) throw std::invalid_argument("preconditioner size mismatch");
  std::copy(r.begin(), r.end(), z.begin());
  factor_.solve_in_place(z);
}

struct CirculantInverse::Transform {
  explicit Transform(std::vector<int> shape) : pair(std::move(shape)) {}
  detail::RealTransformPair pair;
  mutable detail::RealBuffer real;
  mutable detail::ComplexBuffer spectrum;
};

CirculantInverse::~CirculantInverse() = default;
CirculantInverse::CirculantInverse(CirculantInverse&&) noexcept = default;
CirculantInverse& CirculantInverse::operator=(CirculantInverse&&) noexcept = default;

CirculantInverse::CirculantInverse(const StiffnessKernel& kernel)
    : dim_(kernel.dim()), period_(2 * kernel.n_fd()), size_(1) {
  for (int d = 0; d < dim_; ++d) size_ *= static_cast<std::size_t>(period_);
  transform_ = std::make_unique<Transform>(std::vector<int>(static_cast<std::size_t>(dim_), period_));
  auto& tr = *transform_;
  tr.real = detail::RealBuffer(tr.pair.real_size());
  tr.spectrum = detail::ComplexBuffer(tr.pair.complex_size());

  // Torus index i holds offset i for i < n and i - 2n otherwise.
  const int n = kernel.n_fd();
  const auto p = static_cast<std::size_t>(period_);
  std::array<int, 3> offset{0, 0, 0};
  for (std::size_t flat = 0; flat < size_; ++flat) {
    std::size_t rest = flat;
    for (int d = dim_ - 1; d >= 0; --d) {
      const int i = static_cast<int>(rest % p);
      rest /= p;
      offset[d] = i < n ? i : i - period_;
    }
    tr.real[flat] = kernel.at(std::span<const int>(offset.data(), static_cast<std::size_t>(dim_)));
  }
  tr.pair.forward(tr.real.data(), tr.spectrum.data());
  raw_symbol_.resize(tr.pair.complex_size());
  double max_abs = 0.0;
  for (std::size_t i = 0; i < raw_symbol_.size(); ++i) {
    raw_symbol_[i] = tr.spectrum[i][0];
    max_abs = std::max(max_abs, std::abs(raw_symbol_[i]));
  }
  const double floor = kFloor * max_abs;
  symbol_ = raw_symbol_;
  for (double& v : symbol_) {
    if (std::abs(v) < floor) {
      v = floor;
      ++clamped_;
    } else if (v < 0.0) {
      ++negative_;
    }
  }
}

void CirculantInverse::filter(std::span<double> x, const std::vector<double>& factor, bool invert) const {
  if (x.size() != size_) throw std::invalid_argument("circulant size mismatch");
  auto& tr = *transform_;
  std::copy(x.begin(), x.end(), tr.real.data());
  tr.pair.forward(tr.real.data(), tr.spectrum.data());
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t i = 0; i < factor.size(); ++i) {
    const double f = (invert ? 1.0 / factor[i] : factor[i]) * scale;
    tr.spectrum[i][0] *= f;
    tr.spectrum[i][1] *= f;
  }
  tr.pair.inverse(tr.spectrum.data(), tr.real.data());
  std::copy(tr.real.data(), tr.real.data() + size_, x.begin());
}

void CirculantInverse::solve_in_place(std::span<double> x) const { filter(x, symbol_, true); }

void CirculantInverse::multiply_in_place(std::span<double> x) const { filter(x, raw_symbol_, false); }

namespace {

Eigen::SparseMatrix<double> gram_matrix(const TransferMatrix& transfer) {
  Eigen::SparseMatrix<double> t = transfer.matrix();
  Eigen::SparseMatrix<double> g = t.transpose() * t;
  g.makeCompressed();
  return g;
}

}  // namespace

CirculantPreconditioner::CirculantPreconditioner(const GoFDOperator& op, double drop_tol)
    : transfer_(&op.transfer()),
      circulant_(op.kernel()),
      gram_(gram_matrix(op.transfer()), drop_tol, true),
      mesh_buf_(op.size()),
      grid_buf_(op.grid().node_count()),
      torus_buf_(circulant_.size()) {
  const auto& grid = op.grid();
  const int dim = grid.dim();
  const auto p = static_cast<std::size_t>(circulant_.period());
  torus_index_.resize(grid.node_count());
  for (std::size_t flat = 0; flat < grid.node_count(); ++flat) {
    const auto k = grid.node_coords(flat);
    std::size_t t = 0;
    for (int d = 0; d < dim; ++d) {
      const int wrapped = ((k[d] % circulant_.period()) + circulant_.period()) % circulant_.period();
      t = t * p + static_cast<std::size_t>(wrapped);
    }
    torus_index_[flat] = t;
  }
}

void CirculantPreconditioner::fold(std::span<const double> grid, std::span<double> torus) const {
  if (grid.size() != torus_index_.size() || torus.size() != circulant_.size()) {
    throw std::invalid_argument("fold: size mismatch");
  }
  std::fill(torus.begin(), torus.end(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) torus[torus_index_[i]] += grid[i];
}

void CirculantPreconditioner::unfold(std::span<const double> torus, std::span<double> grid) const {
  if (grid.size() != torus_index_.size() || torus.size() != circulant_.size()) {
    throw std::invalid_argument("unfold: size mismatch");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = torus[torus_index_[i]];
}

void CirculantPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  if (r.size() != z.size() || r.size() != mesh_buf_.size()) throw std::invalid_argument("preconditioner size mismatch");
  std::copy(r.begin(), r.end(), mesh_buf_.begin());
  gram_.solve_in_place(mesh_buf_);
  transfer_->apply(mesh_buf_, grid_buf_);
  fold(grid_buf_, torus_buf_);
  circulant_.solve_in_place(torus_buf_);
  unfold(torus_buf_, grid_buf_);
  transfer_->apply_transpose(grid_buf_, z);
  gram_.solve_in_place(z);
}

std::unique_ptr<Preconditioner> make_preconditioner(PreconditionerKind kind, const GoFDOperator& op) {
  switch (kind) {
    case PreconditionerKind::None: return std::make_unique<IdentityPreconditioner>();
    case PreconditionerKind::Sparse: return std::make_unique<SparsePreconditioner>(op);
    case PreconditionerKind::Circulant: return std::make_unique<CirculantPreconditioner>(op);
  }
  throw std::invalid_argument("unknown preconditioner kind");
}

}  // namespace gofd
