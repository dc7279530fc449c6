#include "gofd/toeplitz.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

#include "gofd/dft.hpp"
#include "fftw_util.hpp"

namespace gofd {

namespace {

std::size_t grid_node_count(int dim, int n_fd) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  if (n_fd < 1) throw std::invalid_argument("n_fd must be at least 1");
  std::size_t n = 1;
  for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(2 * n_fd + 1);
  return n;
}

}  // namespace

GridVector::GridVector(int dim_, int n_fd_) : dim(dim_), n_fd(n_fd_), values(grid_node_count(dim_, n_fd_), 0.0) {}

GridVector::GridVector(int dim_, int n_fd_, std::vector<double> values_)
    : dim(dim_), n_fd(n_fd_), values(std::move(values_)) {
  if (values.size() != grid_node_count(dim, n_fd)) throw std::invalid_argument("grid vector size mismatch");
}

struct ToeplitzPlan::Transform {
  explicit Transform(std::vector<int> shape) : pair(std::move(shape)) {}
  detail::RealTransformPair pair;
};

struct ToeplitzPlan::Workspace::Buffers {
  explicit Buffers(const detail::RealTransformPair& pair)
      : real(pair.real_size()), spectrum(pair.complex_size()) {}
  detail::RealBuffer real;
  detail::ComplexBuffer spectrum;
};

ToeplitzPlan::Workspace::Workspace(const ToeplitzPlan& plan)
    : buffers_(std::make_unique<Buffers>(plan.transform_->pair)) {}
ToeplitzPlan::Workspace::~Workspace() = default;
ToeplitzPlan::Workspace::Workspace(Workspace&&) noexcept = default;
ToeplitzPlan::Workspace& ToeplitzPlan::Workspace::operator=(Workspace&&) noexcept = default;

ToeplitzPlan::~ToeplitzPlan() = default;
ToeplitzPlan::ToeplitzPlan(ToeplitzPlan&&) noexcept = default;
ToeplitzPlan& ToeplitzPlan::operator=(ToeplitzPlan&&) noexcept = default;

ToeplitzPlan::ToeplitzPlan(const StiffnessKernel& kernel)
    : dim_(kernel.dim()), n_fd_(kernel.n_fd()), grid_size_(grid_node_count(kernel.dim(), kernel.n_fd())) {
  // Offsets -2n..2n must land in distinct slots except +-2n, which carry the same value.
  length_ = static_cast<int>(next_fast_size(static_cast<std::size_t>(4 * n_fd_)));
  transform_ = std::make_unique<Transform>(std::vector<int>(static_cast<std::size_t>(dim_), length_));
  const auto& pair = transform_->pair;

  detail::RealBuffer generator(pair.real_size());
  std::fill(generator.data(), generator.data() + pair.real_size(), 0.0);
  const int reach = 2 * n_fd_;
  const auto e = static_cast<std::size_t>(kernel.extent());
  const auto l = static_cast<std::size_t>(length_);
  auto fold = [&](std::size_t i) -> int {
    if (i <= static_cast<std::size_t>(reach)) return static_cast<int>(i);
    if (i >= l - static_cast<std::size_t>(reach)) return static_cast<int>(l - i);
    return -1;
  };
  for (std::size_t flat = 0; flat < pair.real_size(); ++flat) {
    std::size_t rest = flat;
    std::size_t src = 0;
    std::size_t stride = 1;
    bool inside = true;
    for (int d = dim_ - 1; d >= 0; --d) {
      const int off = fold(rest % l);
      rest /= l;
      if (off < 0) {
        inside = false;
        break;
      }
      src += static_cast<std::size_t>(off) * stride;
      stride *= e;
    }
    if (inside) generator[flat] = kernel[src];
  }

  detail::ComplexBuffer spectrum(pair.complex_size());
  pair.forward(generator.data(), spectrum.data());
  // The generator is real and even, so its transform is real.
  const double scale = 1.0 / static_cast<double>(pair.real_size());
  symbol_.resize(pair.complex_size());
  for (std::size_t i = 0; i < symbol_.size(); ++i) symbol_[i] = spectrum[i][0] * scale;
}

void ToeplitzPlan::apply(std::span<const double> u, std::span<double> v, Workspace& work) const {
  if (u.size() != grid_size_ || v.size() != grid_size_) {
    throw std::invalid_argument("Toeplitz apply: vector size " + std::to_string(u.size()) +
                                " does not match grid size " + std::to_string(grid_size_));
  }
  auto& buf = *work.buffers_;
  const auto& pair = transform_->pair;
  const auto l = static_cast<std::size_t>(length_);
  const auto m = static_cast<std::size_t>(2 * n_fd_ + 1);
  double* real = buf.real.data();
  std::fill(real, real + pair.real_size(), 0.0);

  // Grid node (a, b, c) sits at embedding index (a, b, c) with zero padding after it.
  const std::size_t rows = grid_size_ / m;
  auto embed_row = [&](std::size_t r) {
    std::size_t offset = 0;
    std::size_t rest = r;
    std::size_t stride = l;
    for (int d = dim_ - 2; d >= 0; --d) {
      offset += (rest % m) * stride;
      rest /= m;
      stride *= l;
    }
    return offset;
  };
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(u.data() + r * m, m, real + embed_row(r));
  }
  pair.forward(real, buf.spectrum.data());
  for (std::size_t i = 0; i < symbol_.size(); ++i) {
    buf.spectrum[i][0] *= symbol_[i];
    buf.spectrum[i][1] *= symbol_[i];
  }
  pair.inverse(buf.spectrum.data(), real);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(real + embed_row(r), m, v.data() + r * m);
  }
}

void ToeplitzPlan::apply(std::span<const double> u, std::span<double> v) const {
  Workspace work(*this);
  apply(u, v, work);
}

GridVector ToeplitzPlan::apply(const GridVector& u) const {
  if (u.dim != dim_ || u.n_fd != n_fd_) throw std::invalid_argument("Toeplitz apply: grid shape mismatch");
  GridVector v(dim_, n_fd_);
  apply(u.values, v.values);
  return v;
}

Eigen::MatrixXd dense_materialize(const StiffnessKernel& kernel) {
  const OverlayGrid grid(kernel.dim(), 1.0, kernel.n_fd());
  const std::size_t n = grid.node_count();
  if (n > kDenseMaterializeLimit) {
    throw std::length_error("dense materialization limited to " + std::to_string(kDenseMaterializeLimit) +
                            " grid nodes, requested " + std::to_string(n));
  }
  const int dim = kernel.dim();
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::array<int, 3> offset{};
  for (std::size_t j = 0; j < n; ++j) {
    const auto kj = grid.node_coords(j);
    for (std::size_t m = 0; m < n; ++m) {
      const auto km = grid.node_coords(m);
      for (int d = 0; d < dim; ++d) offset[d] = kj[d] - km[d];
      a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m)) =
          kernel.at(std::span<const int>(offset.data(), static_cast<std::size_t>(dim)));
    }
  }
  return a;
}

}  // namespace gofd
