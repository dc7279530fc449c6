#include "line_transforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gofd/grid.hpp"

namespace gofd::detail {

namespace {

/// Half-line sample j stands for itself and its mirror image unless they coincide.
double multiplicity(int j, int mirror) { return mirror == j ? 1.0 : 2.0; }

}  // namespace

UniformEvenTransform::UniformEvenTransform(int m, int outputs)
    : m_(m), outputs_(outputs), line_(static_cast<std::size_t>(m)),
      spectrum_(static_cast<std::size_t>(m / 2 + 1)) {
  if (m < 2) throw std::invalid_argument("uniform transform needs at least 2 samples");
  if (outputs < 1 || outputs > m) throw std::invalid_argument("uniform transform output count out of range");
  std::lock_guard lock(fftw_planner_mutex());
  plan_ = FftwPlan(fftw_plan_dft_r2c_1d(m, line_.data(), spectrum_.data(), FFTW_ESTIMATE));
}

void UniformEvenTransform::apply(std::span<const double> half, std::span<double> out) {
  const int h = half_length();
  if (static_cast<int>(half.size()) != h || static_cast<int>(out.size()) != outputs_) {
    throw std::invalid_argument("uniform transform size mismatch");
  }
  // xi_{M-j} = -xi_j, so the full line is the half line mirrored about j = 0.
  for (int j = 0; j < h; ++j) {
    line_[static_cast<std::size_t>(j)] = half[j];
    if (j > 0 && m_ - j >= h) line_[static_cast<std::size_t>(m_ - j)] = half[j];
  }
  fftw_execute(plan_.get());
  for (int k = 0; k < outputs_; ++k) {
    const int bin = std::min(k, m_ - k);
    const double re = spectrum_[static_cast<std::size_t>(bin)][0];
    const double im = spectrum_[static_cast<std::size_t>(bin)][1];
    out[k] = re;
    max_real_ = std::max(max_real_, std::abs(re));
    max_imag_ = std::max(max_imag_, std::abs(im));
  }
}

ClusteredNodes::ClusteredNodes(int m_) : m(m_) {
  if (m < 2) throw std::invalid_argument("clustered grid needs M >= 2");
  xi.resize(static_cast<std::size_t>(m) + 1);
  weight.resize(xi.size());
  for (int j = 0; j <= m; ++j) {
    const double t = 2.0 * j / m - 1.0;
    xi[j] = kPi * t * std::abs(t);
  }
  weight[0] = 0.5 * (xi[1] - xi[0]);
  weight[m] = 0.5 * (xi[m] - xi[m - 1]);
  for (int j = 1; j < m; ++j) weight[j] = 0.5 * (xi[j + 1] - xi[j - 1]);
}

ClusteredDirectTransform::ClusteredDirectTransform(const ClusteredNodes& nodes, int outputs)
    : half_(nodes.m / 2 + 1), outputs_(outputs),
      matrix_(static_cast<std::size_t>(outputs) * static_cast<std::size_t>(nodes.m / 2 + 1)) {
  if (outputs < 1) throw std::invalid_argument("direct transform needs at least one output");
  for (int k = 0; k < outputs; ++k) {
    for (int j = 0; j < half_; ++j) {
      const double w = multiplicity(j, nodes.m - j) * nodes.weight[j];
      matrix_[static_cast<std::size_t>(k) * half_ + j] = w * std::cos(k * nodes.xi[j]);
    }
  }
}

void ClusteredDirectTransform::apply(std::span<const double> half, std::span<double> out) {
  if (static_cast<int>(half.size()) != half_ || static_cast<int>(out.size()) != outputs_) {
    throw std::invalid_argument("direct transform size mismatch");
  }
  for (int k = 0; k < outputs_; ++k) {
    const double* row = matrix_.data() + static_cast<std::size_t>(k) * half_;
    double acc = 0.0;
    for (int j = 0; j < half_; ++j) acc += row[j] * half[j];
    out[k] = acc;
  }
}

ClusteredGriddingTransform::ClusteredGriddingTransform(const ClusteredNodes& nodes, int outputs,
                                                       int spread)
    : m_(nodes.m), half_(nodes.m / 2 + 1), outputs_(outputs), spread_(spread) {
  if (outputs < 1) throw std::invalid_argument("gridding transform needs at least one output");
  if (spread < 2) throw std::invalid_argument("gridding spread must be at least 2");
  // Modes -outputs .. outputs fit in 2 * outputs; the fine grid oversamples by 2.
  const int modes = 2 * outputs;
  fine_size_ = 2 * modes;
  if (2 * spread_ > fine_size_) fine_size_ = static_cast<int>(next_even(2 * spread_));
  const double tau = 4.0 * kPi / (static_cast<double>(modes) * modes);
  const double spacing = 2.0 * kPi / fine_size_;

  weight_.resize(static_cast<std::size_t>(half_));
  start_.resize(static_cast<std::size_t>(half_));
  kernel_.resize(static_cast<std::size_t>(half_) * 2 * spread_);
  for (int j = 0; j < half_; ++j) {
    weight_[j] = multiplicity(j, m_ - j) * nodes.weight[j];
    // Position in [0, 2 pi); exp(i k x) is 2 pi periodic for integer k.
    double x = nodes.xi[j];
    if (x < 0.0) x += 2.0 * kPi;
    const int base = static_cast<int>(std::floor(x / spacing));
    start_[j] = base - spread_ + 1;
    for (int l = 0; l < 2 * spread_; ++l) {
      const double dx = (start_[j] + l) * spacing - x;
      kernel_[static_cast<std::size_t>(j) * 2 * spread_ + l] = std::exp(-dx * dx / (4.0 * tau));
    }
  }
  deconvolve_.resize(static_cast<std::size_t>(outputs));
  for (int k = 0; k < outputs; ++k) {
    deconvolve_[k] = std::sqrt(kPi / tau) * std::exp(static_cast<double>(k) * k * tau) / fine_size_;
  }

  fine_ = RealBuffer(static_cast<std::size_t>(fine_size_));
  spectrum_ = ComplexBuffer(static_cast<std::size_t>(fine_size_ / 2 + 1));
  std::lock_guard lock(fftw_planner_mutex());
  plan_ = FftwPlan(fftw_plan_dft_r2c_1d(fine_size_, fine_.data(), spectrum_.data(), FFTW_ESTIMATE));
}

std::size_t ClusteredGriddingTransform::next_even(std::size_t n) { return n + (n & 1u); }

void ClusteredGriddingTransform::apply(std::span<const double> half, std::span<double> out) {
  if (static_cast<int>(half.size()) != half_ || static_cast<int>(out.size()) != outputs_) {
    throw std::invalid_argument("gridding transform size mismatch");
  }
  std::fill(fine_.data(), fine_.data() + fine_size_, 0.0);
  const int width = 2 * spread_;
  for (int j = 0; j < half_; ++j) {
    const double c = weight_[j] * half[j];
    if (c == 0.0) continue;
    const double* g = kernel_.data() + static_cast<std::size_t>(j) * width;
    int idx = start_[j] % fine_size_;
    if (idx < 0) idx += fine_size_;
    for (int l = 0; l < width; ++l) {
      fine_[static_cast<std::size_t>(idx)] += c * g[l];
      if (++idx == fine_size_) idx = 0;
    }
  }
  fftw_execute(plan_.get());
  // The real part of the spectrum does not depend on the sign convention.
  for (int k = 0; k < outputs_; ++k) out[k] = spectrum_[static_cast<std::size_t>(k)][0] * deconvolve_[k];
}

std::vector<double> separable_even_transform(
    int dim, LineTransform& transform,
    const std::function<void(std::span<const int> outer, std::span<double> line)>& fill_line) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("separable transform dimension must be 1, 2 or 3");
  const auto h = static_cast<std::size_t>(transform.half_length());
  const auto p = static_cast<std::size_t>(transform.outputs());
  std::vector<double> line(h);
  std::vector<double> column(h);
  std::vector<double> result(p);

  if (dim == 1) {
    std::vector<double> out(p);
    fill_line({}, line);
    transform.apply(line, out);
    return out;
  }

  // Transforms the innermost axis of every line for fixed leading index j0,
  // storing a (dim - 1)-dimensional block of shape p^(dim - 1).
  auto inner_block = [&](int j0, std::span<double> block) {
    if (dim == 2) {
      const int outer[1] = {j0};
      fill_line(outer, line);
      transform.apply(line, block);
      return;
    }
    std::vector<double> slab(h * p);
    for (std::size_t j1 = 0; j1 < h; ++j1) {
      const int outer[2] = {j0, static_cast<int>(j1)};
      fill_line(outer, line);
      transform.apply(line, std::span<double>(slab.data() + j1 * p, p));
    }
    for (std::size_t k2 = 0; k2 < p; ++k2) {
      for (std::size_t j1 = 0; j1 < h; ++j1) column[j1] = slab[j1 * p + k2];
      transform.apply(column, result);
      for (std::size_t k1 = 0; k1 < p; ++k1) block[k1 * p + k2] = result[k1];
    }
  };

  const std::size_t block_size = dim == 2 ? p : p * p;
  std::vector<double> stack(h * block_size);
  for (std::size_t j0 = 0; j0 < h; ++j0) {
    inner_block(static_cast<int>(j0), std::span<double>(stack.data() + j0 * block_size, block_size));
  }
  std::vector<double> out(p * block_size);
  for (std::size_t b = 0; b < block_size; ++b) {
    for (std::size_t j0 = 0; j0 < h; ++j0) column[j0] = stack[j0 * block_size + b];
    transform.apply(column, result);
    for (std::size_t k0 = 0; k0 < p; ++k0) out[k0 * block_size + b] = result[k0];
  }
  return out;
}

}  // namespace gofd::detail
