#include "gofd/dft.hpp"

#include <algorithm>
#include <stdexcept>

#include "fftw_util.hpp"

namespace gofd {

namespace detail {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

RealTransformPair::RealTransformPair(std::vector<int> shape) : shape_(std::move(shape)) {
  if (shape_.empty()) throw std::invalid_argument("transform shape must be non-empty");
  for (int n : shape_) {
    if (n < 1) throw std::invalid_argument("transform extents must be positive");
    real_size_ *= static_cast<std::size_t>(n);
  }
  complex_size_ = real_size_ / static_cast<std::size_t>(shape_.back()) *
                  (static_cast<std::size_t>(shape_.back()) / 2 + 1);
  RealBuffer in(real_size_);
  ComplexBuffer out(complex_size_);
  const int rank = static_cast<int>(shape_.size());
  std::lock_guard lock(fftw_planner_mutex());
  forward_ = FftwPlan(fftw_plan_dft_r2c(rank, shape_.data(), in.data(), out.data(), FFTW_ESTIMATE));
  inverse_ = FftwPlan(fftw_plan_dft_c2r(rank, shape_.data(), out.data(), in.data(), FFTW_ESTIMATE));
}

}  // namespace detail

std::vector<std::complex<double>> dft(std::span<const std::complex<double>> values,
                                      std::span<const std::size_t> shape, DftDirection direction) {
  if (shape.empty()) throw std::invalid_argument("dft shape must be non-empty");
  std::size_t total = 1;
  std::vector<int> dims;
  for (std::size_t n : shape) {
    if (n == 0) throw std::invalid_argument("dft extents must be positive");
    total *= n;
    dims.push_back(static_cast<int>(n));
  }
  if (values.size() != total) throw std::invalid_argument("dft input size does not match shape");

  detail::ComplexBuffer buf(total);
  std::copy(values.begin(), values.end(), reinterpret_cast<std::complex<double>*>(buf.data()));
  {
    const int sign = direction == DftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan raw = nullptr;
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      raw = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf.data(), buf.data(), sign,
                          FFTW_ESTIMATE);
    }
    detail::FftwPlan plan(raw);
    fftw_execute(plan.get());
  }
  std::vector<std::complex<double>> out(total);
  const auto* src = reinterpret_cast<const std::complex<double>*>(buf.data());
  if (direction == DftDirection::Inverse) {
    const double scale = 1.0 / static_cast<double>(total);
    std::transform(src, src + total, out.begin(), [scale](std::complex<double> z) { return z * scale; });
  } else {
    std::copy(src, src + total, out.begin());
  }
  return out;
}

std::size_t next_fast_size(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

}  // namespace gofd
