#pragma once

// Thin RAII layer over FFTW. Plans are created with FFTW_ESTIMATE so that the
// chosen algorithm, and therefore every bit of the output, is reproducible.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <new>
#include <span>
#include <stdexcept>
#include <vector>

namespace gofd::detail {

/// FFTW's planner is not thread safe; every plan creation and destruction goes through this.
std::mutex& fftw_planner_mutex();

template <typename T>
struct FftwFree {
  void operator()(T* p) const noexcept { fftw_free(p); }
};

template <typename T>
class FftwBuffer {
 public:
  FftwBuffer() = default;
  explicit FftwBuffer(std::size_t n) : size_(n) {
    data_.reset(static_cast<T*>(fftw_malloc(sizeof(T) * (n == 0 ? 1 : n))));
    if (!data_) throw std::bad_alloc();
  }

  T* data() noexcept { return data_.get(); }
  const T* data() const noexcept { return data_.get(); }
  std::size_t size() const noexcept { return size_; }
  T& operator[](std::size_t i) noexcept { return data_.get()[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_.get()[i]; }
  std::span<T> span() noexcept { return {data_.get(), size_}; }

 private:
  std::unique_ptr<T, FftwFree<T>> data_;
  std::size_t size_ = 0;
};

using RealBuffer = FftwBuffer<double>;
using ComplexBuffer = FftwBuffer<fftw_complex>;

class FftwPlan {
 public:
  FftwPlan() = default;
  explicit FftwPlan(fftw_plan plan) : plan_(plan) {
    if (plan_ == nullptr) throw std::runtime_error("FFTW failed to create a plan");
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
  FftwPlan(FftwPlan&& other) noexcept : plan_(other.plan_) { other.plan_ = nullptr; }
  FftwPlan& operator=(FftwPlan&& other) noexcept {
    if (this != &other) {
      reset();
      plan_ = other.plan_;
      other.plan_ = nullptr;
    }
    return *this;
  }
  ~FftwPlan() { reset(); }

  fftw_plan get() const noexcept { return plan_; }

 private:
  void reset() noexcept {
    if (plan_ != nullptr) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan_);
      plan_ = nullptr;
    }
  }
  fftw_plan plan_ = nullptr;
};

/// Real-to-complex / complex-to-real pair for a fixed multi-dimensional shape.
///
/// Execution uses the new-array interface, so one pair can serve many
/// concurrent callers as long as each brings its own fftw_malloc'd buffers.
class RealTransformPair {
 public:
  explicit RealTransformPair(std::vector<int> shape);

  std::size_t real_size() const noexcept { return real_size_; }
  std::size_t complex_size() const noexcept { return complex_size_; }
  const std::vector<int>& shape() const noexcept { return shape_; }

  void forward(double* in, fftw_complex* out) const { fftw_execute_dft_r2c(forward_.get(), in, out); }
  /// Destroys the contents of `in`.
  void inverse(fftw_complex* in, double* out) const { fftw_execute_dft_c2r(inverse_.get(), in, out); }

 private:
  std::vector<int> shape_;
  std::size_t real_size_ = 1;
  std::size_t complex_size_ = 1;
  FftwPlan forward_;
  FftwPlan inverse_;
};

}  // namespace gofd::detail
