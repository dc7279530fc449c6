#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gofd/grid.hpp"
#include "gofd/stiffness.hpp"

namespace gofd {

/// Values on the nodes of an overlay grid, row-major with the last axis fastest.
struct GridVector {
  GridVector(int dim, int n_fd);
  GridVector(int dim, int n_fd, std::vector<double> values);

  int dim;
  int n_fd;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
};

/// Matrix-free application of the block-Toeplitz operator A_FD generated by a
/// stiffness kernel, through a circulant embedding diagonalized by the FFT.
///
/// The plan is immutable once built. `apply` may be called concurrently as
/// long as every caller uses its own Workspace (the overloads without one
/// allocate a fresh workspace per call).
class ToeplitzPlan {
 public:
  explicit ToeplitzPlan(const StiffnessKernel& kernel);
  ~ToeplitzPlan();
  ToeplitzPlan(ToeplitzPlan&&) noexcept;
  ToeplitzPlan& operator=(ToeplitzPlan&&) noexcept;

  class Workspace {
   public:
    explicit Workspace(const ToeplitzPlan& plan);
    ~Workspace();
    Workspace(Workspace&&) noexcept;
    Workspace& operator=(Workspace&&) noexcept;

   private:
    friend class ToeplitzPlan;
    struct Buffers;
    std::unique_ptr<Buffers> buffers_;
  };

  int dim() const noexcept { return dim_; }
  int n_fd() const noexcept { return n_fd_; }
  std::size_t grid_size() const noexcept { return grid_size_; }
  /// Embedding length per axis.
  int transform_size() const noexcept { return length_; }

  /// v_j = sum_m T_{j-m} u_m over the grid (no h^{-2s} factor).
  void apply(std::span<const double> u, std::span<double> v, Workspace& work) const;
  void apply(std::span<const double> u, std::span<double> v) const;
  GridVector apply(const GridVector& u) const;

 private:
  struct Transform;

  int dim_;
  int n_fd_;
  int length_;
  std::size_t grid_size_;
  std::unique_ptr<Transform> transform_;
  std::vector<double> symbol_;  ///< real DFT of the embedded generator, r2c layout
};

/// Dense A_FD with A[j][m] = T_{j-m}; only for (2 n_fd + 1)^dim <= 20000.
Eigen::MatrixXd dense_materialize(const StiffnessKernel& kernel);

inline constexpr std::size_t kDenseMaterializeLimit = 20000;

}  // namespace gofd
