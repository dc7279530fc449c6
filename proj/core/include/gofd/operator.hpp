#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "gofd/stiffness.hpp"
#include "gofd/toeplitz.hpp"
#include "gofd/transfer.hpp"

namespace gofd {

/// The GoFD system matrix I^T A_FD I acting on interior mesh values.
///
/// No h_fd^{-2s} factor is applied; the right-hand side carries h_fd^{2s}
/// instead. `apply` without a workspace uses an internal one and is therefore
/// not reentrant; concurrent callers pass their own Workspace.
class GoFDOperator {
 public:
  GoFDOperator(std::shared_ptr<const TransferMatrix> transfer, StiffnessKernel kernel);

  struct Workspace {
    explicit Workspace(const GoFDOperator& op);
    std::vector<double> grid_in;
    std::vector<double> grid_out;
    ToeplitzPlan::Workspace toeplitz;
  };

  std::size_t size() const noexcept { return transfer_->cols(); }
  const TransferMatrix& transfer() const noexcept { return *transfer_; }
  const StiffnessKernel& kernel() const noexcept { return kernel_; }
  const ToeplitzPlan& plan() const noexcept { return plan_; }
  const OverlayGrid& grid() const noexcept { return transfer_->grid(); }

  void apply(std::span<const double> u, std::span<double> v, Workspace& work) const;
  void apply(std::span<const double> u, std::span<double> v) const;

 private:
  std::shared_ptr<const TransferMatrix> transfer_;
  StiffnessKernel kernel_;
  ToeplitzPlan plan_;
  std::unique_ptr<Workspace> work_;
};

}  // namespace gofd
