#include "gofd/operator.hpp"

#include <stdexcept>

namespace gofd {

GoFDOperator::Workspace::Workspace(const GoFDOperator& op)
    : grid_in(op.grid().node_count()), grid_out(op.grid().node_count()), toeplitz(op.plan()) {}

GoFDOperator::GoFDOperator(std::shared_ptr<const TransferMatrix> transfer, StiffnessKernel kernel)
    : transfer_(std::move(transfer)), kernel_(std::move(kernel)), plan_(kernel_) {
  if (!transfer_) throw std::invalid_argument("GoFD operator needs a transfer matrix");
  const auto& g = transfer_->grid();
  if (g.dim() != kernel_.dim() || g.n_fd() != kernel_.n_fd()) {
    throw std::invalid_argument("kernel and overlay grid disagree on dim or n_fd");
  }
  work_ = std::make_unique<Workspace>(*this);
}

void GoFDOperator::apply(std::span<const double> u, std::span<double> v, Workspace& work) const {
  transfer_->apply(u, work.grid_in);
  plan_.apply(work.grid_in, work.grid_out, work.toeplitz);
  transfer_->apply_transpose(work.grid_out, v);
}

void GoFDOperator::apply(std::span<const double> u, std::span<double> v) const { apply(u, v, *work_); }

}  // namespace gofd
