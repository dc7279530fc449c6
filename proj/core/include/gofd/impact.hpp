#pragma once

namespace gofd {

/// Upper bound on the error that a kernel accurate to 10^{-delta} induces in
/// A_FD u on a grid with n_fd nodes per half axis:
/// (2 n_fd + 1)^dim n_fd^{2s} 10^{-delta} / r_fd^{2s}.
double impact_bound(int dim, double s, int delta, double r_fd, double n_fd);

struct ImpactCrossing {
  double n_fd = 0.0;
  double error = 0.0;
};

/// Where the bound meets a discretization error n_fd^{-order}.
ImpactCrossing impact_crossing(int dim, double s, int delta, double r_fd, int order);

}  // namespace gofd
