#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gofd/mesh.hpp"
#include "gofd/operator.hpp"
#include "gofd/preconditioner.hpp"
#include "gofd/stiffness.hpp"
#include "gofd/transfer.hpp"

namespace gofd {

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

struct CgOptions {
  double tol = 1e-10;
  int max_iter = 5000;
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  /// sqrt(|r^T z / r0^T z0|) per iteration, starting with 1 at iteration 0.
  std::vector<double> residual_history;
  /// ||r|| / ||b|| per iteration (unpreconditioned).
  std::vector<double> residual_norms;
  double l2_error = 0.0;
  /// Phase name to seconds.
  std::map<std::string, double> wall_times;
  /// Additional scalar facts (sizes, grid parameters) in key order.
  std::map<std::string, std::string> info;
};

/// Preconditioned conjugate gradients on a symmetric positive definite map.
/// x is overwritten; iteration starts from zero.
/// Converged once sqrt(|r^T M r / r0^T M r0|) <= tol; b = 0 returns 0 immediately.
/// The absolute value admits symmetric indefinite preconditioners; a negative
/// r^T M r is flagged in report.info["indefinite_preconditioner"].
SolveReport cg_solve(const LinearMap& a, std::span<const double> b, std::span<double> x,
                     const Preconditioner& precond, const CgOptions& options = {});

/// The same on the GoFD operator.
SolveReport cg_solve(const GoFDOperator& op, std::span<const double> b, std::span<double> x,
                     const Preconditioner& precond, const CgOptions& options = {});

/// b_j = h_fd^{2s} d_j f(x_j) over interior vertices.
std::vector<double> assemble_rhs(const SimplicialMesh& mesh, const TransferMatrix& transfer, FractionalOrder s,
                                 const std::function<double(const Point&)>& f);

/// Closed-form solution of (-Delta)^s u = 1 in the unit ball, u = 0 outside.
double exact_solution(int dim, FractionalOrder s, const Point& x);

/// Builds each kernel once at the largest n_fd requested and serves smaller
/// requests by truncation.
class KernelCache {
 public:
  StiffnessKernel get(const KernelSpec& spec, FractionalOrder s, int dim, int n_fd);
  /// Builds the kernel for n_fd up front so later smaller requests truncate it.
  void reserve(const KernelSpec& spec, FractionalOrder s, int dim, int n_fd);

 private:
  struct Key {
    Scheme scheme;
    int m;
    int n_gauss;
    double s;
    int dim;
    auto operator<=>(const Key&) const = default;
  };
  static Key key_of(const KernelSpec& spec, FractionalOrder s, int dim);
  std::map<Key, StiffnessKernel> kernels_;
};

struct BvpConfig {
  FractionalOrder s{0.5};
  KernelSpec kernel{};
  double r_fd = 1.2;
  GridCondition condition = GridCondition::Practical;
  int grid_cap = 0;  ///< 0 selects default_grid_cap(dim)
  /// Overrides the grid selection when positive.
  int n_fd = 0;
  PreconditionerKind precond = PreconditionerKind::None;
  CgOptions cg{};
  /// Right-hand side; empty means f = 1 (the closed-form example).
  std::function<double(const Point&)> rhs;
  /// Skip the rank check (for timing studies).
  bool check_rank = true;
};

struct BvpResult {
  std::vector<double> solution;  ///< all mesh vertices, zero on the boundary
  SolveReport report;
  int n_fd = 0;
  double h_fd = 0.0;
};

/// Grid selection, kernel, transfer, rank check, PCG, and the lumped L2 error
/// against the closed-form solution (meaningful for f = 1 on the unit ball).
/// Failures are rethrown with the phase name prepended.
BvpResult solve_bvp(const SimplicialMesh& mesh, const BvpConfig& config, KernelCache* cache = nullptr);

struct ConvergenceLevel {
  std::size_t n_elements = 0;
  std::size_t n_interior = 0;
  double h_bar = 0.0;
  int n_fd = 0;
  double l2_error = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct ConvergenceStudy {
  std::vector<ConvergenceLevel> levels;
  /// Least-squares slope of log(error) against log(h_bar).
  double order = 0.0;
};

/// Least-squares slope of log(y) against log(x).
double fit_log_slope(std::span<const double> x, std::span<const double> y);

/// Runs solve_bvp on each mesh; a failure is rethrown with the level index.
/// With parallel set, levels run concurrently, each with its own kernel copy.
ConvergenceStudy convergence_study(const std::vector<SimplicialMesh>& meshes, const BvpConfig& config,
                                   bool parallel = false);

/// Flat `key=value` lines: iterations, converged, l2_error, time_<phase>, then info entries.
void write_report(std::ostream& out, const SolveReport& report);
/// CSV `iteration,relative_residual,residual_norm`.
void write_residual_csv(std::ostream& out, const SolveReport& report);

}  // namespace gofd
