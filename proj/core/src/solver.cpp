#include "gofd/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gofd {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

class PhaseTimer {
 public:
  explicit PhaseTimer(SolveReport& report) : report_(report) {}

  template <typename F>
  auto run(const std::string& phase, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(f())>) {
        f();
        record(phase, start);
      } else {
        auto result = f();
        record(phase, start);
        return result;
      }
    } catch (const std::exception& e) {
      throw std::runtime_error(phase + ": " + e.what());
    }
  }

 private:
  void record(const std::string& phase, std::chrono::steady_clock::time_point start) {
    report_.wall_times[phase] +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  SolveReport& report_;
};

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

SolveReport cg_solve(const LinearMap& a, std::span<const double> b, std::span<double> x,
                     const Preconditioner& precond, const CgOptions& options) {
  if (b.size() != x.size()) throw std::invalid_argument("cg_solve: size mismatch");
  if (!(options.tol > 0.0)) throw std::invalid_argument("cg_solve: tolerance must be positive");
  const std::size_t n = b.size();
  SolveReport report;
  std::fill(x.begin(), x.end(), 0.0);
  const double b_norm = std::sqrt(dot(b, b));
  if (b_norm == 0.0) {
    report.converged = true;
    return report;
  }

  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n);
  std::vector<double> p(n);
  std::vector<double> q(n);
  precond.apply(r, z);
  double rz = dot(r, z);
  if (!(rz != 0.0) || !std::isfinite(rz)) throw std::runtime_error("cg_solve: preconditioned residual vanished");
  const double rz0 = rz;
  std::copy(z.begin(), z.end(), p.begin());
  report.residual_history.push_back(1.0);
  report.residual_norms.push_back(1.0);

  for (int it = 1; it <= options.max_iter; ++it) {
    a(p, q);
    const double pq = dot(p, q);
    if (!(pq != 0.0) || !std::isfinite(pq)) throw std::runtime_error("cg_solve: breakdown, p^T A p = 0");
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    precond.apply(r, z);
    const double rz_new = dot(r, z);
    if (rz_new < 0.0) report.info["indefinite_preconditioner"] = "true";
    const double rel = std::sqrt(std::abs(rz_new / rz0));
    report.iterations = it;
    report.residual_history.push_back(rel);
    report.residual_norms.push_back(std::sqrt(dot(r, r)) / b_norm);
    if (rel <= options.tol) {
      report.converged = true;
      break;
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return report;
}

SolveReport cg_solve(const GoFDOperator& op, std::span<const double> b, std::span<double> x,
                     const Preconditioner& precond, const CgOptions& options) {
  if (b.size() != op.size()) throw std::invalid_argument("cg_solve: right-hand side size mismatch");
  GoFDOperator::Workspace work(op);
  return cg_solve([&](std::span<const double> u, std::span<double> v) { op.apply(u, v, work); }, b, x, precond,
                  options);
}

std::vector<double> assemble_rhs(const SimplicialMesh& mesh, const TransferMatrix& transfer, FractionalOrder s,
                                 const std::function<double(const Point&)>& f) {
  if (transfer.cols() != mesh.n_interior()) throw std::invalid_argument("transfer does not match the mesh");
  const double scale = std::pow(transfer.grid().h(), 2.0 * s.value());
  std::vector<double> b(mesh.n_interior());
  const auto& d = transfer.column_sums();
  for (std::size_t j = 0; j < b.size(); ++j) b[j] = scale * d[j] * (f ? f(mesh.vertices()[j]) : 1.0);
  return b;
}

double exact_solution(int dim, FractionalOrder s, const Point& x) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  double r2 = 0.0;
  for (int d = 0; d < dim; ++d) r2 += x[d] * x[d];
  if (r2 >= 1.0) return 0.0;
  const double sv = s.value();
  const double c = gamma_fn(0.5 * dim) /
                   (std::pow(2.0, 2.0 * sv) * gamma_fn(1.0 + sv) * gamma_fn(0.5 * dim + sv));
  return c * std::pow(1.0 - r2, sv);
}

KernelCache::Key KernelCache::key_of(const KernelSpec& spec, FractionalOrder s, int dim) {
  const bool uses_m = spec.scheme == Scheme::FftUniform || spec.scheme == Scheme::NonUniform ||
                      spec.scheme == Scheme::ModifiedSpectral;
  const bool uses_ng = spec.scheme == Scheme::Spectral || spec.scheme == Scheme::ModifiedSpectral;
  return {spec.scheme, uses_m ? spec.m : 0, uses_ng ? spec.n_gauss : 0, s.value(), dim};
}

void KernelCache::reserve(const KernelSpec& spec, FractionalOrder s, int dim, int n_fd) { (void)get(spec, s, dim, n_fd); }

StiffnessKernel KernelCache::get(const KernelSpec& spec, FractionalOrder s, int dim, int n_fd) {
  const Key key = key_of(spec, s, dim);
  auto it = kernels_.find(key);
  if (it != kernels_.end() && it->second.n_fd() >= n_fd) return it->second.truncated(n_fd);
  StiffnessKernel k = build_kernel(spec, s, dim, n_fd);
  kernels_.insert_or_assign(key, k);
  return k;
}

BvpResult solve_bvp(const SimplicialMesh& mesh, const BvpConfig& config, KernelCache* cache) {
  const int dim = mesh.dim();
  BvpResult result;
  SolveReport report;
  PhaseTimer timer(report);

  const MeshQuality quality = timer.run("mesh_quality", [&] { return mesh_quality(mesh); });
  const OverlayGrid grid = timer.run("grid", [&] {
    if (config.n_fd > 0) return OverlayGrid(dim, config.r_fd, config.n_fd);
    return choose_grid(quality, dim, config.r_fd, config.condition, config.grid_cap);
  });
  StiffnessKernel kernel = timer.run("kernel", [&] {
    return cache ? cache->get(config.kernel, config.s, dim, grid.n_fd())
                 : build_kernel(config.kernel, config.s, dim, grid.n_fd());
  });
  auto transfer = timer.run("transfer", [&] {
    return std::make_shared<const TransferMatrix>(build_transfer(mesh, grid, true));
  });
  if (config.check_rank) {
    const RankCheckResult rank = timer.run("rank_check", [&] { return column_rank_check(*transfer, RankCheckMode::Exact); });
    report.info["rank_check_mode"] = rank.mode == RankCheckMode::Exact ? "exact" : "heuristic";
    report.info["full_rank"] = rank.full_rank ? "true" : "false";
    if (!rank.full_rank && rank.mode == RankCheckMode::Exact) {
      throw std::runtime_error("rank_check: transfer matrix is rank deficient (rank " + std::to_string(rank.rank) +
                               " of " + std::to_string(transfer->cols()) + ")");
    }
  }
  const GoFDOperator op = timer.run("operator", [&] { return GoFDOperator(transfer, std::move(kernel)); });
  const auto precond = timer.run("preconditioner", [&] { return make_preconditioner(config.precond, op); });
  const std::vector<double> b =
      timer.run("rhs", [&] { return assemble_rhs(mesh, *transfer, config.s, config.rhs); });

  std::vector<double> u(op.size());
  SolveReport solve = timer.run("solve", [&] { return cg_solve(op, b, u, *precond, config.cg); });
  report.iterations = solve.iterations;
  report.info.merge(solve.info);
  report.converged = solve.converged;
  report.residual_history = std::move(solve.residual_history);
  report.residual_norms = std::move(solve.residual_norms);

  result.solution.assign(mesh.vertex_count(), 0.0);
  std::copy(u.begin(), u.end(), result.solution.begin());
  report.l2_error = timer.run("error", [&] {
    return lumped_l2_error(mesh, result.solution, [&](const Point& x) { return exact_solution(dim, config.s, x); });
  });

  report.info["dim"] = std::to_string(dim);
  report.info["s"] = format_double(config.s.value());
  report.info["scheme"] = std::string(to_string(config.kernel.scheme));
  report.info["precond"] = std::string(to_string(config.precond));
  report.info["n_fd"] = std::to_string(grid.n_fd());
  report.info["h_fd"] = format_double(grid.h());
  report.info["r_fd"] = format_double(grid.r_fd());
  report.info["n_vertices"] = std::to_string(mesh.vertex_count());
  report.info["n_interior"] = std::to_string(mesh.n_interior());
  report.info["n_elements"] = std::to_string(mesh.simplex_count());
  report.info["a_h"] = format_double(quality.a_h);
  report.info["h_bar"] = format_double(quality.h_bar);
  if (const auto* c = dynamic_cast<const CirculantPreconditioner*>(precond.get())) {
    report.info["circulant_clamped"] = std::to_string(c->circulant().clamped_count());
    report.info["circulant_negative"] = std::to_string(c->circulant().negative_count());
  }

  result.report = std::move(report);
  result.n_fd = grid.n_fd();
  result.h_fd = grid.h();
  return result;
}

double fit_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("slope fit needs positive data");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(x.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceStudy convergence_study(const std::vector<SimplicialMesh>& meshes, const BvpConfig& config,
                                   bool parallel) {
  if (meshes.empty()) throw std::invalid_argument("convergence study needs at least one mesh");
  KernelCache cache;
  int n_max = config.n_fd;
  std::size_t largest = 0;
  if (n_max <= 0) {
    for (std::size_t i = 0; i < meshes.size(); ++i) {
      try {
        const auto grid =
            choose_grid(mesh_quality(meshes[i]), meshes[i].dim(), config.r_fd, config.condition, config.grid_cap);
        if (grid.n_fd() > n_max) {
          n_max = grid.n_fd();
          largest = i;
        }
      } catch (const std::exception& ex) {
        throw std::runtime_error("level " + std::to_string(i) + ": grid: " + ex.what());
      }
    }
  }
  try {
    cache.reserve(config.kernel, config.s, meshes.front().dim(), n_max);
  } catch (const std::exception& ex) {
    throw std::runtime_error("level " + std::to_string(largest) + ": kernel: " + ex.what());
  }

  auto run_level = [&](std::size_t i, KernelCache& level_cache) {
    try {
      return solve_bvp(meshes[i], config, &level_cache);
    } catch (const std::exception& ex) {
      throw std::runtime_error("level " + std::to_string(i) + ": " + ex.what());
    }
  };

  std::vector<BvpResult> results(meshes.size());
  if (parallel) {
    std::vector<std::future<BvpResult>> pending;
    for (std::size_t i = 0; i < meshes.size(); ++i) {
      pending.push_back(std::async(std::launch::async, [&, i, local = cache]() mutable { return run_level(i, local); }));
    }
    for (std::size_t i = 0; i < meshes.size(); ++i) results[i] = pending[i].get();
  } else {
    for (std::size_t i = 0; i < meshes.size(); ++i) results[i] = run_level(i, cache);
  }

  ConvergenceStudy study;
  std::vector<double> h;
  std::vector<double> e;
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    const auto& r = results[i];
    ConvergenceLevel level;
    level.n_elements = meshes[i].simplex_count();
    level.n_interior = meshes[i].n_interior();
    level.h_bar = std::pow(static_cast<double>(level.n_elements), -1.0 / meshes[i].dim());
    level.n_fd = r.n_fd;
    level.l2_error = r.report.l2_error;
    level.iterations = r.report.iterations;
    level.converged = r.report.converged;
    study.levels.push_back(level);
    h.push_back(level.h_bar);
    e.push_back(level.l2_error);
  }
  if (h.size() >= 2) study.order = fit_log_slope(h, e);
  return study;
}

void write_report(std::ostream& out, const SolveReport& report) {
  out << "iterations=" << report.iterations << '\n';
  out << "converged=" << (report.converged ? "true" : "false") << '\n';
  out << std::setprecision(17);
  out << "l2_error=" << report.l2_error << '\n';
  if (!report.residual_history.empty()) out << "final_residual=" << report.residual_history.back() << '\n';
  for (const auto& [phase, seconds] : report.wall_times) out << "time_" << phase << '=' << seconds << '\n';
  for (const auto& [key, value] : report.info) out << key << '=' << value << '\n';
}

void write_residual_csv(std::ostream& out, const SolveReport& report) {
  out << "iteration,relative_residual,residual_norm\n" << std::scientific << std::setprecision(16);
  for (std::size_t i = 0; i < report.residual_history.size(); ++i) {
    out << i << ',' << report.residual_history[i] << ',' << report.residual_norms[i] << '\n';
  }
  out << std::defaultfloat;
}

}  // namespace gofd
