#include "experiment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "gofd/impact.hpp"
#include "gofd/solver.hpp"

namespace gofd::cli {

namespace {

constexpr std::array<std::string_view, 6> kCommandNames = {"kernel", "decay", "impact",
                                                           "solve", "convergence", "precond"};

// Shortest text that reads back to the same double.
std::string shortest(double value) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ec == std::errc{} ? end : buf.data());
}

std::string join_doubles(const std::vector<double>& values) {
  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) joined += (i ? "," : "") + shortest(values[i]);
  return joined;
}

std::string join_strings(const std::vector<std::string>& values) {
  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) joined += (i ? "," : "") + values[i];
  return joined;
}

void require(bool condition, const std::string& field, const std::string& message) {
  if (!condition) throw ConfigError(field + ": " + message);
}

std::size_t ball_element_estimate(int dim, double h) {
  const auto k = static_cast<std::size_t>(std::ceil(1.0 / h));
  return dim == 2 ? 6 * k * k : 48 * k * k * k;
}

BvpConfig bvp_config(const ExperimentConfig& config) {
  BvpConfig bvp;
  bvp.s = FractionalOrder(config.s);
  bvp.kernel = config.kernel_spec();
  bvp.r_fd = config.r_fd;
  bvp.n_fd = config.n_fd;
  bvp.precond = config.precond;
  bvp.cg.tol = config.tol;
  bvp.cg.max_iter = config.max_iter;
  if (config.dim == 3 && !config.large) bvp.grid_cap = kDesk3dMaxNfd;
  return bvp;
}

void require_mesh_count(const ExperimentConfig& config, std::size_t minimum, std::size_t maximum) {
  const std::size_t count = config.mesh_paths.size() + config.ball_h.size();
  require(config.mesh_paths.empty() || config.ball_h.empty(), "mesh", "give either --mesh or --ball, not both");
  require(count >= minimum, "mesh", "at least " + std::to_string(minimum) + " mesh source(s) required");
  require(count <= maximum, "mesh", "at most " + std::to_string(maximum) + " mesh source(s) allowed");
}

void check_mesh_size(const ExperimentConfig& config, const SimplicialMesh& mesh) {
  if (mesh.dim() != config.dim) {
    throw ConfigError("mesh: dimension " + std::to_string(mesh.dim()) + " does not match dim " +
                      std::to_string(config.dim));
  }
  if (config.dim == 3 && !config.large && static_cast<double>(mesh.simplex_count()) > kDesk3dMaxElements) {
    throw ConfigError("mesh: " + std::to_string(mesh.simplex_count()) +
                      " elements exceed the 3D desk limit; pass --large to allow");
  }
}

}  // namespace

std::string_view to_string(Command command) { return kCommandNames[static_cast<std::size_t>(command)]; }

Command parse_command(std::string_view name) {
  for (std::size_t i = 0; i < kCommandNames.size(); ++i) {
    if (kCommandNames[i] == name) return static_cast<Command>(i);
  }
  throw ConfigError("command: unknown command '" + std::string(name) + "'");
}

int ExperimentConfig::effective_m() const noexcept {
  if (m > 0) return m;
  return dim == 3 ? 1 << 10 : 1 << 14;
}

int ExperimentConfig::effective_n_fd() const noexcept { return n_fd > 0 ? n_fd : 81; }

KernelSpec ExperimentConfig::kernel_spec() const {
  return KernelSpec{.scheme = scheme, .m = effective_m(), .n_gauss = n_gauss};
}

void validate(const ExperimentConfig& config) {
  require(config.dim >= 1 && config.dim <= 3, "dim", "must be 1, 2 or 3");
  require(config.s > 0.0 && config.s < 1.0, "s", "must lie in (0, 1)");
  require(config.n_fd >= 0, "nfd", "must be positive");
  require(config.m >= 0, "m", "must be positive");
  require(config.n_gauss >= 1, "ng", "must be at least 1");
  require(config.r_fd > 0.0, "rfd", "must be positive");
  require(config.tol > 0.0 && config.tol < 1.0, "tol", "must lie in (0, 1)");
  require(config.max_iter >= 1, "max-iter", "must be at least 1");
  require(config.scheme != Scheme::Analytic1D || config.dim == 1, "scheme", "analytic is one-dimensional only");
  for (double h : config.ball_h) require(h > 0.0 && h <= 1.0, "ball", "target sizes must lie in (0, 1]");

  const bool needs_kernel = config.command != Command::Impact;
  if (needs_kernel && config.scheme != Scheme::Analytic1D && config.scheme != Scheme::Spectral) {
    const int m = config.effective_m();
    require(m % 2 == 0, "m", "must be even");
    if (config.n_fd > 0) require(m >= 2 * config.n_fd + 1, "m", "must be at least 2*nfd+1");
  }
  if (config.dim == 3 && !config.large) {
    require(config.n_fd <= kDesk3dMaxNfd, "nfd", "exceeds the 3D desk limit of 128; pass --large to allow");
    for (double h : config.ball_h) {
      require(static_cast<double>(ball_element_estimate(3, h)) <= kDesk3dMaxElements, "ball",
              "mesh would exceed the 3D desk limit; pass --large to allow");
    }
  }

  switch (config.command) {
    case Command::Kernel:
      if (config.scheme != Scheme::Analytic1D && config.scheme != Scheme::Spectral) {
        require(config.effective_m() >= 2 * config.effective_n_fd() + 1, "m", "must be at least 2*nfd+1");
      }
      break;
    case Command::Decay:
      require(config.n_fd >= 32, "nfd", "decay needs nfd >= 32");
      break;
    case Command::Impact:
      require(config.delta >= 1, "delta", "must be at least 1");
      break;
    case Command::Solve:
    case Command::Precond:
      require(config.dim >= 2, "dim", "solves need dim 2 or 3");
      require_mesh_count(config, 1, 1);
      break;
    case Command::Convergence:
      require(config.dim >= 2, "dim", "solves need dim 2 or 3");
      require_mesh_count(config, 3, 1000);
      break;
  }
}

std::string config_comment(const ExperimentConfig& config) {
  std::ostringstream os;
  os << "# config: command=" << to_string(config.command) << " dim=" << config.dim << " s=" << shortest(config.s)
     << " scheme=" << to_string(config.scheme) << " nfd=" << config.n_fd << " m=" << config.effective_m()
     << " ng=" << config.n_gauss << " rfd=" << shortest(config.r_fd) << " mesh=" << join_strings(config.mesh_paths)
     << " ball=" << join_doubles(config.ball_h) << " precond=" << to_string(config.precond)
     << " tol=" << shortest(config.tol) << " max-iter=" << config.max_iter << " delta=" << config.delta
     << " large=" << (config.large ? "true" : "false") << " parallel=" << (config.parallel ? "true" : "false");
  return os.str();
}

std::vector<SimplicialMesh> load_meshes(const ExperimentConfig& config) {
  std::vector<SimplicialMesh> meshes;
  for (const auto& path : config.mesh_paths) meshes.push_back(load_mesh(path));
  for (double h : config.ball_h) meshes.push_back(generate_ball_mesh(config.dim, h));
  for (const auto& mesh : meshes) check_mesh_size(config, mesh);
  return meshes;
}

int cmd_kernel(const ExperimentConfig& config, std::ostream& out) {
  validate(config);
  const auto kernel = build_kernel(config.kernel_spec(), FractionalOrder(config.s), config.dim,
                                   config.effective_n_fd());
  out << config_comment(config) << '\n';
  write_kernel_csv(out, kernel);
  if (config.dim == 1) {
    out << std::setprecision(17) << "max_error=" << max_error_vs_analytic(kernel) << '\n';
  }
  return 0;
}

int cmd_decay(const ExperimentConfig& config, std::ostream& out) {
  validate(config);
  const auto kernel = build_kernel(config.kernel_spec(), FractionalOrder(config.s), config.dim, config.n_fd);
  const auto profile = decay_profile(kernel);
  out << config_comment(config) << '\n';
  write_decay_csv(out, profile);
  out << std::setprecision(17) << "slope=" << profile.fitted_slope << '\n';
  out << "tail_points=" << profile.tail_points << '\n';
  return 0;
}

int cmd_impact(const ExperimentConfig& config, std::ostream& out) {
  validate(config);
  out << config_comment(config) << '\n';
  out << "n_fd,bound,err1,err2\n" << std::setprecision(17);
  int previous = 0;
  for (int k = 0; k <= 200; ++k) {
    const int n = static_cast<int>(std::lround(std::pow(10.0, k / 50.0)));
    if (n == previous) continue;
    previous = n;
    const double nd = n;
    out << n << ',' << impact_bound(config.dim, config.s, config.delta, config.r_fd, nd) << ',' << 1.0 / nd
        << ',' << 1.0 / (nd * nd) << '\n';
  }
  for (int order : {1, 2}) {
    const auto crossing = impact_crossing(config.dim, config.s, config.delta, config.r_fd, order);
    out << "crossing" << order << "_n_fd=" << crossing.n_fd << '\n';
    out << "crossing" << order << "_error=" << crossing.error << '\n';
  }
  return 0;
}

int cmd_solve(const ExperimentConfig& config, std::ostream& out) {
  validate(config);
  const auto meshes = load_meshes(config);
  const auto result = solve_bvp(meshes.front(), bvp_config(config));
  out << config_comment(config) << '\n';
  write_residual_csv(out, result.report);
  out << "n_fd=" << result.n_fd << '\n';
  write_report(out, result.report);
  return result.report.converged ? 0 : 1;
}

int cmd_convergence(const ExperimentConfig& config, std::ostream& out) {
  validate(config);
  const auto meshes = load_meshes(config);
  const auto study = convergence_study(meshes, bvp_config(config), config.parallel);
  out << config_comment(config) << '\n';
  out << "level,n_elements,n_interior,h_bar,n_fd,l2_error,iterations,converged\n" << std::setprecision(17);
  bool all_converged = true;
  for (std::size_t i = 0; i < study.levels.size(); ++i) {
    const auto& level = study.levels[i];
    out << i << ',' << level.n_elements << ',' << level.n_interior << ',' << level.h_bar << ',' << level.n_fd
        << ',' << level.l2_error << ',' << level.iterations << ',' << (level.converged ? 1 : 0) << '\n';
    all_converged = all_converged && level.converged;
  }
  out << "order=" << study.order << '\n';
  return all_converged ? 0 : 1;
}

int cmd_precond(const ExperimentConfig& config, std::ostream& out) {
  validate(config);
  const auto meshes = load_meshes(config);
  constexpr std::array kinds = {PreconditionerKind::None, PreconditionerKind::Sparse, PreconditionerKind::Circulant};

  KernelCache cache;
  struct Outcome {
    bool ok = false;
    std::string error;
    SolveReport report;
  };
  std::vector<Outcome> outcomes;
  for (auto kind : kinds) {
    ExperimentConfig variant = config;
    variant.precond = kind;
    Outcome outcome;
    try {
      outcome.report = solve_bvp(meshes.front(), bvp_config(variant), &cache).report;
      outcome.ok = true;
    } catch (const std::exception& ex) {
      outcome.error = ex.what();
    }
    outcomes.push_back(std::move(outcome));
  }

  out << config_comment(config) << '\n';
  out << "iteration";
  for (auto kind : kinds) out << ',' << to_string(kind);
  out << '\n' << std::setprecision(17);
  std::size_t rows = 0;
  for (const auto& o : outcomes) rows = std::max(rows, o.report.residual_history.size());
  for (std::size_t i = 0; i < rows; ++i) {
    out << i;
    for (const auto& o : outcomes) {
      out << ',';
      if (i < o.report.residual_history.size()) out << o.report.residual_history[i];
    }
    out << '\n';
  }

  bool all_ok = true;
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    const auto name = std::string(to_string(kinds[k]));
    const auto& o = outcomes[k];
    if (o.ok) {
      out << "iterations_" << name << '=' << o.report.iterations << '\n';
      out << "converged_" << name << '=' << (o.report.converged ? "true" : "false") << '\n';
      out << "l2_error_" << name << '=' << o.report.l2_error << '\n';
    } else {
      out << "failed_" << name << '=' << o.error << '\n';
    }
    all_ok = all_ok && o.ok && o.report.converged;
  }
  return all_ok ? 0 : 1;
}

int run(const ExperimentConfig& config, std::ostream& out) {
  switch (config.command) {
    case Command::Kernel: return cmd_kernel(config, out);
    case Command::Decay: return cmd_decay(config, out);
    case Command::Impact: return cmd_impact(config, out);
    case Command::Solve: return cmd_solve(config, out);
    case Command::Convergence: return cmd_convergence(config, out);
    case Command::Precond: return cmd_precond(config, out);
  }
  throw ConfigError("command: unhandled");
}

}  // namespace gofd::cli
