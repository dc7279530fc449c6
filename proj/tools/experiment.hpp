#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gofd/mesh.hpp"
#include "gofd/preconditioner.hpp"
#include "gofd/stiffness.hpp"

namespace gofd::cli {

enum class Command { Kernel, Decay, Impact, Solve, Convergence, Precond };

std::string_view to_string(Command command);
Command parse_command(std::string_view name);

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kDesk3dMaxNfd = 128;
inline constexpr double kDesk3dMaxElements = 2e5;

struct ExperimentConfig {
  Command command = Command::Kernel;
  int dim = 2;
  double s = 0.5;
  Scheme scheme = Scheme::FftUniform;
  int n_fd = 0;  ///< 0 picks the grid from the mesh (solve commands) or 81 (kernel)
  int m = 0;     ///< 0 selects 2^14 up to 2D and 2^10 in 3D
  int n_gauss = 64;
  double r_fd = 1.2;
  std::vector<std::string> mesh_paths;
  std::vector<double> ball_h;
  PreconditionerKind precond = PreconditionerKind::None;
  double tol = 1e-10;
  int max_iter = 5000;
  int delta = 12;
  std::string out;
  bool large = false;
  bool parallel = false;

  int effective_m() const noexcept;
  int effective_n_fd() const noexcept;
  KernelSpec kernel_spec() const;
};

/// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& config);

/// Single line `# config: key=value ...` echoing every field.
std::string config_comment(const ExperimentConfig& config);

/// Meshes from --mesh paths or generated from --ball sizes, in order.
std::vector<SimplicialMesh> load_meshes(const ExperimentConfig& config);

/// Each command writes a CSV (with the config comment first) followed by
/// `key=value` summary lines to `out`. Returns the process exit code: 0 iff
/// every requested run completed and converged.
int cmd_kernel(const ExperimentConfig& config, std::ostream& out);
int cmd_decay(const ExperimentConfig& config, std::ostream& out);
int cmd_impact(const ExperimentConfig& config, std::ostream& out);
int cmd_solve(const ExperimentConfig& config, std::ostream& out);
int cmd_convergence(const ExperimentConfig& config, std::ostream& out);
int cmd_precond(const ExperimentConfig& config, std::ostream& out);

/// Validates and dispatches on config.command.
int run(const ExperimentConfig& config, std::ostream& out);

}  // namespace gofd::cli
