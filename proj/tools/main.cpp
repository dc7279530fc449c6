#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "experiment.hpp"

namespace {

using gofd::cli::Command;
using gofd::cli::ExperimentConfig;

struct RawOptions {
  std::string scheme = "fft";
  std::string precond = "none";
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid-overlay finite differences for the fractional Laplacian"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file; command-line flags take precedence");

  ExperimentConfig config;
  RawOptions raw;
  app.add_option("--dim", config.dim, "Spatial dimension")->capture_default_str();
  app.add_option("--s", config.s, "Fractional order in (0, 1)")->capture_default_str();
  app.add_option("--scheme", raw.scheme, "analytic|fft|nufft|spectral|modspec")->capture_default_str();
  app.add_option("--nfd", config.n_fd, "Overlay grid half-width; 0 chooses it from the mesh");
  app.add_option("--m", config.m, "Kernel quadrature samples per axis; 0 means 2^14 (2^10 in 3D)");
  app.add_option("--ng", config.n_gauss, "Gauss points per radial interval")->capture_default_str();
  app.add_option("--rfd", config.r_fd, "Overlay cube half-width")->capture_default_str();
  app.add_option("--mesh", config.mesh_paths, "Mesh file(s)");
  app.add_option("--ball", config.ball_h, "Generate unit-ball mesh(es) with these target sizes");
  app.add_option("--precond", raw.precond, "none|sparse|circulant")->capture_default_str();
  app.add_option("--tol", config.tol, "PCG relative tolerance")->capture_default_str();
  app.add_option("--max-iter", config.max_iter, "PCG iteration limit")->capture_default_str();
  app.add_option("--delta", config.delta, "Kernel accuracy exponent for the impact bound")->capture_default_str();
  app.add_option("--out", config.out, "Output file (default stdout)");
  app.add_flag("--large", config.large, "Lift the 3D desk-scale limits");
  app.add_flag("--parallel", config.parallel, "Run convergence levels concurrently");

  const std::vector<std::pair<Command, std::string>> commands = {
      {Command::Kernel, "Dump the stiffness kernel"},
      {Command::Decay, "Decay profile of the kernel and its fitted slope"},
      {Command::Impact, "Kernel error impact bound against discretization error"},
      {Command::Solve, "Solve (-Delta)^s u = 1 on a mesh"},
      {Command::Convergence, "Error over a sequence of meshes and fitted order"},
      {Command::Precond, "Residual histories for every preconditioner"},
  };
  for (const auto& [command, help] : commands) {
    app.add_subcommand(std::string(gofd::cli::to_string(command)), help)->callback([&config, command = command] {
      config.command = command;
    });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    config.scheme = gofd::parse_scheme(raw.scheme);
    config.precond = gofd::parse_preconditioner(raw.precond);
    if (config.out.empty()) return gofd::cli::run(config, std::cout);
    std::ofstream file(config.out);
    if (!file) {
      std::cerr << "error: out: cannot open " << config.out << '\n';
      return 2;
    }
    const int code = gofd::cli::run(config, file);
    std::cout << "wrote " << config.out << '\n';
    return code;
  } catch (const gofd::cli::ConfigError& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
}
