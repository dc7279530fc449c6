#include <gtest/gtest.h>

#include <sstream>

#include <Eigen/Dense>

#include "fixtures.hpp"
#include "gofd/solver.hpp"
#include "oracles.hpp"

namespace gofd {
namespace {

Eigen::MatrixXd spd_matrix(int n) {
  const auto v = oracle::sample_vector(static_cast<std::size_t>(n * n), 42);
  const Eigen::MatrixXd g = Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n);
  return g * g.transpose() + n * Eigen::MatrixXd::Identity(n, n);
}

LinearMap dense_map(const Eigen::MatrixXd& a) {
  return [&a](std::span<const double> u, std::span<double> v) {
    Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())) =
        a * Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
  };
}

TEST(CgSolve, AgreesWithDenseSolve) {
  const Eigen::MatrixXd a = spd_matrix(40);
  const auto b = oracle::sample_vector(40, 1);
  std::vector<double> x(40);
  const auto report = cg_solve(dense_map(a), b, x, IdentityPreconditioner{}, {1e-12, 500});
  EXPECT_TRUE(report.converged);
  const Eigen::VectorXd ref = a.ldlt().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), 40));
  EXPECT_LT((Eigen::Map<const Eigen::VectorXd>(x.data(), 40) - ref).norm(), 1e-8 * ref.norm());
  EXPECT_EQ(report.residual_history.front(), 1.0);
  EXPECT_EQ(report.residual_history.size(), static_cast<std::size_t>(report.iterations) + 1);
  EXPECT_LE(report.residual_history.back(), 1e-12);
}

TEST(CgSolve, ZeroRightHandSide) {
  const Eigen::MatrixXd a = spd_matrix(5);
  const std::vector<double> b(5, 0.0);
  std::vector<double> x(5, 3.0);
  const auto report = cg_solve(dense_map(a), b, x, IdentityPreconditioner{});
  EXPECT_TRUE(report.converged);
  EXPECT_EQ(report.iterations, 0);
  EXPECT_TRUE(report.residual_history.empty());
  for (double v : x) EXPECT_EQ(v, 0.0);
}

TEST(CgSolve, IterationLimitReported) {
  const Eigen::MatrixXd a = spd_matrix(60);
  const auto b = oracle::sample_vector(60, 3);
  std::vector<double> x(60);
  const auto report = cg_solve(dense_map(a), b, x, IdentityPreconditioner{}, {1e-14, 3});
  EXPECT_FALSE(report.converged);
  EXPECT_EQ(report.iterations, 3);
  EXPECT_THROW(cg_solve(dense_map(a), b, x, IdentityPreconditioner{}, {0.0, 3}), std::invalid_argument);
}

struct SmallSystem {
  SimplicialMesh mesh;
  std::shared_ptr<const TransferMatrix> transfer;
};

SmallSystem small_system(double h) {
  auto mesh = generate_ball_mesh(2, h);
  const auto grid = choose_grid(mesh_quality(mesh), 2, 1.2);
  auto transfer = std::make_shared<const TransferMatrix>(build_transfer(mesh, grid));
  return {std::move(mesh), std::move(transfer)};
}

TEST(CgSolve, GoFDSystemMatchesDenseSolveForEveryPreconditioner) {
  const auto sys = small_system(0.2);
  const FractionalOrder s(0.5);
  const int n_fd = sys.transfer->grid().n_fd();
  const GoFDOperator op(sys.transfer, fft_uniform(s, 2, n_fd, 1024));
  const auto b = assemble_rhs(sys.mesh, *sys.transfer, s, {});
  const Eigen::MatrixXd a = fixture::dense_operator(op);
  const Eigen::VectorXd ref = a.ldlt().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size())));
  for (auto kind : {PreconditionerKind::None, PreconditionerKind::Sparse, PreconditionerKind::Circulant}) {
    const auto pre = make_preconditioner(kind, op);
    std::vector<double> x(op.size());
    const auto report = cg_solve(op, b, x, *pre, {1e-12, 2000});
    EXPECT_TRUE(report.converged) << to_string(kind);
    const Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    EXPECT_LT((xv - ref).norm(), 1e-8 * ref.norm()) << to_string(kind);
  }
}

TEST(AssembleRhs, ScaledColumnSums) {
  const auto sys = small_system(0.25);
  const FractionalOrder s(0.3);
  const double scale = std::pow(sys.transfer->grid().h(), 0.6);
  const auto b = assemble_rhs(sys.mesh, *sys.transfer, s, [](const Point& x) { return 2.0 + x[0]; });
  for (std::size_t j = 0; j < b.size(); ++j) {
    EXPECT_NEAR(b[j], scale * sys.transfer->column_sums()[j] * (2.0 + sys.mesh.vertices()[j][0]), 1e-15);
  }
}

TEST(ExactSolution, MatchesClosedForm) {
  for (int dim : {1, 2, 3}) {
    for (double s : {0.25, 0.5, 0.75}) {
      for (const Point& x : {Point{0, 0, 0}, Point{0.3, 0.2, 0.1}, Point{0.9, 0, 0}, Point{1.0, 0.5, 0}}) {
        EXPECT_NEAR(exact_solution(dim, FractionalOrder(s), x), oracle::ball_solution(dim, s, x), 1e-14);
      }
    }
  }
  // 1D, s = 1/2: u(x) = sqrt(1 - x^2).
  EXPECT_NEAR(exact_solution(1, FractionalOrder(0.5), Point{0.6, 0, 0}), 0.8, 1e-14);
}

TEST(KernelCache, SmallerRequestsAreTruncations) {
  KernelCache cache;
  const KernelSpec spec{Scheme::FftUniform, 256, 64};
  const FractionalOrder s(0.5);
  cache.reserve(spec, s, 2, 30);
  EXPECT_EQ(cache.get(spec, s, 2, 12), fft_uniform(s, 2, 12, 256));
  EXPECT_EQ(cache.get(spec, s, 2, 40), fft_uniform(s, 2, 40, 256));
}

TEST(SolveBvp, ConvergesAndReports) {
  const auto mesh = generate_ball_mesh(2, 0.1);
  BvpConfig config;
  config.s = FractionalOrder(0.5);
  config.kernel = {Scheme::FftUniform, 4096, 64};
  config.precond = PreconditionerKind::Circulant;
  const auto result = solve_bvp(mesh, config);
  EXPECT_TRUE(result.report.converged);
  EXPECT_LT(result.report.l2_error, 0.02);
  EXPECT_EQ(result.n_fd, std::stoi(result.report.info.at("n_fd")));
  EXPECT_EQ(result.report.info.at("full_rank"), "true");
  for (const char* phase : {"grid", "kernel", "transfer", "rank_check", "operator", "preconditioner", "rhs", "solve", "error"}) {
    EXPECT_TRUE(result.report.wall_times.count(phase)) << phase;
  }
  for (std::size_t v = mesh.n_interior(); v < mesh.vertex_count(); ++v) EXPECT_EQ(result.solution[v], 0.0);
}

TEST(SolveBvp, FailuresNameThePhase) {
  const auto mesh = generate_ball_mesh(2, 0.1);
  BvpConfig config;
  config.kernel = {Scheme::FftUniform, 256, 64};
  config.n_fd = 4;
  try {
    solve_bvp(mesh, config);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("transfer:", 0), 0u) << e.what();
  }
  config.n_fd = 0;
  config.kernel.m = 16;
  try {
    solve_bvp(mesh, config);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("kernel:", 0), 0u) << e.what();
  }
}

TEST(FitLogSlope, ExactPowerLaw) {
  const std::vector<double> x{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.25));
  EXPECT_NEAR(fit_log_slope(x, y), 1.25, 1e-12);
  const std::vector<double> one{1.0};
  EXPECT_THROW(fit_log_slope(one, one), std::invalid_argument);
}

TEST(ConvergenceStudy, ErrorsDecreaseAndParallelMatches) {
  std::vector<SimplicialMesh> meshes;
  for (double h : {0.25, 0.125, 0.0625}) meshes.push_back(generate_ball_mesh(2, h));
  BvpConfig config;
  config.s = FractionalOrder(0.5);
  config.kernel = {Scheme::FftUniform, 1024, 64};
  config.precond = PreconditionerKind::Circulant;
  const auto serial = convergence_study(meshes, config);
  ASSERT_EQ(serial.levels.size(), 3u);
  EXPECT_GT(serial.levels[0].l2_error, serial.levels[1].l2_error);
  EXPECT_GT(serial.levels[1].l2_error, serial.levels[2].l2_error);
  EXPECT_GT(serial.order, 0.5);
  const auto parallel = convergence_study(meshes, config, true);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(parallel.levels[i].l2_error, serial.levels[i].l2_error);
    EXPECT_EQ(parallel.levels[i].iterations, serial.levels[i].iterations);
  }
}

TEST(ConvergenceStudy, FailureNamesLevel) {
  std::vector<SimplicialMesh> meshes{generate_ball_mesh(2, 0.25), generate_ball_mesh(2, 0.1)};
  BvpConfig config;
  // M = 32 admits n_fd = 10 on the coarse level but not n_fd = 25 on the fine one.
  config.kernel = {Scheme::FftUniform, 32, 64};
  try {
    convergence_study(meshes, config);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("level 1: ", 0), 0u) << e.what();
  }
}

TEST(Reports, KeyValueAndResidualCsv) {
  SolveReport r;
  r.iterations = 2;
  r.converged = true;
  r.residual_history = {1.0, 0.1, 0.001};
  r.residual_norms = {1.0, 0.2, 0.002};
  r.wall_times["solve"] = 0.5;
  r.info["n_fd"] = "12";
  std::ostringstream kv;
  write_report(kv, r);
  EXPECT_NE(kv.str().find("iterations=2\n"), std::string::npos);
  EXPECT_NE(kv.str().find("converged=true\n"), std::string::npos);
  EXPECT_NE(kv.str().find("time_solve=0.5\n"), std::string::npos);
  EXPECT_NE(kv.str().find("n_fd=12\n"), std::string::npos);
  std::ostringstream csv;
  write_residual_csv(csv, r);
  const std::string text = csv.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "iteration,relative_residual,residual_norm");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

}  // namespace
}  // namespace gofd
