#include <gtest/gtest.h>

#include <sstream>

#include <Eigen/Dense>

#include "gofd/transfer.hpp"
#include "oracles.hpp"

namespace gofd {
namespace {

// Brute-force point location: first simplex whose barycentric coordinates are
// all >= -1e-12, with weights clamped to [0, 1].
Eigen::MatrixXd brute_force_transfer(const SimplicialMesh& mesh, const OverlayGrid& grid) {
  const int dim = mesh.dim();
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.node_count()),
                                                static_cast<Eigen::Index>(mesh.n_interior()));
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const auto x = grid.node_position(node);
    for (std::size_t k = 0; k < mesh.simplex_count(); ++k) {
      const auto s = mesh.simplex(k);
      Eigen::MatrixXd a(dim + 1, dim + 1);
      Eigen::VectorXd rhs(dim + 1);
      for (int i = 0; i <= dim; ++i) {
        const auto& p = mesh.vertices()[static_cast<std::size_t>(s[static_cast<std::size_t>(i)])];
        for (int d = 0; d < dim; ++d) a(d, i) = p[static_cast<std::size_t>(d)];
        a(dim, i) = 1.0;
      }
      for (int d = 0; d < dim; ++d) rhs(d) = x[static_cast<std::size_t>(d)];
      rhs(dim) = 1.0;
      const Eigen::VectorXd lambda = a.fullPivLu().solve(rhs);
      if (lambda.minCoeff() < -1e-12) continue;
      for (int i = 0; i <= dim; ++i) {
        const auto v = static_cast<std::size_t>(s[static_cast<std::size_t>(i)]);
        if (mesh.is_interior(v)) {
          dense(static_cast<Eigen::Index>(node), static_cast<Eigen::Index>(v)) = std::clamp(lambda(i), 0.0, 1.0);
        }
      }
      break;
    }
  }
  return dense;
}

TEST(ChooseGrid, PracticalAndStrictConditions) {
  MeshQuality q;
  q.a_h = 0.05;
  EXPECT_EQ(choose_grid(q, 2, 1.2).n_fd(), 24);
  EXPECT_EQ(choose_grid(q, 2, 1.2, GridCondition::Strict).n_fd(),
            static_cast<int>(std::ceil(1.2 / (0.05 / (3.0 * std::sqrt(2.0))))));
  q.a_h = 1e-4;
  EXPECT_THROW(choose_grid(q, 3, 1.2), std::length_error);
  EXPECT_EQ(default_grid_cap(2), 4096);
  EXPECT_EQ(default_grid_cap(3), 256);
}

TEST(ChooseGrid, SmallestAdmissibleGrid) {
  for (double a_h : {0.1, 0.07, 0.033333333333333333, 0.0125, 0.02}) {
    MeshQuality q;
    q.a_h = a_h;
    const auto g = choose_grid(q, 2, 1.2);
    EXPECT_LE(g.h(), a_h);
    EXPECT_GT(1.2 / (g.n_fd() - 1), a_h);
  }
}

TEST(BuildTransfer, MatchesBruteForceLocation2D) {
  const auto mesh = generate_ball_mesh(2, 0.3);
  const OverlayGrid grid(2, 1.2, 8);
  const auto t = build_transfer(mesh, grid);
  const Eigen::MatrixXd dense = Eigen::MatrixXd(t.matrix());
  EXPECT_LT((dense - brute_force_transfer(mesh, grid)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BuildTransfer, MatchesBruteForceLocation3D) {
  const auto mesh = generate_ball_mesh(3, 0.5);
  const OverlayGrid grid(3, 1.2, 5);
  const auto t = build_transfer(mesh, grid);
  EXPECT_LT((Eigen::MatrixXd(t.matrix()) - brute_force_transfer(mesh, grid)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BuildTransfer, PartitionOfUnityAndLinearPreservation) {
  const auto mesh = generate_ball_mesh(2, 0.2);
  const OverlayGrid grid(2, 1.2, 16);
  const auto t = build_transfer(mesh, grid);
  const auto& a = t.matrix();
  int full_rows = 0;
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    double sum = 0.0;
    double x = 0.0;
    double y = 0.0;
    for (TransferMatrix::Sparse::InnerIterator it(a, r); it; ++it) {
      EXPECT_GE(it.value(), 0.0);
      EXPECT_LE(it.value(), 1.0);
      sum += it.value();
      x += it.value() * mesh.vertices()[static_cast<std::size_t>(it.col())][0];
      y += it.value() * mesh.vertices()[static_cast<std::size_t>(it.col())][1];
    }
    EXPECT_LE(sum, 1.0 + 1e-12);
    const auto p = grid.node_position(static_cast<std::size_t>(r));
    if (std::hypot(p[0], p[1]) >= 1.0) {
      EXPECT_EQ(sum, 0.0);
    }
    if (std::abs(sum - 1.0) < 1e-12) {
      ++full_rows;
      EXPECT_NEAR(x, p[0], 1e-12);
      EXPECT_NEAR(y, p[1], 1e-12);
    }
  }
  EXPECT_GT(full_rows, 100);
}

TEST(BuildTransfer, AdjointIdentity) {
  const auto mesh = generate_ball_mesh(2, 0.15);
  const OverlayGrid grid(2, 1.2, 20);
  const auto t = build_transfer(mesh, grid);
  const auto u = oracle::sample_vector(t.cols(), 4);
  const auto v = oracle::sample_vector(t.rows(), 5);
  std::vector<double> iu(t.rows()), itv(t.cols());
  t.apply(u, iu);
  t.apply_transpose(v, itv);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < iu.size(); ++i) lhs += iu[i] * v[i];
  for (std::size_t i = 0; i < itv.size(); ++i) rhs += u[i] * itv[i];
  EXPECT_NEAR(lhs, rhs, 1e-12 * std::abs(lhs));
}

TEST(BuildTransfer, ColumnSumsAndStrictMode) {
  const auto mesh = generate_ball_mesh(2, 0.1);
  const auto t = build_transfer(mesh, OverlayGrid(2, 1.2, 24));
  const Eigen::RowVectorXd sums = Eigen::RowVectorXd::Ones(static_cast<Eigen::Index>(t.rows())) * t.matrix();
  for (std::size_t j = 0; j < t.cols(); ++j) EXPECT_NEAR(t.column_sums()[j], sums(static_cast<Eigen::Index>(j)), 1e-13);
  EXPECT_TRUE(t.empty_columns().empty());

  const OverlayGrid coarse(2, 1.2, 3);
  const auto loose = build_transfer(mesh, coarse);
  EXPECT_FALSE(loose.empty_columns().empty());
  try {
    build_transfer(mesh, coarse, true);
    FAIL();
  } catch (const TransferError& e) {
    EXPECT_EQ(e.columns(), loose.empty_columns());
  }
}

TEST(RankCheck, ExactAgreesWithDenseQr) {
  const auto mesh = generate_ball_mesh(2, 0.25);
  for (int n_fd : {3, 5, 8, 12}) {
    const auto t = build_transfer(mesh, OverlayGrid(2, 1.2, n_fd));
    const Eigen::MatrixXd dense(t.matrix());
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dense);
    qr.setThreshold(1e-10);
    const auto result = column_rank_check(t, RankCheckMode::Exact);
    EXPECT_EQ(result.mode, RankCheckMode::Exact);
    EXPECT_EQ(result.rank, static_cast<std::size_t>(qr.rank())) << n_fd;
    EXPECT_EQ(result.full_rank, qr.rank() == dense.cols()) << n_fd;
  }
}

TEST(RankCheck, PracticalGridGivesFullRank) {
  for (int dim : {2, 3}) {
    const auto mesh = generate_ball_mesh(dim, dim == 2 ? 0.1 : 0.34);
    const auto grid = choose_grid(mesh_quality(mesh), dim, 1.2);
    const auto t = build_transfer(mesh, grid);
    EXPECT_TRUE(column_rank_check(t, RankCheckMode::Exact).full_rank) << dim;
    EXPECT_EQ(column_rank_check(t).mode, RankCheckMode::Exact);
  }
}

TEST(RankCheck, HeuristicIsSufficientCondition) {
  const auto mesh = generate_ball_mesh(2, 0.2);
  for (int n_fd : {4, 12, 40}) {
    const auto t = build_transfer(mesh, OverlayGrid(2, 1.2, n_fd));
    const auto h = column_rank_check(t, RankCheckMode::Heuristic);
    EXPECT_EQ(h.mode, RankCheckMode::Heuristic);
    if (h.full_rank) {
      EXPECT_TRUE(column_rank_check(t, RankCheckMode::Exact).full_rank);
    }
  }
}

TEST(TransferCoordinates, OneLinePerNonzero) {
  const auto t = build_transfer(generate_ball_mesh(2, 0.5), OverlayGrid(2, 1.2, 4));
  std::ostringstream os;
  write_transfer_coordinates(os, t);
  const std::string text = os.str();
  EXPECT_EQ(static_cast<Eigen::Index>(std::count(text.begin(), text.end(), '\n')), t.matrix().nonZeros());
}

}  // namespace
}  // namespace gofd
