#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "gofd/mesh.hpp"

namespace gofd {
namespace {

constexpr double kPi = std::numbers::pi;

double radius(const Point& p) { return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]); }

// Unit square split into four triangles around its centre.
SimplicialMesh square_with_centre() {
  std::vector<Point> v{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0.5, 0.5, 0}};
  std::vector<Simplex> t{{0, 1, 4, -1}, {1, 2, 4, -1}, {2, 3, 4, -1}, {3, 0, 4, -1}};
  return SimplicialMesh(2, v, t);
}

TEST(SimplicialMesh, SingleTriangleQuality) {
  const SimplicialMesh m(2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2, -1}});
  EXPECT_DOUBLE_EQ(m.volume(0), 0.5);
  const auto q = mesh_quality(m);
  EXPECT_NEAR(q.a_h, 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(q.max_diameter, std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(q.h_bar, 1.0);
  EXPECT_EQ(q.n_elements, 1u);
}

TEST(SimplicialMesh, RegularTetrahedronQuality) {
  const SimplicialMesh m(3, {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}, {{0, 1, 2, 3}});
  const double edge = 2.0 * std::sqrt(2.0);
  EXPECT_NEAR(m.volume(0), edge * edge * edge / (6.0 * std::sqrt(2.0)), 1e-14);
  const auto q = mesh_quality(m);
  EXPECT_NEAR(q.a_h, edge * std::sqrt(2.0 / 3.0), 1e-14);
  EXPECT_NEAR(q.max_diameter, edge, 1e-14);
}

TEST(SimplicialMesh, OrientsSimplicesPositively) {
  const SimplicialMesh m(2, {{0, 0, 0}, {0, 1, 0}, {1, 0, 0}}, {{0, 1, 2, -1}});
  EXPECT_GT(m.volume(0), 0.0);
  std::array<Point, 3> corners{};
  for (int i = 0; i < 3; ++i) corners[static_cast<std::size_t>(i)] = m.vertices()[static_cast<std::size_t>(m.simplex(0)[static_cast<std::size_t>(i)])];
  EXPECT_GT(signed_volume(2, corners), 0.0);
}

TEST(SimplicialMesh, RejectsDegenerateAndUnusedVertices) {
  try {
    SimplicialMesh(2, {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {{0, 1, 2, -1}});
    FAIL();
  } catch (const MeshError& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate simplex 0"), std::string::npos);
  }
  EXPECT_THROW(SimplicialMesh(2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 1, -1}}), MeshError);
  EXPECT_THROW(SimplicialMesh(2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {5, 5, 0}}, {{0, 1, 2, -1}}), MeshError);
  EXPECT_THROW(SimplicialMesh(2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 7, -1}}), MeshError);
}

TEST(SimplicialMesh, InteriorVerticesComeFirst) {
  const auto m = square_with_centre();
  EXPECT_EQ(m.n_interior(), 1u);
  EXPECT_TRUE(m.is_interior(0));
  EXPECT_FALSE(m.is_interior(1));
  EXPECT_EQ(m.original_index()[0], 4);
  EXPECT_DOUBLE_EQ(m.vertices()[0][0], 0.5);
  EXPECT_DOUBLE_EQ(m.total_volume(), 1.0);
  for (std::size_t v = 1; v < 5; ++v) EXPECT_EQ(m.original_index()[v], static_cast<int>(v) - 1);
}

TEST(SimplicialMesh, ExplicitBoundaryOverridesDetection) {
  std::vector<Point> v{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0.5, 0.5, 0}};
  std::vector<Simplex> t{{0, 1, 4, -1}, {1, 2, 4, -1}, {2, 3, 4, -1}, {3, 0, 4, -1}};
  const SimplicialMesh m(2, v, t, std::vector<int>{0, 2});
  EXPECT_EQ(m.n_interior(), 3u);
}

TEST(DetectBoundary, TetrahedronPair) {
  const std::vector<Simplex> t{{0, 1, 2, 3}, {1, 2, 3, 4}};
  EXPECT_EQ(detect_boundary_vertices(3, 5, t), (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(BallMesh2D, CountsAreaAndQuality) {
  for (double h : {0.5, 0.2, 0.1}) {
    const auto m = generate_ball_mesh(2, h);
    const int k = static_cast<int>(std::ceil(1.0 / h - 1e-12));
    EXPECT_EQ(m.simplex_count(), static_cast<std::size_t>(6 * k * k));
    EXPECT_EQ(m.vertex_count(), static_cast<std::size_t>(1 + 3 * k * (k + 1)));
    EXPECT_EQ(m.n_interior(), static_cast<std::size_t>(1 + 3 * k * (k - 1)));
    EXPECT_NEAR(m.total_volume(), 3.0 * k * std::sin(kPi / (3.0 * k)), 1e-12);
    const auto q = mesh_quality(m);
    EXPECT_LE(q.max_diameter, 2.0 * h);
    EXPECT_GE(q.a_h, 0.1 * h);
    for (std::size_t v = m.n_interior(); v < m.vertex_count(); ++v) EXPECT_NEAR(radius(m.vertices()[v]), 1.0, 1e-14);
    for (std::size_t v = 0; v < m.n_interior(); ++v) EXPECT_LT(radius(m.vertices()[v]), 1.0 - 0.5 * h);
  }
}

TEST(BallMesh3D, CountsVolumeAndQuality) {
  for (double h : {0.5, 0.25}) {
    const auto m = generate_ball_mesh(3, h);
    const int k = static_cast<int>(std::ceil(1.0 / h - 1e-12));
    EXPECT_EQ(m.simplex_count(), static_cast<std::size_t>(48 * k * k * k));
    EXPECT_EQ(m.n_interior(), static_cast<std::size_t>((2 * k - 1) * (2 * k - 1) * (2 * k - 1)));
    const double ball = 4.0 * kPi / 3.0;
    EXPECT_LE(m.total_volume(), ball);
    EXPECT_GE(m.total_volume(), ball - 0.6);
    for (std::size_t e = 0; e < m.simplex_count(); ++e) EXPECT_GT(m.volume(e), 0.0);
    const auto q = mesh_quality(m);
    EXPECT_LE(q.max_diameter, 2.0 * h);
    EXPECT_GE(q.a_h, 0.1 * h);
    for (std::size_t v = m.n_interior(); v < m.vertex_count(); ++v) EXPECT_NEAR(radius(m.vertices()[v]), 1.0, 1e-14);
  }
}

TEST(BallMesh, RejectsBadSizes) {
  EXPECT_THROW(generate_ball_mesh(2, 0.0), MeshError);
  EXPECT_THROW(generate_ball_mesh(2, 1.5), MeshError);
  EXPECT_THROW(generate_ball_mesh(1, 0.1), MeshError);
}

TEST(MeshIo, RoundTripIsExact) {
  const auto m = generate_ball_mesh(2, 0.3);
  std::stringstream buffer;
  write_mesh(buffer, m);
  const auto back = read_mesh(buffer);
  ASSERT_EQ(back.vertex_count(), m.vertex_count());
  ASSERT_EQ(back.simplex_count(), m.simplex_count());
  EXPECT_EQ(back.n_interior(), m.n_interior());
  EXPECT_EQ(back.vertices(), m.vertices());
  EXPECT_EQ(back.simplices(), m.simplices());
  // Volumes are recomputed from the stored corner order, so they agree to rounding.
  for (std::size_t e = 0; e < m.simplex_count(); ++e) EXPECT_DOUBLE_EQ(back.volume(e), m.volume(e));
}

TEST(MeshIo, ReadsCommentsAndBoundarySection) {
  std::istringstream in(
      "# unit square\n"
      "2 5 4\n"
      "0 0\n1 0\n1 1\n0 1\n0.5 0.5\n"
      "1 2 5\n2 3 5\n3 4 5\n4 1 5\n"
      "boundary 2\n1\n3\n");
  const auto m = read_mesh(in);
  EXPECT_EQ(m.n_interior(), 3u);
  EXPECT_DOUBLE_EQ(m.total_volume(), 1.0);
}

TEST(MeshIo, ParseErrorsCarryLineNumbers) {
  std::istringstream in("2 3 1\n0 0\n1 x\n0 1\n1 2 3\n");
  try {
    read_mesh(in);
    FAIL();
  } catch (const MeshError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::istringstream bad_index("2 3 1\n0 0\n1 0\n0 1\n1 2 4\n");
  EXPECT_THROW(read_mesh(bad_index), MeshError);
  EXPECT_THROW(load_mesh("/nonexistent/mesh.txt"), MeshError);
}

TEST(LumpedL2Error, ConstantOffset) {
  const auto m = generate_ball_mesh(2, 0.25);
  auto exact = [](const Point& p) { return p[0] * p[0] - p[1]; };
  std::vector<double> u(m.vertex_count());
  for (std::size_t v = 0; v < u.size(); ++v) u[v] = exact(m.vertices()[v]) + 0.5;
  EXPECT_NEAR(lumped_l2_error(m, u, exact), 0.5 * std::sqrt(m.total_volume()), 1e-14);
  for (std::size_t v = 0; v < u.size(); ++v) u[v] = exact(m.vertices()[v]);
  EXPECT_EQ(lumped_l2_error(m, u, exact), 0.0);
}

}  // namespace
}  // namespace gofd
