#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gofd/mesh.hpp"
#include "gofd/operator.hpp"
#include "gofd/transfer.hpp"

namespace gofd::fixture {

/// Square [-m h, m h]^2 triangulated on the lattice of spacing h, so every
/// vertex coincides with a node of OverlayGrid(2, h * n_fd, n_fd) for n_fd >= m.
inline SimplicialMesh lattice_square(int m, double h) {
  std::vector<Point> v;
  auto id = [m](int i, int j) { return (i + m) * (2 * m + 1) + (j + m); };
  for (int i = -m; i <= m; ++i) {
    for (int j = -m; j <= m; ++j) v.push_back({i * h, j * h, 0.0});
  }
  std::vector<Simplex> t;
  for (int i = -m; i < m; ++i) {
    for (int j = -m; j < m; ++j) {
      t.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), -1});
      t.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1), -1});
    }
  }
  return SimplicialMesh(2, std::move(v), std::move(t));
}

/// Columns of the operator applied to unit vectors.
inline Eigen::MatrixXd dense_operator(const GoFDOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.size());
  Eigen::MatrixXd a(n, n);
  std::vector<double> e(op.size(), 0.0), col(op.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    e[static_cast<std::size_t>(j)] = 1.0;
    op.apply(e, col);
    e[static_cast<std::size_t>(j)] = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) a(i, j) = col[static_cast<std::size_t>(i)];
  }
  return a;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace gofd::fixture
