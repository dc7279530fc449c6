#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gofd {

using Point = std::array<double, 3>;
/// Vertex indices of a simplex; entries past dim + 1 are unused.
using Simplex = std::array<int, 4>;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Conforming simplicial mesh of a bounded domain.
///
/// Construction validates the connectivity, orients every simplex to positive
/// volume, identifies boundary vertices and renumbers the vertices so that the
/// interior ones come first (stable within each group).
class SimplicialMesh {
 public:
  /// `boundary` lists boundary vertex indices (0-based, before renumbering);
  /// when absent they are the vertices of facets owned by exactly one simplex.
  SimplicialMesh(int dim, std::vector<Point> vertices, std::vector<Simplex> simplices,
                 std::optional<std::vector<int>> boundary = std::nullopt);

  int dim() const noexcept { return dim_; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t simplex_count() const noexcept { return simplices_.size(); }
  std::size_t n_interior() const noexcept { return n_interior_; }
  bool is_interior(std::size_t v) const noexcept { return v < n_interior_; }

  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  const std::vector<Simplex>& simplices() const noexcept { return simplices_; }
  std::span<const int> simplex(std::size_t k) const {
    return {simplices_[k].data(), static_cast<std::size_t>(dim_ + 1)};
  }
  double volume(std::size_t k) const noexcept { return volumes_[k]; }
  double total_volume() const noexcept;

  /// For vertex v after renumbering, its index in the input vertex list.
  const std::vector<int>& original_index() const noexcept { return original_index_; }

 private:
  int dim_;
  std::vector<Point> vertices_;
  std::vector<Simplex> simplices_;
  std::vector<double> volumes_;
  std::vector<int> original_index_;
  std::size_t n_interior_ = 0;
};

/// Signed volume of the simplex spanned by dim + 1 points.
double signed_volume(int dim, std::span<const Point> corners);

/// Vertex indices of facets owned by a single simplex (sorted, unique).
std::vector<int> detect_boundary_vertices(int dim, std::size_t vertex_count,
                                          const std::vector<Simplex>& simplices);

struct MeshQuality {
  double a_h = 0.0;           ///< minimum element height
  double h_bar = 0.0;         ///< n_elements^{-1/dim}
  double max_diameter = 0.0;  ///< longest edge
  std::size_t n_elements = 0;
};

MeshQuality mesh_quality(const SimplicialMesh& mesh);

/// Quasi-uniform mesh of the unit ball in 2 or 3 dimensions.
///
/// 2D: concentric rings of radius k/K with 6k vertices, K = ceil(1/target_h).
/// 3D: Kuhn subdivision of [-1, 1]^3 into 6 (2K)^3 tetrahedra, mapped onto the
/// ball by the equiangular cube-to-sphere projection of each shell |x|_inf = const.
SimplicialMesh generate_ball_mesh(int dim, double target_h);

/// sqrt(sum_K |K|/(dim+1) sum_{v in K} (u_v - exact(x_v))^2).
double lumped_l2_error(const SimplicialMesh& mesh, std::span<const double> nodal_values,
                       const std::function<double(const Point&)>& exact);

/// Text format: header `dim n_vertices n_simplices`, one vertex per line,
/// one simplex per line as 1-based indices, then optionally `boundary <count>`
/// followed by 1-based boundary vertex indices. Lines starting with '#' are ignored.
SimplicialMesh read_mesh(std::istream& in);
SimplicialMesh load_mesh(const std::filesystem::path& path);
void write_mesh(std::ostream& out, const SimplicialMesh& mesh);
void save_mesh(const std::filesystem::path& path, const SimplicialMesh& mesh);

}  // namespace gofd
