#include "gofd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "gofd/grid.hpp"

namespace gofd {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw MeshError("mesh dimension must be 1, 2 or 3");
}

Point sub(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

double norm(const Point& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

Point cross(const Point& a, const Point& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double facet_measure(int dim, std::span<const Point> corners) {
  switch (dim) {
    case 1: return 1.0;
    case 2: return norm(sub(corners[1], corners[0]));
    default: return 0.5 * norm(cross(sub(corners[1], corners[0]), sub(corners[2], corners[0])));
  }
}

std::array<Point, 4> corners_of(const std::vector<Point>& vertices, const Simplex& s, int dim) {
  std::array<Point, 4> c{};
  for (int i = 0; i <= dim; ++i) c[i] = vertices[static_cast<std::size_t>(s[i])];
  return c;
}

double longest_edge(std::span<const Point> c) {
  double e = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) e = std::max(e, norm(sub(c[i], c[j])));
  }
  return e;
}

}  // namespace

double signed_volume(int dim, std::span<const Point> c) {
  switch (dim) {
    case 1: return c[1][0] - c[0][0];
    case 2: {
      const Point a = sub(c[1], c[0]);
      const Point b = sub(c[2], c[0]);
      return 0.5 * (a[0] * b[1] - a[1] * b[0]);
    }
    case 3: {
      const Point a = sub(c[1], c[0]);
      const Point b = sub(c[2], c[0]);
      const Point d = sub(c[3], c[0]);
      const Point axb = cross(a, b);
      return (axb[0] * d[0] + axb[1] * d[1] + axb[2] * d[2]) / 6.0;
    }
    default: throw MeshError("mesh dimension must be 1, 2 or 3");
  }
}

std::vector<int> detect_boundary_vertices(int dim, std::size_t vertex_count,
                                          const std::vector<Simplex>& simplices) {
  check_dim(dim);
  std::vector<std::array<int, 3>> facets;
  facets.reserve(simplices.size() * static_cast<std::size_t>(dim + 1));
  for (const Simplex& s : simplices) {
    for (int skip = 0; skip <= dim; ++skip) {
      std::array<int, 3> f{-1, -1, -1};
      int n = 0;
      for (int i = 0; i <= dim; ++i) {
        if (i != skip) f[n++] = s[i];
      }
      std::sort(f.begin(), f.begin() + n);
      facets.push_back(f);
    }
  }
  std::sort(facets.begin(), facets.end());
  std::vector<char> on_boundary(vertex_count, 0);
  for (std::size_t i = 0; i < facets.size();) {
    std::size_t j = i + 1;
    while (j < facets.size() && facets[j] == facets[i]) ++j;
    if (j - i == 1) {
      for (int k = 0; k < dim; ++k) on_boundary[static_cast<std::size_t>(facets[i][k])] = 1;
    }
    i = j;
  }
  std::vector<int> out;
  for (std::size_t v = 0; v < vertex_count; ++v) {
    if (on_boundary[v]) out.push_back(static_cast<int>(v));
  }
  return out;
}

SimplicialMesh::SimplicialMesh(int dim, std::vector<Point> vertices, std::vector<Simplex> simplices,
                               std::optional<std::vector<int>> boundary)
    : dim_(dim) {
  check_dim(dim);
  if (vertices.empty() || simplices.empty()) throw MeshError("mesh must have vertices and simplices");
  const auto nv = vertices.size();
  for (std::size_t v = 0; v < nv; ++v) {
    for (int d = 0; d < 3; ++d) {
      if (!std::isfinite(vertices[v][d])) throw MeshError("vertex " + std::to_string(v) + " has non-finite coordinates");
      if (d >= dim && vertices[v][d] != 0.0) vertices[v][d] = 0.0;
    }
  }

  std::vector<char> used(nv, 0);
  volumes_.resize(simplices.size());
  for (std::size_t k = 0; k < simplices.size(); ++k) {
    Simplex& s = simplices[k];
    for (int i = 0; i <= dim; ++i) {
      if (s[i] < 0 || static_cast<std::size_t>(s[i]) >= nv) {
        throw MeshError("simplex " + std::to_string(k) + " references vertex " + std::to_string(s[i]) +
                        " out of range");
      }
      for (int j = 0; j < i; ++j) {
        if (s[i] == s[j]) {
          throw MeshError("degenerate simplex " + std::to_string(k) + ": vertex " + std::to_string(s[i]) +
                          " repeated");
        }
      }
      used[static_cast<std::size_t>(s[i])] = 1;
    }
    for (int i = dim + 1; i < 4; ++i) s[i] = -1;
    const auto c = corners_of(vertices, s, dim);
    const std::span<const Point> cs(c.data(), static_cast<std::size_t>(dim + 1));
    double vol = signed_volume(dim, cs);
    const double scale = std::pow(longest_edge(cs), dim);
    if (!(std::abs(vol) > 1e-13 * scale)) {
      throw MeshError("degenerate simplex " + std::to_string(k) + ": zero volume");
    }
    if (vol < 0.0) {
      std::swap(s[0], s[1]);
      vol = -vol;
    }
    volumes_[k] = vol;
  }
  for (std::size_t v = 0; v < nv; ++v) {
    if (!used[v]) throw MeshError("vertex " + std::to_string(v) + " belongs to no simplex");
  }

  std::vector<int> bnd = boundary ? std::move(*boundary) : detect_boundary_vertices(dim, nv, simplices);
  std::vector<char> is_bnd(nv, 0);
  for (int b : bnd) {
    if (b < 0 || static_cast<std::size_t>(b) >= nv) throw MeshError("boundary vertex " + std::to_string(b) + " out of range");
    is_bnd[static_cast<std::size_t>(b)] = 1;
  }

  std::vector<int> new_index(nv);
  original_index_.reserve(nv);
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t v = 0; v < nv; ++v) {
      if (is_bnd[v] == pass) {
        new_index[v] = static_cast<int>(original_index_.size());
        original_index_.push_back(static_cast<int>(v));
      }
    }
    if (pass == 0) n_interior_ = original_index_.size();
  }
  vertices_.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) vertices_[static_cast<std::size_t>(new_index[v])] = vertices[v];
  for (Simplex& s : simplices) {
    for (int i = 0; i <= dim; ++i) s[i] = new_index[static_cast<std::size_t>(s[i])];
  }
  simplices_ = std::move(simplices);
}

double SimplicialMesh::total_volume() const noexcept {
  double v = 0.0;
  for (double x : volumes_) v += x;
  return v;
}

MeshQuality mesh_quality(const SimplicialMesh& mesh) {
  const int dim = mesh.dim();
  MeshQuality q;
  q.n_elements = mesh.simplex_count();
  q.a_h = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < mesh.simplex_count(); ++k) {
    const auto c = corners_of(mesh.vertices(), mesh.simplices()[k], dim);
    double max_facet = 0.0;
    for (int skip = 0; skip <= dim; ++skip) {
      std::array<Point, 3> f{};
      int n = 0;
      for (int i = 0; i <= dim; ++i) {
        if (i != skip) f[n++] = c[i];
      }
      max_facet = std::max(max_facet, facet_measure(dim, std::span<const Point>(f.data(), static_cast<std::size_t>(n))));
    }
    q.a_h = std::min(q.a_h, dim * mesh.volume(k) / max_facet);
    q.max_diameter = std::max(q.max_diameter, longest_edge(std::span<const Point>(c.data(), static_cast<std::size_t>(dim + 1))));
  }
  q.h_bar = std::pow(static_cast<double>(q.n_elements), -1.0 / dim);
  return q;
}

namespace {

SimplicialMesh ring_disk(double target_h) {
  const int rings = static_cast<int>(std::ceil(1.0 / target_h - 1e-12));
  std::vector<Point> vertices{{0.0, 0.0, 0.0}};
  std::vector<int> first{0};  // first vertex of each ring
  for (int k = 1; k <= rings; ++k) {
    first.push_back(static_cast<int>(vertices.size()));
    const double r = static_cast<double>(k) / rings;
    const int count = 6 * k;
    for (int i = 0; i < count; ++i) {
      const double t = 2.0 * kPi * i / count;
      vertices.push_back({r * std::cos(t), r * std::sin(t), 0.0});
    }
  }
  std::vector<Simplex> simplices;
  simplices.reserve(static_cast<std::size_t>(6 * rings * rings));
  for (int i = 0; i < 6; ++i) simplices.push_back({0, 1 + i, 1 + (i + 1) % 6, -1});
  for (int k = 2; k <= rings; ++k) {
    const int n0 = 6 * (k - 1);
    const int n1 = 6 * k;
    const int b0 = first[static_cast<std::size_t>(k - 1)];
    const int b1 = first[static_cast<std::size_t>(k)];
    int i = 0;
    int j = 0;
    // Walk both rings in angle order; each step closes one triangle.
    while (i < n0 || j < n1) {
      const double next_inner = static_cast<double>(i + 1) / n0;
      const double next_outer = static_cast<double>(j + 1) / n1;
      const int a = b0 + i % n0;
      const int b = b1 + j % n1;
      if (j == n1 || (i < n0 && next_inner < next_outer)) {
        simplices.push_back({a, b0 + (i + 1) % n0, b, -1});
        ++i;
      } else {
        simplices.push_back({a, b, b1 + (j + 1) % n1, -1});
        ++j;
      }
    }
  }
  return SimplicialMesh(2, std::move(vertices), std::move(simplices));
}

SimplicialMesh cube_sphere_ball(double target_h) {
  const int half = static_cast<int>(std::ceil(1.0 / target_h - 1e-12));
  const int cells = 2 * half;
  const int per_axis = cells + 1;
  auto id = [per_axis](int i, int j, int k) { return (i * per_axis + j) * per_axis + k; };

  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>(per_axis) * per_axis * per_axis);
  for (int i = 0; i <= cells; ++i) {
    for (int j = 0; j <= cells; ++j) {
      for (int k = 0; k <= cells; ++k) {
        const std::array<int, 3> g{i - half, j - half, k - half};
        const int shell = std::max({std::abs(g[0]), std::abs(g[1]), std::abs(g[2])});
        if (shell == 0) {
          vertices.push_back({0.0, 0.0, 0.0});
          continue;
        }
        Point w{};
        double len = 0.0;
        for (int d = 0; d < 3; ++d) {
          w[d] = std::tan(0.25 * kPi * static_cast<double>(g[d]) / shell);
          len += w[d] * w[d];
        }
        len = std::sqrt(len);
        const double radius = static_cast<double>(shell) / half;
        vertices.push_back({radius * w[0] / len, radius * w[1] / len, radius * w[2] / len});
      }
    }
  }

  static constexpr std::array<std::array<int, 3>, 6> kPermutations{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<Simplex> simplices;
  simplices.reserve(static_cast<std::size_t>(6) * cells * cells * cells);
  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < cells; ++j) {
      for (int k = 0; k < cells; ++k) {
        // Kuhn paths start at the cell corner nearest the centre so that the
        // subdivision is mirrored across the coordinate planes.
        const std::array<int, 3> cell{i, j, k};
        std::array<int, 3> start{};
        std::array<int, 3> step_dir{};
        for (std::size_t d = 0; d < 3; ++d) {
          const bool positive = cell[d] >= half;
          start[d] = positive ? cell[d] : cell[d] + 1;
          step_dir[d] = positive ? 1 : -1;
        }
        for (const auto& perm : kPermutations) {
          std::array<int, 3> c = start;
          Simplex s{};
          s[0] = id(c[0], c[1], c[2]);
          for (int step = 0; step < 3; ++step) {
            const auto axis = static_cast<std::size_t>(perm[static_cast<std::size_t>(step)]);
            c[axis] += step_dir[axis];
            s[static_cast<std::size_t>(step + 1)] = id(c[0], c[1], c[2]);
          }
          simplices.push_back(s);
        }
      }
    }
  }
  return SimplicialMesh(3, std::move(vertices), std::move(simplices));
}

}  // namespace

SimplicialMesh generate_ball_mesh(int dim, double target_h) {
  if (!(target_h > 0.0 && target_h < 1.0)) throw MeshError("ball mesh target_h must lie in (0, 1)");
  if (dim == 2) {
    if (target_h < 1e-3) throw MeshError("ball mesh target_h too small for the memory budget");
    return ring_disk(target_h);
  }
  if (dim == 3) {
    if (target_h < 1.0 / 64) throw MeshError("ball mesh target_h too small for the memory budget");
    return cube_sphere_ball(target_h);
  }
  throw MeshError("ball meshes are generated in 2 or 3 dimensions only");
}

double lumped_l2_error(const SimplicialMesh& mesh, std::span<const double> nodal_values,
                       const std::function<double(const Point&)>& exact) {
  if (nodal_values.size() != mesh.vertex_count()) {
    throw std::invalid_argument("nodal values must cover every mesh vertex");
  }
  std::vector<double> err2(mesh.vertex_count());
  for (std::size_t v = 0; v < err2.size(); ++v) {
    const double e = nodal_values[v] - exact(mesh.vertices()[v]);
    err2[v] = e * e;
  }
  const int dim = mesh.dim();
  double acc = 0.0;
  for (std::size_t k = 0; k < mesh.simplex_count(); ++k) {
    double local = 0.0;
    for (int i = 0; i <= dim; ++i) local += err2[static_cast<std::size_t>(mesh.simplices()[k][i])];
    acc += mesh.volume(k) / (dim + 1) * local;
  }
  return std::sqrt(acc);
}

namespace {

/// Line reader that skips blank and comment lines and remembers line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::istringstream& out) {
    std::string line;
    while (std::getline(in_, line)) {
      ++number_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      out.clear();
      out.str(line);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw MeshError("mesh parse error at line " + std::to_string(number_) + ": " + what);
  }

  std::size_t line() const noexcept { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

void expect_end(std::istringstream& ls, LineReader& reader) {
  std::string extra;
  if (ls >> extra) reader.fail("unexpected trailing token '" + extra + "'");
}

}  // namespace

SimplicialMesh read_mesh(std::istream& in) {
  LineReader reader(in);
  std::istringstream ls;
  if (!reader.next(ls)) reader.fail("missing header");
  int dim = 0;
  long long nv = 0;
  long long ns = 0;
  if (!(ls >> dim >> nv >> ns)) reader.fail("header must be 'dim n_vertices n_simplices'");
  expect_end(ls, reader);
  if (dim < 1 || dim > 3) reader.fail("dimension must be 1, 2 or 3");
  if (nv < 1 || ns < 1) reader.fail("vertex and simplex counts must be positive");

  std::vector<Point> vertices(static_cast<std::size_t>(nv), Point{0.0, 0.0, 0.0});
  for (auto& p : vertices) {
    if (!reader.next(ls)) reader.fail("unexpected end of file in vertex list");
    for (int d = 0; d < dim; ++d) {
      if (!(ls >> p[d])) reader.fail("expected " + std::to_string(dim) + " vertex coordinates");
    }
    expect_end(ls, reader);
  }
  std::vector<Simplex> simplices(static_cast<std::size_t>(ns), Simplex{-1, -1, -1, -1});
  for (auto& s : simplices) {
    if (!reader.next(ls)) reader.fail("unexpected end of file in simplex list");
    for (int i = 0; i <= dim; ++i) {
      long long idx = 0;
      if (!(ls >> idx)) reader.fail("expected " + std::to_string(dim + 1) + " vertex indices");
      if (idx < 1 || idx > nv) reader.fail("vertex index " + std::to_string(idx) + " out of range");
      s[i] = static_cast<int>(idx - 1);
    }
    expect_end(ls, reader);
  }

  std::optional<std::vector<int>> boundary;
  if (reader.next(ls)) {
    std::string keyword;
    long long count = -1;
    if (!(ls >> keyword >> count) || keyword != "boundary" || count < 0) {
      reader.fail("expected 'boundary <count>'");
    }
    expect_end(ls, reader);
    boundary.emplace();
    while (static_cast<long long>(boundary->size()) < count) {
      if (!reader.next(ls)) reader.fail("unexpected end of file in boundary list");
      long long idx = 0;
      while (ls >> idx) {
        if (idx < 1 || idx > nv) reader.fail("boundary index " + std::to_string(idx) + " out of range");
        boundary->push_back(static_cast<int>(idx - 1));
      }
      if (!ls.eof()) reader.fail("malformed boundary index");
    }
    if (static_cast<long long>(boundary->size()) != count) reader.fail("boundary count mismatch");
    if (reader.next(ls)) reader.fail("unexpected content after boundary section");
  }
  return SimplicialMesh(dim, std::move(vertices), std::move(simplices), std::move(boundary));
}

SimplicialMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path.string());
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const SimplicialMesh& mesh) {
  const int dim = mesh.dim();
  out << dim << ' ' << mesh.vertex_count() << ' ' << mesh.simplex_count() << '\n';
  out << std::setprecision(17);
  for (const Point& p : mesh.vertices()) {
    for (int d = 0; d < dim; ++d) out << (d ? " " : "") << p[d];
    out << '\n';
  }
  for (const Simplex& s : mesh.simplices()) {
    for (int i = 0; i <= dim; ++i) out << (i ? " " : "") << s[i] + 1;
    out << '\n';
  }
  out << "boundary " << mesh.vertex_count() - mesh.n_interior() << '\n';
  for (std::size_t v = mesh.n_interior(); v < mesh.vertex_count(); ++v) out << v + 1 << '\n';
}

void save_mesh(const std::filesystem::path& path, const SimplicialMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file " + path.string());
  write_mesh(out, mesh);
  if (!out) throw MeshError("failed writing mesh file " + path.string());
}

}  // namespace gofd
