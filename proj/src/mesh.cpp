#include "gdm/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

#include "gdm/error.hpp"

namespace gdm {

std::array<std::size_t, 4> CartesianGrid::square_nodes(int i, int j) const {
  return {node_index(i, j), node_index(i + 1, j), node_index(i + 1, j + 1), node_index(i, j + 1)};
}

double CartesianGrid::recon_area(int i, int j) const {
  const double wx = (i == 0 || i == n) ? 0.5 * h : h;
  const double wy = (j == 0 || j == n) ? 0.5 * h : h;
  return wx * wy;
}

CartesianGrid build_cartesian(int n, double length) {
  if (n < 2) throw InvalidParameter("Cartesian grid needs at least 2 cells per side");
  if (!(length > 0.0)) throw InvalidParameter("domain length must be positive");
  return {n, length, length / n};
}

double TriangularMesh::signed_area(std::size_t t) const {
  const auto& tri = triangles[t];
  const Vec2 a = vertices[static_cast<std::size_t>(tri[0])];
  const Vec2 b = vertices[static_cast<std::size_t>(tri[1])];
  const Vec2 c = vertices[static_cast<std::size_t>(tri[2])];
  return 0.5 * cross(b - a, c - a);
}

double TriangularMesh::total_area() const {
  double s = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) s += signed_area(t);
  return s;
}

double TriangularMesh::max_edge_length() const {
  double h = 0.0;
  for (const auto& tri : triangles) {
    for (int k = 0; k < 3; ++k) {
      const Vec2 a = vertices[static_cast<std::size_t>(tri[static_cast<std::size_t>(k)])];
      const Vec2 b = vertices[static_cast<std::size_t>(tri[static_cast<std::size_t>((k + 1) % 3)])];
      h = std::max(h, norm(b - a));
    }
  }
  return h;
}

Vec2 TriangularMesh::lower_corner() const {
  Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (const auto& v : vertices) lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
  return lo;
}

Vec2 TriangularMesh::upper_corner() const {
  Vec2 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& v : vertices) hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
  return hi;
}

TriangularMesh make_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles) {
  TriangularMesh mesh{std::move(vertices), std::move(triangles), {}};
  const auto nv = static_cast<int>(mesh.vertices.size());
  if (mesh.triangles.empty()) throw ValidationError("mesh has no triangles");

  std::vector<int> used(mesh.vertices.size(), 0);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    for (int v : mesh.triangles[t]) {
      if (v < 0 || v >= nv) throw ValidationError("triangle " + std::to_string(t) + " references a missing vertex");
      used[static_cast<std::size_t>(v)] = 1;
    }
    if (!(mesh.signed_area(t) > 0.0)) {
      throw ValidationError("triangle " + std::to_string(t) + " is inverted or degenerate (signed area <= 0)");
    }
  }
  if (std::find(used.begin(), used.end(), 0) != used.end()) throw ValidationError("mesh has unreferenced vertices");

  // Each directed edge may appear once; an interior edge appears once in each
  // direction.
  std::map<std::pair<int, int>, int> directed;
  for (const auto& tri : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = tri[static_cast<std::size_t>(k)];
      const int b = tri[static_cast<std::size_t>((k + 1) % 3)];
      if (++directed[{a, b}] > 1) {
        throw ValidationError("non-conforming mesh: edge (" + std::to_string(a) + ", " + std::to_string(b) +
                              ") is shared by more than 2 triangles or by overlapping triangles");
      }
    }
  }

  const Vec2 lo = mesh.lower_corner();
  const Vec2 hi = mesh.upper_corner();
  const double scale = std::max(hi.x - lo.x, hi.y - lo.y);
  const double tol = 1e-10 * scale;
  auto on_box_side = [&](Vec2 a, Vec2 b) {
    return (std::abs(a.x - lo.x) <= tol && std::abs(b.x - lo.x) <= tol) ||
           (std::abs(a.x - hi.x) <= tol && std::abs(b.x - hi.x) <= tol) ||
           (std::abs(a.y - lo.y) <= tol && std::abs(b.y - lo.y) <= tol) ||
           (std::abs(a.y - hi.y) <= tol && std::abs(b.y - hi.y) <= tol);
  };
  for (const auto& [edge, count] : directed) {
    if (directed.count({edge.second, edge.first}) != 0) continue;
    const Vec2 a = mesh.vertices[static_cast<std::size_t>(edge.first)];
    const Vec2 b = mesh.vertices[static_cast<std::size_t>(edge.second)];
    if (!on_box_side(a, b)) {
      throw ValidationError("non-conforming mesh: edge (" + std::to_string(edge.first) + ", " +
                            std::to_string(edge.second) + ") has one triangle but is not on the domain boundary");
    }
    const Vec2 d = b - a;
    mesh.boundary_edges.push_back({edge.first, edge.second, (1.0 / norm(d)) * Vec2{d.y, -d.x}});
  }

  const double box = (hi.x - lo.x) * (hi.y - lo.y);
  if (std::abs(mesh.total_area() - box) > 1e-12 * box) {
    throw ValidationError("triangle areas do not sum to the domain area");
  }
  return mesh;
}

TriangularMesh build_structured_triangulation(int replication, double length, TrianglePattern pattern) {
  if (replication < 1) throw InvalidParameter("replication count must be at least 1");
  if (!(length > 0.0)) throw InvalidParameter("domain length must be positive");
  const int r = replication;
  const double h = length / r;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  auto corner = [r](int i, int j) { return j * (r + 1) + i; };
  for (int j = 0; j <= r; ++j) {
    for (int i = 0; i <= r; ++i) vertices.push_back({i * h, j * h});
  }
  for (int j = 0; j < r; ++j) {
    for (int i = 0; i < r; ++i) {
      const int a = corner(i, j), b = corner(i + 1, j), c = corner(i + 1, j + 1), d = corner(i, j + 1);
      if (pattern == TrianglePattern::diagonal) {
        triangles.push_back({a, b, c});
        triangles.push_back({a, c, d});
      } else {
        const int m = static_cast<int>(vertices.size());
        vertices.push_back({(i + 0.5) * h, (j + 0.5) * h});
        triangles.push_back({a, b, m});
        triangles.push_back({b, c, m});
        triangles.push_back({c, d, m});
        triangles.push_back({d, a, m});
      }
    }
  }
  return make_mesh(std::move(vertices), std::move(triangles));
}

int replication_for_level(int level) {
  if (level < 1 || level > 12) throw InvalidParameter("mesh level must lie in [1, 12]");
  return 1 << level;
}

namespace {

// Next non-empty line with comments stripped; returns false at end of input.
bool next_content_line(std::istream& in, std::string& line, int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

std::size_t read_header(std::istream& in, const std::string& keyword, int& line_no) {
  std::string line;
  if (!next_content_line(in, line, line_no)) throw ParseError("expected '" + keyword + " <count>'", line_no + 1);
  std::istringstream ss(line);
  std::string word;
  long long count = -1;
  std::string extra;
  if (!(ss >> word >> count) || word != keyword || count < 0 || (ss >> extra)) {
    throw ParseError("expected '" + keyword + " <count>'", line_no);
  }
  return static_cast<std::size_t>(count);
}

}  // namespace

TriangularMesh read_mesh(std::istream& in) {
  int line_no = 0;
  std::string line;
  const std::size_t nv = read_header(in, "vertices", line_no);
  std::vector<Vec2> vertices(nv);
  for (auto& v : vertices) {
    if (!next_content_line(in, line, line_no)) throw ParseError("unexpected end of file in vertex list", line_no + 1);
    std::istringstream ss(line);
    std::string extra;
    if (!(ss >> v.x >> v.y) || (ss >> extra)) throw ParseError("expected vertex coordinates 'x y'", line_no);
  }
  const std::size_t nt = read_header(in, "triangles", line_no);
  std::vector<std::array<int, 3>> triangles(nt);
  for (auto& t : triangles) {
    if (!next_content_line(in, line, line_no)) throw ParseError("unexpected end of file in triangle list", line_no + 1);
    std::istringstream ss(line);
    std::string extra;
    if (!(ss >> t[0] >> t[1] >> t[2]) || (ss >> extra)) throw ParseError("expected triangle indices 'i j k'", line_no);
  }
  if (next_content_line(in, line, line_no)) throw ParseError("trailing content after triangle list", line_no);
  return make_mesh(std::move(vertices), std::move(triangles));
}

TriangularMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

void write_mesh(const TriangularMesh& mesh, std::ostream& out) {
  out << "vertices " << mesh.vertices.size() << '\n' << std::setprecision(17);
  for (const auto& v : mesh.vertices) out << v.x << ' ' << v.y << '\n';
  out << "triangles " << mesh.triangles.size() << '\n';
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void save_mesh(const TriangularMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh file '" + path + "'");
  write_mesh(mesh, out);
}

DualMesh build_dual(const TriangularMesh& mesh) {
  DualMesh dual;
  dual.measures.assign(mesh.vertices.size(), 0.0);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const double third = mesh.signed_area(t) / 3.0;
    for (int v : mesh.triangles[t]) dual.measures[static_cast<std::size_t>(v)] += third;
  }
  return dual;
}

}  // namespace gdm
