#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace gdm {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Uniform Cartesian grid of (0, L)^2 with N cells per side. Unknowns live on
// the (N+1)^2 lattice nodes; each node owns the h-box centred on it clipped to
// the domain (area h^2 inside, h^2/2 on edges, h^2/4 at corners).
struct CartesianGrid {
  int n = 0;
  double length = 0.0;
  double h = 0.0;

  std::size_t nodes_per_side() const { return static_cast<std::size_t>(n) + 1; }
  std::size_t node_count() const { return nodes_per_side() * nodes_per_side(); }
  std::size_t square_count() const { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }
  std::size_t node_index(int i, int j) const {
    return static_cast<std::size_t>(j) * nodes_per_side() + static_cast<std::size_t>(i);
  }
  Vec2 node(int i, int j) const { return {i * h, j * h}; }
  // Lower-left, lower-right, upper-right, upper-left node of square (i, j).
  std::array<std::size_t, 4> square_nodes(int i, int j) const;
  double recon_area(int i, int j) const;
};

CartesianGrid build_cartesian(int n, double length);

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  // Outward unit normal.
  Vec2 normal;
};

// Conforming, positively oriented triangulation of a rectangle.
struct TriangularMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;

  double signed_area(std::size_t t) const;
  double total_area() const;
  double max_edge_length() const;
  Vec2 lower_corner() const;
  Vec2 upper_corner() const;
};

// Builds boundary edges and checks every invariant: positive orientation,
// conformity (each directed edge used once), boundary edges on the bounding
// box and areas summing to the bounding-box area. Throws ValidationError.
TriangularMesh make_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles);

enum class TrianglePattern {
  // every square cut along the same diagonal
  diagonal,
  // every square cut along both diagonals with a centre vertex
  criss_cross,
};

// (0, L)^2 covered by `replication` x `replication` copies of the base square
// pattern.
TriangularMesh build_structured_triangulation(int replication, double length,
                                              TrianglePattern pattern = TrianglePattern::criss_cross);

// Stand-in for the benchmark family "Mesh<level>": 2^level copies per side.
int replication_for_level(int level);

TriangularMesh load_mesh(const std::string& path);
TriangularMesh read_mesh(std::istream& in);
void write_mesh(const TriangularMesh& mesh, std::ostream& out);
void save_mesh(const TriangularMesh& mesh, const std::string& path);

struct DualMesh {
  // Barycentric dual cell measure per vertex.
  std::vector<double> measures;
};

DualMesh build_dual(const TriangularMesh& mesh);

}  // namespace gdm
