#include "gdm/gd.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gdm/error.hpp"

namespace gdm {

namespace {

void add_rectangle_quadrature(std::vector<QuadraturePoint>& q, Vec2 lo, Vec2 hi) {
  // 2x2 tensor Gauss-Legendre
  const double g = 0.5 / std::sqrt(3.0);
  const Vec2 c = 0.5 * (lo + hi);
  const Vec2 d = hi - lo;
  const double w = 0.25 * d.x * d.y;
  for (double sy : {-g, g}) {
    for (double sx : {-g, g}) q.push_back({{c.x + sx * d.x, c.y + sy * d.y}, w});
  }
}

void add_triangle_quadrature(std::vector<QuadraturePoint>& q, Vec2 a, Vec2 b, Vec2 c) {
  // edge-midpoint rule, exact for quadratics
  const double w = 0.5 * std::abs(cross(b - a, c - a)) / 3.0;
  q.push_back({0.5 * (a + b), w});
  q.push_back({0.5 * (b + c), w});
  q.push_back({0.5 * (c + a), w});
}

void index_subcells(GradientDiscretisation& gd) {
  gd.grad_subcell_offsets.assign(gd.grad_count() + 1, 0);
  for (std::size_t s = 0; s < gd.subcells.size(); ++s) {
    if (s > 0 && gd.subcells[s].grad < gd.subcells[s - 1].grad) throw InvalidParameter("sub-cells not grouped by grad cell");
    ++gd.grad_subcell_offsets[gd.subcells[s].grad + 1];
  }
  for (std::size_t g = 0; g < gd.grad_count(); ++g) gd.grad_subcell_offsets[g + 1] += gd.grad_subcell_offsets[g];
}

}  // namespace

GradientDiscretisation scheme_a(const CartesianGrid& grid) {
  if (grid.n < 2 || !(grid.h > 0.0)) throw InvalidParameter("invalid Cartesian grid");
  GradientDiscretisation gd;
  gd.scheme = "A";
  const int n = grid.n;
  const double h = grid.h;
  const double L = grid.length;
  gd.ndof = grid.node_count();
  gd.mesh_size = h;
  gd.domain_lo = {0.0, 0.0};
  gd.domain_hi = {L, L};
  gd.domain_measure = L * L;

  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const Vec2 p = grid.node(i, j);
      gd.anchors.push_back(p);
      gd.recon_anchors.push_back(p);
      gd.recon_measures.push_back(grid.recon_area(i, j));
      const Vec2 lo{std::max(0.0, p.x - 0.5 * h), std::max(0.0, p.y - 0.5 * h)};
      const Vec2 hi{std::min(L, p.x + 0.5 * h), std::min(L, p.y + 0.5 * h)};
      gd.recon_polygons.push_back({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}});
    }
  }
  gd.pi_map = SparseMatrix::identity(gd.ndof);

  std::vector<Triplet> gx, gy;
  gx.reserve(gd.ndof * 12);
  gy.reserve(gd.ndof * 12);
  gd.primal_count = grid.square_count();
  const double inv_h = 1.0 / h;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const auto [ll, lr, ur, ul] = grid.square_nodes(i, j);
      const std::size_t square = static_cast<std::size_t>(j) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
      const Vec2 o = grid.node(i, j);
      const Vec2 mid = o + Vec2{0.5 * h, 0.5 * h};
      struct Quadrant {
        std::size_t corner;
        // x-derivative from the horizontal edge (from -> to), y from the vertical one
        std::size_t x_from, x_to, y_from, y_to;
        Vec2 lo, hi;
      };
      const Quadrant quads[4] = {
          {ll, ll, lr, ll, ul, o, mid},
          {lr, ll, lr, lr, ur, {mid.x, o.y}, {o.x + h, mid.y}},
          {ur, ul, ur, lr, ur, mid, o + Vec2{h, h}},
          {ul, ul, ur, ll, ul, {o.x, mid.y}, {mid.x, o.y + h}},
      };
      for (const auto& q : quads) {
        const std::size_t g = gd.grad_measures.size();
        const double area = 0.25 * h * h;
        gd.grad_measures.push_back(area);
        gd.grad_primal.push_back(square);
        // Same pattern in both components: every stencil dof appears in both.
        const std::size_t dofs[3] = {q.corner, q.x_from == q.corner ? q.x_to : q.x_from,
                                     q.y_from == q.corner ? q.y_to : q.y_from};
        for (std::size_t d : dofs) {
          double cx = 0.0, cy = 0.0;
          if (d == q.x_to) cx += inv_h;
          if (d == q.x_from) cx -= inv_h;
          if (d == q.y_to) cy += inv_h;
          if (d == q.y_from) cy -= inv_h;
          gx.push_back({g, d, cx});
          gy.push_back({g, d, cy});
        }
        SubCell sc;
        sc.measure = area;
        sc.recon = q.corner;
        sc.grad = g;
        sc.quad_begin = gd.quadrature.size();
        add_rectangle_quadrature(gd.quadrature, q.lo, q.hi);
        sc.quad_count = gd.quadrature.size() - sc.quad_begin;
        gd.subcells.push_back(sc);
      }
    }
  }
  gd.grad_x = SparseMatrix(gd.grad_measures.size(), gd.ndof, std::move(gx));
  gd.grad_y = SparseMatrix(gd.grad_measures.size(), gd.ndof, std::move(gy));
  index_subcells(gd);

  // Boundary half-edges: bottom, right, top, left (counter-clockwise).
  auto add_edge = [&](std::size_t a, std::size_t b, Vec2 normal) {
    const Vec2 pa = gd.anchors[a], pb = gd.anchors[b];
    const Vec2 m = 0.5 * (pa + pb);
    gd.boundary.push_back({a, pa, m, normal});
    gd.boundary.push_back({b, m, pb, normal});
  };
  for (int i = 0; i < n; ++i) add_edge(grid.node_index(i, 0), grid.node_index(i + 1, 0), {0.0, -1.0});
  for (int j = 0; j < n; ++j) add_edge(grid.node_index(n, j), grid.node_index(n, j + 1), {1.0, 0.0});
  for (int i = n; i > 0; --i) add_edge(grid.node_index(i, n), grid.node_index(i - 1, n), {0.0, 1.0});
  for (int j = n; j > 0; --j) add_edge(grid.node_index(0, j), grid.node_index(0, j - 1), {-1.0, 0.0});
  return gd;
}

GradientDiscretisation scheme_b(const TriangularMesh& mesh, const DualMesh& dual) {
  if (dual.measures.size() != mesh.vertices.size()) throw InvalidParameter("dual mesh does not match triangulation");
  GradientDiscretisation gd;
  gd.scheme = "B";
  gd.ndof = mesh.vertices.size();
  gd.mesh_size = mesh.max_edge_length();
  gd.domain_lo = mesh.lower_corner();
  gd.domain_hi = mesh.upper_corner();
  gd.domain_measure = mesh.total_area();
  gd.anchors = mesh.vertices;
  gd.recon_anchors = mesh.vertices;
  gd.recon_measures = dual.measures;
  gd.pi_map = SparseMatrix::identity(gd.ndof);
  gd.primal_count = mesh.triangles.size();

  std::vector<Triplet> gx, gy;
  // Per vertex, pieces (start neighbour, end neighbour, points) of the dual
  // cell boundary, used to assemble the dual polygons.
  struct Piece {
    int from;
    int to;
    Vec2 p0, p1, p2;
  };
  std::vector<std::vector<Piece>> pieces(gd.ndof);

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.signed_area(t);
    const double inv2a = 0.5 / area;
    const Vec2 p[3] = {mesh.vertices[static_cast<std::size_t>(tri[0])], mesh.vertices[static_cast<std::size_t>(tri[1])],
                       mesh.vertices[static_cast<std::size_t>(tri[2])]};
    const Vec2 centroid = (1.0 / 3.0) * (p[0] + p[1] + p[2]);
    gd.grad_measures.push_back(area);
    gd.grad_primal.push_back(t);
    for (int k = 0; k < 3; ++k) {
      const Vec2 b = p[(k + 1) % 3];
      const Vec2 c = p[(k + 2) % 3];
      const auto v = static_cast<std::size_t>(tri[static_cast<std::size_t>(k)]);
      gx.push_back({t, v, (b.y - c.y) * inv2a});
      gy.push_back({t, v, (c.x - b.x) * inv2a});

      const Vec2 a = p[k];
      const Vec2 mab = 0.5 * (a + b);
      const Vec2 mac = 0.5 * (a + c);
      SubCell sc;
      sc.measure = area / 3.0;
      sc.recon = v;
      sc.grad = t;
      sc.quad_begin = gd.quadrature.size();
      add_triangle_quadrature(gd.quadrature, a, mab, centroid);
      add_triangle_quadrature(gd.quadrature, a, centroid, mac);
      sc.quad_count = gd.quadrature.size() - sc.quad_begin;
      gd.subcells.push_back(sc);
      pieces[v].push_back({tri[static_cast<std::size_t>((k + 1) % 3)], tri[static_cast<std::size_t>((k + 2) % 3)],
                           mab, centroid, mac});
    }
  }
  gd.grad_x = SparseMatrix(gd.grad_measures.size(), gd.ndof, std::move(gx));
  gd.grad_y = SparseMatrix(gd.grad_measures.size(), gd.ndof, std::move(gy));
  index_subcells(gd);

  std::vector<bool> on_boundary(gd.ndof, false);
  for (const auto& e : mesh.boundary_edges) {
    const auto a = static_cast<std::size_t>(e.a), b = static_cast<std::size_t>(e.b);
    on_boundary[a] = on_boundary[b] = true;
    const Vec2 m = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
    gd.boundary.push_back({a, mesh.vertices[a], m, e.normal});
    gd.boundary.push_back({b, m, mesh.vertices[b], e.normal});
  }

  // Chain the counter-clockwise pieces around each vertex into the dual cell
  // polygon; boundary vertices close the chain through the vertex itself.
  gd.recon_polygons.resize(gd.ndof);
  for (std::size_t v = 0; v < gd.ndof; ++v) {
    auto& list = pieces[v];
    std::map<int, std::size_t> by_start;
    std::map<int, int> end_count;
    for (std::size_t k = 0; k < list.size(); ++k) {
      by_start[list[k].from] = k;
      ++end_count[list[k].to];
    }
    std::size_t start = 0;
    if (on_boundary[v]) {
      for (std::size_t k = 0; k < list.size(); ++k) {
        if (end_count.count(list[k].from) == 0) start = k;
      }
    }
    auto& poly = gd.recon_polygons[v];
    std::size_t k = start;
    for (std::size_t step = 0; step < list.size(); ++step) {
      poly.push_back(list[k].p0);
      poly.push_back(list[k].p1);
      const auto next = by_start.find(list[k].to);
      if (next == by_start.end()) {
        poly.push_back(list[k].p2);
        break;
      }
      k = next->second;
    }
    if (on_boundary[v]) poly.push_back(mesh.vertices[v]);
  }
  return gd;
}

DofVector interpolate(const GradientDiscretisation& gd, const ScalarFunction& f) {
  DofVector w(gd.ndof);
  for (std::size_t i = 0; i < gd.ndof; ++i) w[i] = f(gd.anchors[i]);
  return w;
}

DofVector constant_dofs(const GradientDiscretisation& gd, double value) { return DofVector(gd.ndof, value); }

std::vector<double> reconstruct(const GradientDiscretisation& gd, std::span<const double> w) {
  if (w.size() != gd.ndof) throw InvalidParameter("dof vector length does not match the discretisation");
  return gd.pi_map * w;
}

std::vector<Vec2> reconstruct_gradient(const GradientDiscretisation& gd, std::span<const double> w) {
  if (w.size() != gd.ndof) throw InvalidParameter("dof vector length does not match the discretisation");
  const auto gx = gd.grad_x * w;
  const auto gy = gd.grad_y * w;
  std::vector<Vec2> g(gx.size());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = {gx[k], gy[k]};
  return g;
}

double integral(const GradientDiscretisation& gd, std::span<const double> w) {
  const auto pw = reconstruct(gd, w);
  double s = 0.0;
  for (std::size_t r = 0; r < pw.size(); ++r) s += gd.recon_measures[r] * pw[r];
  return s;
}

double norm_l2_pi(const GradientDiscretisation& gd, std::span<const double> w) {
  const auto pw = reconstruct(gd, w);
  double s = 0.0;
  for (std::size_t r = 0; r < pw.size(); ++r) s += gd.recon_measures[r] * pw[r] * pw[r];
  return std::sqrt(s);
}

double norm_l2_grad(const GradientDiscretisation& gd, std::span<const double> w) {
  const auto g = reconstruct_gradient(gd, w);
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) s += gd.grad_measures[k] * dot(g[k], g[k]);
  return std::sqrt(s);
}

double norm_ell(const GradientDiscretisation& gd, std::span<const double> w) {
  const double g = norm_l2_grad(gd, w);
  const double m = integral(gd, w);
  return std::sqrt(g * g + m * m);
}

double norm_para(const GradientDiscretisation& gd, std::span<const double> w) {
  return std::hypot(norm_l2_pi(gd, w), norm_l2_grad(gd, w));
}

SparseMatrix pi_gram(const GradientDiscretisation& gd) {
  std::vector<Triplet> t;
  const auto offsets = gd.pi_map.row_offsets();
  const auto cols = gd.pi_map.col_indices();
  const auto vals = gd.pi_map.values();
  for (std::size_t r = 0; r < gd.recon_count(); ++r) {
    for (std::size_t a = offsets[r]; a < offsets[r + 1]; ++a) {
      for (std::size_t b = offsets[r]; b < offsets[r + 1]; ++b) {
        t.push_back({cols[a], cols[b], gd.recon_measures[r] * vals[a] * vals[b]});
      }
    }
  }
  return SparseMatrix(gd.ndof, gd.ndof, std::move(t));
}

SparseMatrix grad_gram(const GradientDiscretisation& gd) {
  std::vector<Triplet> t;
  const auto offsets = gd.grad_x.row_offsets();
  const auto cols = gd.grad_x.col_indices();
  const auto vx = gd.grad_x.values();
  const auto vy = gd.grad_y.values();
  for (std::size_t g = 0; g < gd.grad_count(); ++g) {
    for (std::size_t a = offsets[g]; a < offsets[g + 1]; ++a) {
      for (std::size_t b = offsets[g]; b < offsets[g + 1]; ++b) {
        t.push_back({cols[a], cols[b], gd.grad_measures[g] * (vx[a] * vx[b] + vy[a] * vy[b])});
      }
    }
  }
  return SparseMatrix(gd.ndof, gd.ndof, std::move(t));
}

std::vector<double> mean_vector(const GradientDiscretisation& gd) {
  return gd.pi_map.transpose_multiply(gd.recon_measures);
}

TimeGrid TimeGrid::uniform(double final_time, double step) {
  if (!(final_time > 0.0) || !(step > 0.0)) throw InvalidParameter("final time and time step must be positive");
  const double ratio = final_time / step;
  const double steps = std::round(ratio);
  if (steps < 1.0 || std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidParameter("time step does not divide the final time");
  }
  TimeGrid grid;
  const auto count = static_cast<std::size_t>(steps);
  grid.times.resize(count + 1);
  for (std::size_t k = 0; k <= count; ++k) grid.times[k] = final_time * static_cast<double>(k) / steps;
  return grid;
}

}  // namespace gdm
