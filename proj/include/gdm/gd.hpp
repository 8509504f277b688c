#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gdm/linalg.hpp"
#include "gdm/mesh.hpp"

namespace gdm {

using DofVector = std::vector<double>;
using ScalarFunction = std::function<double(Vec2)>;
using VectorFunction = std::function<Vec2(Vec2)>;

struct QuadraturePoint {
  Vec2 point;
  double weight = 0.0;
};

// Intersection of one reconstruction cell with one gradient cell. Both Pi w
// and grad w are constant on it, so every integral of a product of
// reconstructed quantities is an exact finite sum over sub-cells.
struct SubCell {
  double measure = 0.0;
  std::size_t recon = 0;
  std::size_t grad = 0;
  std::size_t quad_begin = 0;
  std::size_t quad_count = 0;
};

// Half of a boundary edge of the primal mesh, owned by one reconstruction cell.
struct BoundarySegment {
  std::size_t recon = 0;
  Vec2 a;
  Vec2 b;
  Vec2 normal;
};

// A gradient discretisation of (0, L)^2: unknowns, piecewise-constant function
// reconstruction on `recon` cells, piecewise-constant gradient reconstruction
// on `grad` cells, and the geometry needed to integrate against them.
struct GradientDiscretisation {
  std::string scheme;
  std::size_t ndof = 0;
  // Characteristic mesh size used by the vanishing-diffusion variant.
  double mesh_size = 0.0;
  Vec2 domain_lo;
  Vec2 domain_hi;
  double domain_measure = 0.0;

  // Interpolation points, one per unknown.
  std::vector<Vec2> anchors;

  std::vector<double> recon_measures;
  std::vector<Vec2> recon_anchors;
  std::vector<std::vector<Vec2>> recon_polygons;
  SparseMatrix pi_map;  // recon cells x ndof

  std::vector<double> grad_measures;
  // grad_x and grad_y share one sparsity pattern (grad cells x ndof).
  SparseMatrix grad_x;
  SparseMatrix grad_y;
  // Primal mesh cell (square or triangle) containing each grad cell.
  std::vector<std::size_t> grad_primal;
  std::size_t primal_count = 0;

  // Sub-cells are stored grouped by grad cell: those of grad cell g are
  // subcells[grad_subcell_offsets[g] .. grad_subcell_offsets[g + 1]).
  std::vector<SubCell> subcells;
  std::vector<std::size_t> grad_subcell_offsets;
  std::vector<QuadraturePoint> quadrature;
  std::vector<BoundarySegment> boundary;

  std::size_t recon_count() const { return recon_measures.size(); }
  std::size_t grad_count() const { return grad_measures.size(); }
};

// Node-centred finite-difference discretisation on a Cartesian grid: each
// quadrant of a primal square carries the gradient built from the two square
// edges meeting at its corner node.
GradientDiscretisation scheme_a(const CartesianGrid& grid);

// Mass-lumped conforming P1: Pi is constant on barycentric dual cells, grad is
// the P1 gradient on each triangle.
GradientDiscretisation scheme_b(const TriangularMesh& mesh, const DualMesh& dual);

// Pointwise interpolation at the dof anchors.
DofVector interpolate(const GradientDiscretisation& gd, const ScalarFunction& f);
DofVector constant_dofs(const GradientDiscretisation& gd, double value);

// Pi w, one value per reconstruction cell.
std::vector<double> reconstruct(const GradientDiscretisation& gd, std::span<const double> w);
// grad w, one vector per gradient cell.
std::vector<Vec2> reconstruct_gradient(const GradientDiscretisation& gd, std::span<const double> w);

double integral(const GradientDiscretisation& gd, std::span<const double> w);
double norm_l2_pi(const GradientDiscretisation& gd, std::span<const double> w);
double norm_l2_grad(const GradientDiscretisation& gd, std::span<const double> w);
double norm_ell(const GradientDiscretisation& gd, std::span<const double> w);
double norm_para(const GradientDiscretisation& gd, std::span<const double> w);

// Gram matrices of the two reconstructions:
//   pi_gram_ij = int Pi phi_i Pi phi_j,  grad_gram_ij = int grad phi_i . grad phi_j.
SparseMatrix pi_gram(const GradientDiscretisation& gd);
SparseMatrix grad_gram(const GradientDiscretisation& gd);
// m_i = int Pi phi_i
std::vector<double> mean_vector(const GradientDiscretisation& gd);

struct TimeGrid {
  std::vector<double> times;

  static TimeGrid uniform(double final_time, double step);
  std::size_t step_count() const { return times.empty() ? 0 : times.size() - 1; }
  double step(std::size_t n) const { return times[n + 1] - times[n]; }
  double final_time() const { return times.back(); }
};

}  // namespace gdm
