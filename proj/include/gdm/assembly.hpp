#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gdm/gd.hpp"
#include "gdm/linalg.hpp"
#include "gdm/physics.hpp"

namespace gdm {

struct ConvectionVariant {
  enum class Kind { centred, upstream, dh };
  Kind kind = Kind::centred;
  // Mesh size for the dh variant.
  double h = 0.0;

  static ConvectionVariant centred() { return {Kind::centred, 0.0}; }
  static ConvectionVariant upstream() { return {Kind::upstream, 0.0}; }
  static ConvectionVariant dh(double mesh_size) { return {Kind::dh, mesh_size}; }
};

// Elliptic system for the pressure: stiffness G(c) with entries
// int A(Pi c) grad phi_i . grad phi_j, the zero-mean vector m_i = int Pi phi_i
// (applied as the rank-one term m m^T) and the source right-hand side.
struct PressureSystem {
  SparseMatrix stiffness;
  std::vector<double> mean;
  std::vector<double> rhs;
  // A(Pi c) on each sub-cell.
  std::vector<double> subcell_mobility;
};

struct PressureSolution {
  DofVector pressure;
  // Darcy velocity -A(Pi c) grad p on each sub-cell.
  std::vector<Vec2> velocity;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  // int Pi p
  double mean_value = 0.0;
  double rhs_norm = 0.0;
};

PressureSystem assemble_pressure(const GradientDiscretisation& gd, std::span<const double> c_prev,
                                 const DiscreteSources& sources, const MobilityTensor& mobility);

PressureSolution solve_pressure(const GradientDiscretisation& gd, std::span<const double> c_prev,
                                const DiscreteSources& sources, const MobilityTensor& mobility,
                                const SolverConfig& solver = {}, std::span<const double> guess = {});

// sum_s |s| grad phi_i^T T_s grad phi_j over sub-cells, one tensor per sub-cell.
SparseMatrix assemble_stiffness(const GradientDiscretisation& gd, std::span<const Tensor2> subcell_tensors);

// Position of s relative to [0, 1]: -1 below, 0 inside, 1 above.
int truncation_state(double s);

// Convection term -int T(Pi z) U . grad phi_i split at the iterate z: cells
// where Pi z lies in [0, 1] contribute implicitly through `matrix`, the others
// contribute the known value T(Pi z) through `rhs`, so that
//   matrix z - rhs = -int T(Pi z) U . grad phi_i.
// With `truncate` false every cell is implicit (plain centred convection).
struct ConvectionSplit {
  SparseMatrix matrix;
  std::vector<double> rhs;
};

ConvectionSplit split_convection(const GradientDiscretisation& gd, std::span<const Vec2> velocity,
                                 std::span<const double> z, bool truncate = true);

// Untruncated convection matrix; the upstream variant adds
// upwind_diffusion() of the centred matrix.
SparseMatrix assemble_convection(const GradientDiscretisation& gd, std::span<const Vec2> velocity,
                                 ConvectionVariant variant);

// Algebraic upwinding: d_ij = max(0, k_ij, k_ji) removed from the off-diagonals
// and added to the diagonal, so rows and columns sum to zero.
SparseMatrix upwind_diffusion(const SparseMatrix& convection);

struct DirichletData {
  std::vector<std::size_t> dofs;
  std::vector<double> values;

  bool empty() const { return dofs.empty(); }
};

// Replaces constrained rows by identity rows and moves constrained columns to
// the right-hand side. The sparsity pattern is kept.
void apply_dirichlet(SparseMatrix& matrix, std::vector<double>& rhs, const DirichletData& data);

struct TransportOptions {
  SolverConfig solver{SolverMethod::bicgstab, 1e-12};
  double picard_tolerance = 1e-9;
  std::size_t max_picard = 100;
  // Iterations without residual decrease tolerated before damping by 1/2.
  std::size_t stall_limit = 5;
  // false replaces T by the identity (comparison runs only).
  bool truncate = true;
};

// The parts of the transport system that do not depend on the Picard iterate.
struct TransportSystem {
  SparseMatrix base;  // mass / dt + diffusion + upwind + production
  std::vector<double> rhs;
  SparseMatrix diffusion;
  SparseMatrix upwind;  // empty unless the variant is upstream
  std::vector<double> mass;  // porosity * |K_i| per dof (lumped)
};

TransportSystem assemble_transport(const GradientDiscretisation& gd, std::span<const Vec2> velocity,
                                   std::span<const double> c_prev, double dt, const DiscreteSources& sources,
                                   const DispersionParams& dispersion, ConvectionVariant variant);

struct TransportResult {
  DofVector concentration;
  std::size_t picard_iterations = 0;
  // ||A(c) c - b|| / ||b|| at the accepted iterate.
  double nonlinear_residual = 0.0;
  double linear_residual = 0.0;
  std::size_t linear_iterations = 0;
  std::vector<double> increments;
};

TransportResult transport_step(const GradientDiscretisation& gd, std::span<const Vec2> velocity,
                               std::span<const double> c_prev, double dt, const DiscreteSources& sources,
                               const DispersionParams& dispersion, ConvectionVariant variant,
                               const DirichletData& dirichlet = {}, const TransportOptions& options = {});

// Pairing the transport equation with 1: porosity-weighted storage change
// minus net source, relative to the injection rate.
double mass_balance_residual(const GradientDiscretisation& gd, std::span<const double> c_next,
                             std::span<const double> c_prev, double dt, double porosity,
                             const DiscreteSources& sources);

// Pairing the transport equation with c^{n+1}, with the storage term split as
// 1/2 (c1^2 - c0^2) + 1/2 (c1 - c0)^2.
struct EnergyBalance {
  double storage = 0.0;
  double storage_jump = 0.0;
  double diffusion = 0.0;
  double convection = 0.0;
  double production = 0.0;
  double source = 0.0;

  double residual() const;
  double relative_residual() const;
};

EnergyBalance energy_balance(const GradientDiscretisation& gd, std::span<const Vec2> velocity,
                             std::span<const double> c_next, std::span<const double> c_prev, double dt,
                             const DiscreteSources& sources, const DispersionParams& dispersion,
                             ConvectionVariant variant);

}  // namespace gdm
