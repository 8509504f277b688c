#include "gdm/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "gdm/error.hpp"
#include "parallel.hpp"

namespace gdm {

namespace {

void check_sizes(const GradientDiscretisation& gd, std::span<const double> c, std::span<const Vec2> velocity = {},
                 bool need_velocity = false) {
  if (c.size() != gd.ndof) throw InvalidParameter("dof vector length does not match the discretisation");
  if (need_velocity && velocity.size() != gd.subcells.size()) {
    throw InvalidParameter("velocity must be given on every sub-cell");
  }
}

}  // namespace

SparseMatrix assemble_stiffness(const GradientDiscretisation& gd, std::span<const Tensor2> subcell_tensors) {
  if (subcell_tensors.size() != gd.subcells.size()) throw InvalidParameter("one tensor per sub-cell required");
  const auto offsets = gd.grad_x.row_offsets();
  const auto cols = gd.grad_x.col_indices();
  const auto vx = gd.grad_x.values();
  const auto vy = gd.grad_y.values();
  auto triplets = detail::gather_triplets(gd.grad_count(), [&](std::size_t begin, std::size_t end,
                                                               std::vector<Triplet>& out) {
    for (std::size_t g = begin; g < end; ++g) {
      // measure-weighted tensor over the sub-cells of this grad cell
      Tensor2 t;
      for (std::size_t s = gd.grad_subcell_offsets[g]; s < gd.grad_subcell_offsets[g + 1]; ++s) {
        const double m = gd.subcells[s].measure;
        t.xx += m * subcell_tensors[s].xx;
        t.xy += m * subcell_tensors[s].xy;
        t.yy += m * subcell_tensors[s].yy;
      }
      for (std::size_t a = offsets[g]; a < offsets[g + 1]; ++a) {
        const Vec2 ta = t.apply({vx[a], vy[a]});
        for (std::size_t b = offsets[g]; b < offsets[g + 1]; ++b) {
          out.push_back({cols[b], cols[a], ta.x * vx[b] + ta.y * vy[b]});
        }
      }
    }
  });
  return SparseMatrix(gd.ndof, gd.ndof, std::move(triplets));
}

PressureSystem assemble_pressure(const GradientDiscretisation& gd, std::span<const double> c_prev,
                                 const DiscreteSources& sources, const MobilityTensor& mobility) {
  check_sizes(gd, c_prev);
  PressureSystem sys;
  const auto pc = reconstruct(gd, c_prev);
  sys.subcell_mobility.resize(gd.subcells.size());
  std::vector<Tensor2> tensors(gd.subcells.size());
  for (std::size_t s = 0; s < gd.subcells.size(); ++s) {
    const double a = mobility(pc[gd.subcells[s].recon]);
    sys.subcell_mobility[s] = a;
    tensors[s] = {a, 0.0, a};
  }
  sys.stiffness = assemble_stiffness(gd, tensors);
  sys.mean = mean_vector(gd);
  sys.rhs.resize(gd.ndof);
  for (std::size_t i = 0; i < gd.ndof; ++i) sys.rhs[i] = sources.injection[i] - sources.production[i];
  return sys;
}

PressureSolution solve_pressure(const GradientDiscretisation& gd, std::span<const double> c_prev,
                                const DiscreteSources& sources, const MobilityTensor& mobility,
                                const SolverConfig& solver, std::span<const double> guess) {
  const auto sys = assemble_pressure(gd, c_prev, sources, mobility);
  SolverConfig cfg = solver;
  cfg.method = SolverMethod::conjugate_gradient;
  // Solve with G + s^2 m m^T, s^2 = max diag(G) / |m|^2; forces m.p = 0.
  double g_diag = 0.0, m_sq = 0.0;
  for (double d : sys.stiffness.diagonal_entries()) g_diag = std::max(g_diag, d);
  for (double m : sys.mean) m_sq += m * m;
  const double scale = (g_diag > 0.0 && m_sq > 0.0) ? std::sqrt(g_diag / m_sq) : 1.0;
  std::vector<double> rank_one(sys.mean);
  for (double& m : rank_one) m *= scale;
  auto res = solve_spd(sys.stiffness, sys.rhs, cfg, rank_one, guess);

  PressureSolution sol;
  sol.pressure = std::move(res.x);
  sol.iterations = res.iterations;
  sol.relative_residual = res.relative_residual;
  sol.mean_value = integral(gd, sol.pressure);
  sol.rhs_norm = norm2(sys.rhs);
  const auto grad = reconstruct_gradient(gd, sol.pressure);
  sol.velocity.resize(gd.subcells.size());
  for (std::size_t s = 0; s < gd.subcells.size(); ++s) {
    sol.velocity[s] = (-sys.subcell_mobility[s]) * grad[gd.subcells[s].grad];
  }
  return sol;
}

int truncation_state(double s) {
  if (s < 0.0) return -1;
  if (s > 1.0) return 1;
  return 0;
}

namespace {

// Triplets of -|s| U_s . grad phi_i pi_rj over sub-cells, routed to the
// matrix when keep(s) holds and otherwise collected as a right-hand side
// weighted by value(s).
template <class Keep, class Value>
ConvectionSplit convection_terms(const GradientDiscretisation& gd, std::span<const Vec2> velocity, Keep keep,
                                 Value value) {
  const auto g_off = gd.grad_x.row_offsets();
  const auto g_cols = gd.grad_x.col_indices();
  const auto vx = gd.grad_x.values();
  const auto vy = gd.grad_y.values();
  const auto p_off = gd.pi_map.row_offsets();
  const auto p_cols = gd.pi_map.col_indices();
  const auto p_vals = gd.pi_map.values();

  ConvectionSplit out;
  out.rhs.assign(gd.ndof, 0.0);
  auto triplets = detail::gather_triplets(gd.subcells.size(), [&](std::size_t begin, std::size_t end,
                                                                  std::vector<Triplet>& t) {
    for (std::size_t s = begin; s < end; ++s) {
      const auto& sc = gd.subcells[s];
      const Vec2 u = velocity[s];
      if ((u.x == 0.0 && u.y == 0.0) || !keep(sc)) continue;
      for (std::size_t a = g_off[sc.grad]; a < g_off[sc.grad + 1]; ++a) {
        const double flux = -sc.measure * (u.x * vx[a] + u.y * vy[a]);
        for (std::size_t b = p_off[sc.recon]; b < p_off[sc.recon + 1]; ++b) {
          t.push_back({g_cols[a], p_cols[b], flux * p_vals[b]});
        }
      }
    }
  });
  // known part, accumulated sequentially in sub-cell order
  for (std::size_t s = 0; s < gd.subcells.size(); ++s) {
    const auto& sc = gd.subcells[s];
    const Vec2 u = velocity[s];
    if ((u.x == 0.0 && u.y == 0.0) || keep(sc)) continue;
    const double v = value(sc);
    if (v == 0.0) continue;
    for (std::size_t a = g_off[sc.grad]; a < g_off[sc.grad + 1]; ++a) {
      out.rhs[g_cols[a]] += sc.measure * v * (u.x * vx[a] + u.y * vy[a]);
    }
  }
  out.matrix = SparseMatrix(gd.ndof, gd.ndof, std::move(triplets));
  return out;
}

}  // namespace

ConvectionSplit split_convection(const GradientDiscretisation& gd, std::span<const Vec2> velocity,
                                 std::span<const double> z, bool truncate) {
  check_sizes(gd, z, velocity, true);
  if (!truncate) {
    return convection_terms(gd, velocity, [](const SubCell&) { return true; }, [](const SubCell&) { return 0.0; });
  }
  const auto pz = reconstruct(gd, z);
  return convection_terms(
      gd, velocity, [&](const SubCell& sc) { return truncation_state(pz[sc.recon]) == 0; },
      [&](const SubCell& sc) { return gdm::truncate(pz[sc.recon]); });
}

SparseMatrix assemble_convection(const GradientDiscretisation& gd, std::span<const Vec2> velocity,
                                 ConvectionVariant variant) {
  if (velocity.size() != gd.subcells.size()) throw InvalidParameter("velocity must be given on every sub-cell");
  auto k = convection_terms(gd, velocity, [](const SubCell&) { return true; }, [](const SubCell&) { return 0.0; })
               .matrix;
  if (variant.kind == ConvectionVariant::Kind::upstream) return add(k, upwind_diffusion(k));
  return k;
}

SparseMatrix upwind_diffusion(const SparseMatrix& k) {
  const SparseMatrix kt = k.transpose();
  const auto off = k.row_offsets();
  const auto cols = k.col_indices();
  const auto vals = k.values();
  const auto t_off = kt.row_offsets();
  const auto t_cols = kt.col_indices();
  const auto t_vals = kt.values();
  std::vector<Triplet> out;
  for (std::size_t i = 0; i < k.rows(); ++i) {
    // merge row i of K with row i of K^T (= column i of K)
    std::size_t a = off[i], b = t_off[i];
    while (a < off[i + 1] || b < t_off[i + 1]) {
      std::size_t j;
      double kij = 0.0, kji = 0.0;
      if (b >= t_off[i + 1] || (a < off[i + 1] && cols[a] < t_cols[b])) {
        j = cols[a];
        kij = vals[a++];
      } else if (a >= off[i + 1] || t_cols[b] < cols[a]) {
        j = t_cols[b];
        kji = t_vals[b++];
      } else {
        j = cols[a];
        kij = vals[a++];
        kji = t_vals[b++];
      }
      if (j == i) continue;
      const double d = std::max({0.0, kij, kji});
      if (d > 0.0) {
        out.push_back({i, j, -d});
        out.push_back({i, i, d});
      }
    }
  }
  return SparseMatrix(k.rows(), k.cols(), std::move(out));
}

void apply_dirichlet(SparseMatrix& matrix, std::vector<double>& rhs, const DirichletData& data) {
  if (data.dofs.size() != data.values.size()) throw InvalidParameter("Dirichlet dofs and values differ in length");
  const std::size_t n = matrix.rows();
  std::vector<char> constrained(n, 0);
  std::vector<double> value(n, 0.0);
  for (std::size_t k = 0; k < data.dofs.size(); ++k) {
    if (data.dofs[k] >= n) throw InvalidParameter("Dirichlet dof out of range");
    constrained[data.dofs[k]] = 1;
    value[data.dofs[k]] = data.values[k];
  }
  const auto off = matrix.row_offsets();
  const auto cols = matrix.col_indices();
  auto vals = matrix.values();
  for (std::size_t i = 0; i < n; ++i) {
    if (constrained[i]) {
      bool has_diagonal = false;
      for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
        vals[k] = (cols[k] == i) ? 1.0 : 0.0;
        has_diagonal = has_diagonal || cols[k] == i;
      }
      if (!has_diagonal) throw InvalidParameter("Dirichlet row has no diagonal entry");
      rhs[i] = value[i];
      continue;
    }
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      if (constrained[cols[k]]) {
        rhs[i] -= vals[k] * value[cols[k]];
        vals[k] = 0.0;
      }
    }
  }
}

namespace {

std::vector<Tensor2> dispersion_tensors(const GradientDiscretisation& gd, std::span<const Vec2> velocity,
                                        const DispersionParams& dispersion, ConvectionVariant variant) {
  std::vector<Tensor2> t(gd.subcells.size());
  for (std::size_t s = 0; s < t.size(); ++s) {
    t[s] = variant.kind == ConvectionVariant::Kind::dh ? tensor_Dh(dispersion, velocity[s], variant.h)
                                                       : tensor_D(dispersion, velocity[s]);
  }
  return t;
}

}  // namespace

TransportSystem assemble_transport(const GradientDiscretisation& gd, std::span<const Vec2> velocity,
                                   std::span<const double> c_prev, double dt, const DiscreteSources& sources,
                                   const DispersionParams& dispersion, ConvectionVariant variant) {
  check_sizes(gd, c_prev, velocity, true);
  if (!(dt > 0.0)) throw InvalidParameter("time step must be positive");
  if (variant.kind == ConvectionVariant::Kind::dh && !(variant.h > 0.0)) {
    throw InvalidParameter("dh variant needs a positive mesh size");
  }
  TransportSystem sys;
  const double phi = dispersion.porosity;
  const auto tensors = dispersion_tensors(gd, velocity, dispersion, variant);
  sys.diffusion = assemble_stiffness(gd, tensors);
  if (variant.kind == ConvectionVariant::Kind::upstream) {
    sys.upwind = upwind_diffusion(assemble_convection(gd, velocity, ConvectionVariant::centred()));
  } else {
    sys.upwind = SparseMatrix(gd.ndof, gd.ndof, {});
  }

  const SparseMatrix mass = pi_gram(gd);
  sys.mass = mean_vector(gd);
  for (double& m : sys.mass) m *= phi;

  auto t = sys.diffusion.triplets();
  for (const auto& e : sys.upwind.triplets()) t.push_back(e);
  for (const auto& e : mass.triplets()) t.push_back({e.row, e.col, phi / dt * e.value});
  for (std::size_t i = 0; i < gd.ndof; ++i) {
    if (sources.production[i] != 0.0) t.push_back({i, i, sources.production[i]});
  }
  sys.base = SparseMatrix(gd.ndof, gd.ndof, std::move(t));

  sys.rhs = mass * c_prev;
  for (std::size_t i = 0; i < gd.ndof; ++i) {
    sys.rhs[i] = phi / dt * sys.rhs[i] + sources.injected_concentration * sources.injection[i];
  }
  return sys;
}

namespace {

std::vector<double> residual_vector(const SparseMatrix& a, std::span<const double> x, std::span<const double> b) {
  auto r = a * x;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

std::vector<int> truncation_pattern(const GradientDiscretisation& gd, std::span<const double> z, bool truncate) {
  std::vector<int> out;
  if (!truncate) return out;
  for (double v : reconstruct(gd, z)) out.push_back(truncation_state(v));
  return out;
}

}  // namespace

TransportResult transport_step(const GradientDiscretisation& gd, std::span<const Vec2> velocity,
                               std::span<const double> c_prev, double dt, const DiscreteSources& sources,
                               const DispersionParams& dispersion, ConvectionVariant variant,
                               const DirichletData& dirichlet, const TransportOptions& options) {
  const auto sys = assemble_transport(gd, velocity, c_prev, dt, sources, dispersion, variant);

  auto build = [&](std::span<const double> iterate, std::vector<double>& rhs) {
    auto conv = split_convection(gd, velocity, iterate, options.truncate);
    SparseMatrix a = add(sys.base, conv.matrix);
    rhs = sys.rhs;
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += conv.rhs[i];
    if (!dirichlet.empty()) apply_dirichlet(a, rhs, dirichlet);
    return a;
  };

  TransportResult result;
  DofVector z(c_prev.begin(), c_prev.end());
  for (std::size_t k = 0; k < dirichlet.dofs.size(); ++k) z[dirichlet.dofs[k]] = dirichlet.values[k];

  double omega = 1.0;
  double best_residual = INFINITY;
  std::size_t stalls = 0;
  std::vector<double> rhs;
  SparseMatrix a;
  std::vector<int> a_pattern;
  bool converged = false;

  while (result.picard_iterations < options.max_picard) {
    const auto pattern = truncation_pattern(gd, z, options.truncate);
    if (result.picard_iterations == 0 || pattern != a_pattern) {
      a = build(z, rhs);
      a_pattern = pattern;
    }
    const double res_z = norm2(residual_vector(a, z, rhs)) / std::max(norm2(rhs), 1e-300);
    if (res_z < best_residual) {
      best_residual = res_z;
      stalls = 0;
    } else if (++stalls >= options.stall_limit) {
      omega = 0.5;
    }

    auto solved = solve_general(a, rhs, options.solver, z);
    result.linear_iterations += solved.iterations;
    result.linear_residual = std::max(result.linear_residual, solved.relative_residual);
    ++result.picard_iterations;

    double increment = 0.0;
    for (std::size_t i = 0; i < gd.ndof; ++i) increment = std::max(increment, std::abs(solved.x[i] - z[i]));
    result.increments.push_back(increment);
    if (increment <= options.picard_tolerance) {
      z = std::move(solved.x);
      converged = true;
      break;
    }
    for (std::size_t i = 0; i < gd.ndof; ++i) z[i] += omega * (solved.x[i] - z[i]);
  }
  if (!converged) {
    throw PicardNoConvergence("Picard iteration did not converge in " + std::to_string(options.max_picard) +
                                  " iterations",
                              result.increments);
  }

  // Residual of the nonlinear equation at the accepted iterate; the last
  // system is reused when the truncation pattern did not change.
  if (truncation_pattern(gd, z, options.truncate) != a_pattern) a = build(z, rhs);
  result.nonlinear_residual = norm2(residual_vector(a, z, rhs)) / std::max(norm2(rhs), 1e-300);
  result.concentration = std::move(z);
  return result;
}

double mass_balance_residual(const GradientDiscretisation& gd, std::span<const double> c_next,
                             std::span<const double> c_prev, double dt, double porosity,
                             const DiscreteSources& sources) {
  const auto p1 = reconstruct(gd, c_next);
  const auto p0 = reconstruct(gd, c_prev);
  double storage = 0.0;
  for (std::size_t r = 0; r < p1.size(); ++r) storage += porosity * gd.recon_measures[r] * (p1[r] - p0[r]) / dt;
  double net = 0.0;
  for (std::size_t i = 0; i < gd.ndof; ++i) {
    net += sources.injected_concentration * sources.injection[i] - sources.production[i] * c_next[i];
  }
  const double scale = std::max(sources.total_injection(), 1e-300);
  return (storage - net) / scale;
}

double EnergyBalance::residual() const {
  return storage + storage_jump + diffusion + convection + production - source;
}

double EnergyBalance::relative_residual() const {
  const double scale = std::max({std::abs(storage), std::abs(storage_jump), std::abs(diffusion),
                                 std::abs(convection), std::abs(production), std::abs(source), 1e-300});
  return std::abs(residual()) / scale;
}

EnergyBalance energy_balance(const GradientDiscretisation& gd, std::span<const Vec2> velocity,
                             std::span<const double> c_next, std::span<const double> c_prev, double dt,
                             const DiscreteSources& sources, const DispersionParams& dispersion,
                             ConvectionVariant variant) {
  check_sizes(gd, c_next, velocity, true);
  EnergyBalance e;
  const auto p1 = reconstruct(gd, c_next);
  const auto p0 = reconstruct(gd, c_prev);
  const double phi = dispersion.porosity;
  for (std::size_t r = 0; r < p1.size(); ++r) {
    const double m = phi * gd.recon_measures[r] / dt;
    e.storage += 0.5 * m * (p1[r] * p1[r] - p0[r] * p0[r]);
    e.storage_jump += 0.5 * m * (p1[r] - p0[r]) * (p1[r] - p0[r]);
  }
  const auto tensors = dispersion_tensors(gd, velocity, dispersion, variant);
  e.diffusion = dot(c_next, assemble_stiffness(gd, tensors) * c_next);
  const auto conv = split_convection(gd, velocity, c_next);
  auto kc = conv.matrix * c_next;
  for (std::size_t i = 0; i < gd.ndof; ++i) kc[i] -= conv.rhs[i];
  e.convection = dot(c_next, kc);
  if (variant.kind == ConvectionVariant::Kind::upstream) {
    e.convection += dot(c_next, upwind_diffusion(assemble_convection(gd, velocity, ConvectionVariant::centred())) * c_next);
  }
  for (std::size_t i = 0; i < gd.ndof; ++i) {
    e.production += sources.production[i] * c_next[i] * c_next[i];
    e.source += sources.injected_concentration * sources.injection[i] * c_next[i];
  }
  return e;
}

}  // namespace gdm
