#include "gdm/quality.hpp"

#include <cmath>
#include <numbers>

#include "gdm/error.hpp"

namespace gdm {

ScalarTestFunction sine_product(double length) {
  const double k = std::numbers::pi / length;
  return {"sin_sin",
          [k](Vec2 p) { return std::sin(k * p.x) * std::sin(k * p.y); },
          [k](Vec2 p) {
            return Vec2{k * std::cos(k * p.x) * std::sin(k * p.y), k * std::sin(k * p.x) * std::cos(k * p.y)};
          }};
}

VectorTestField curl_bubble() {
  // psi = f(x) f(y), f(s) = s^2 (1-s)^2
  auto f = [](double s) { return s * s * (1 - s) * (1 - s); };
  auto df = [](double s) { return 2 * s * (1 - s) * (1 - 2 * s); };
  return {"curl_bubble",
          [f, df](Vec2 p) { return Vec2{-f(p.x) * df(p.y), df(p.x) * f(p.y)}; },
          [](Vec2) { return 0.0; }};
}

namespace {

SparseMatrix para_gram(const GradientDiscretisation& gd) { return add(pi_gram(gd), grad_gram(gd)); }

SolverConfig tight_cg() { return {SolverMethod::conjugate_gradient, 1e-12}; }

// Deterministic non-constant start so the iteration is exercised.
std::vector<double> start_vector(const GradientDiscretisation& gd) {
  std::vector<double> x(gd.ndof);
  const double l = gd.domain_hi.x - gd.domain_lo.x;
  for (std::size_t i = 0; i < gd.ndof; ++i) {
    const Vec2 p = gd.anchors[i];
    x[i] = 1.0 + std::cos(3.0 * p.x / l) + 0.5 * std::sin(5.0 * p.y / l);
  }
  return x;
}

}  // namespace

double coercivity_constant(const GradientDiscretisation& gd, const PowerIterationOptions& options) {
  const SparseMatrix p = pi_gram(gd);
  const SparseMatrix g = grad_gram(gd);
  const auto m = mean_vector(gd);
  auto x = start_vector(gd);
  double lambda = 0.0;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const auto px = p * x;
    auto y = solve_spd(g, px, tight_cg(), m, x).x;
    // Rayleigh quotient y^T P y / y^T H y
    const auto py = p * y;
    auto hy = g * y;
    const double my = dot(m, y);
    for (std::size_t i = 0; i < hy.size(); ++i) hy[i] += m[i] * my;
    const double next = dot(y, py) / dot(y, hy);
    const double scale = norm2(y);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] /= scale;
    x = std::move(y);
    if (it > 0 && std::abs(next - lambda) <= options.tolerance * std::abs(next)) return std::sqrt(next);
    lambda = next;
  }
  throw NumericalError("power iteration for the coercivity constant did not converge");
}

std::vector<double> consistency_rhs(const GradientDiscretisation& gd, const ScalarTestFunction& phi) {
  std::vector<double> b(gd.ndof, 0.0);
  const auto p_off = gd.pi_map.row_offsets();
  const auto p_cols = gd.pi_map.col_indices();
  const auto p_vals = gd.pi_map.values();
  const auto g_off = gd.grad_x.row_offsets();
  const auto g_cols = gd.grad_x.col_indices();
  const auto vx = gd.grad_x.values();
  const auto vy = gd.grad_y.values();
  for (const auto& sc : gd.subcells) {
    double f = 0.0;
    Vec2 g;
    for (std::size_t q = sc.quad_begin; q < sc.quad_begin + sc.quad_count; ++q) {
      const auto& qp = gd.quadrature[q];
      f += qp.weight * phi.value(qp.point);
      g = g + qp.weight * phi.gradient(qp.point);
    }
    for (std::size_t k = p_off[sc.recon]; k < p_off[sc.recon + 1]; ++k) b[p_cols[k]] += f * p_vals[k];
    for (std::size_t k = g_off[sc.grad]; k < g_off[sc.grad + 1]; ++k) b[g_cols[k]] += g.x * vx[k] + g.y * vy[k];
  }
  return b;
}

double consistency_defect(const GradientDiscretisation& gd, const ScalarTestFunction& phi) {
  const auto b = consistency_rhs(gd, phi);
  const auto w = solve_spd(para_gram(gd), b, tight_cg()).x;
  const auto pw = reconstruct(gd, w);
  const auto gw = reconstruct_gradient(gd, w);
  double e_pi = 0.0, e_grad = 0.0;
  for (const auto& sc : gd.subcells) {
    for (std::size_t q = sc.quad_begin; q < sc.quad_begin + sc.quad_count; ++q) {
      const auto& qp = gd.quadrature[q];
      const double d = pw[sc.recon] - phi.value(qp.point);
      const Vec2 dg = gw[sc.grad] - phi.gradient(qp.point);
      e_pi += qp.weight * d * d;
      e_grad += qp.weight * dot(dg, dg);
    }
  }
  return std::sqrt(e_pi) + std::sqrt(e_grad);
}

std::vector<double> conformity_functional(const GradientDiscretisation& gd, const VectorTestField& phi) {
  // Gauss points and end points of every boundary segment
  const double g = 0.5 / std::sqrt(3.0);
  for (const auto& seg : gd.boundary) {
    for (double s : {0.5 - g, 0.5 + g, 0.0, 1.0}) {
      const Vec2 x = seg.a + s * (seg.b - seg.a);
      const double flux = dot(phi.value(x), seg.normal);
      if (std::abs(flux) > 1e-10) {
        throw PreconditionViolation("test field has nonzero normal component " + std::to_string(flux) +
                                    " on the boundary");
      }
    }
  }
  std::vector<double> l(gd.ndof, 0.0);
  const auto p_off = gd.pi_map.row_offsets();
  const auto p_cols = gd.pi_map.col_indices();
  const auto p_vals = gd.pi_map.values();
  const auto g_off = gd.grad_x.row_offsets();
  const auto g_cols = gd.grad_x.col_indices();
  const auto vx = gd.grad_x.values();
  const auto vy = gd.grad_y.values();
  for (const auto& sc : gd.subcells) {
    Vec2 v;
    double div = 0.0;
    for (std::size_t q = sc.quad_begin; q < sc.quad_begin + sc.quad_count; ++q) {
      const auto& qp = gd.quadrature[q];
      v = v + qp.weight * phi.value(qp.point);
      div += qp.weight * phi.divergence(qp.point);
    }
    for (std::size_t k = g_off[sc.grad]; k < g_off[sc.grad + 1]; ++k) l[g_cols[k]] += v.x * vx[k] + v.y * vy[k];
    for (std::size_t k = p_off[sc.recon]; k < p_off[sc.recon + 1]; ++k) l[p_cols[k]] += div * p_vals[k];
  }
  return l;
}

double limit_conformity_defect(const GradientDiscretisation& gd, const VectorTestField& phi) {
  const auto l = conformity_functional(gd, phi);
  if (max_abs(l) == 0.0) return 0.0;
  const auto y = solve_spd(grad_gram(gd), l, tight_cg(), mean_vector(gd)).x;
  return std::sqrt(std::max(0.0, dot(l, y)));
}

QualityReport quality_report(const GradientDiscretisation& gd, const std::string& mesh_label) {
  QualityReport r;
  r.scheme = gd.scheme;
  r.mesh = mesh_label;
  r.h = gd.mesh_size;
  r.ndof = gd.ndof;
  r.coercivity = coercivity_constant(gd);
  const auto phi = sine_product(gd.domain_hi.x - gd.domain_lo.x);
  r.consistency[phi.name] = consistency_defect(gd, phi);
  const auto field = curl_bubble();
  r.conformity[field.name] = limit_conformity_defect(gd, field);
  return r;
}

}  // namespace gdm
