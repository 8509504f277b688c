#include "gdm/physics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gdm/error.hpp"

namespace gdm {

void ViscosityModel::validate() const {
  if (!(mu0 > 0.0)) throw InvalidParameter("mu(0) must be positive");
  if (!(mobility_ratio > 0.0)) throw InvalidParameter("mobility ratio must be positive");
}

double viscosity(const ViscosityModel& model, double c) {
  const double s = truncate(c);
  const double base = 1.0 + (std::pow(model.mobility_ratio, 0.25) - 1.0) * s;
  const double b2 = base * base;
  return model.mu0 / (b2 * b2);
}

double MobilityTensor::operator()(double c) const { return permeability / gdm::viscosity(viscosity, c); }

double MobilityTensor::lower_bound() const {
  return permeability / viscosity.mu0 * std::min(1.0, viscosity.mobility_ratio);
}

double MobilityTensor::upper_bound() const {
  return permeability / viscosity.mu0 * std::max(1.0, viscosity.mobility_ratio);
}

void DispersionParams::validate() const {
  if (!(porosity > 0.0 && porosity <= 1.0)) throw InvalidParameter("porosity must lie in (0, 1]");
  if (molecular < 0.0 || longitudinal < 0.0 || transverse < 0.0) {
    throw InvalidParameter("diffusion and dispersion coefficients must be nonnegative");
  }
}

Tensor2 tensor_D(const DispersionParams& params, Vec2 u) {
  const double dm = params.dm();
  const double speed = norm(u);
  Tensor2 d{dm, 0.0, dm};
  if (speed == 0.0) return d;
  const double dl = params.dl();
  const double dt = params.dt();
  const double k = (dl - dt) / speed;
  d.xx += k * u.x * u.x + speed * dt;
  d.yy += k * u.y * u.y + speed * dt;
  d.xy = k * u.x * u.y;
  return d;
}

Tensor2 tensor_Dh(const DispersionParams& params, Vec2 u, double h) {
  if (!(h > 0.0)) throw InvalidParameter("mesh size must be positive");
  Tensor2 d = tensor_D(params, u);
  const double floor = norm(u) * h;
  d.xx = std::max(d.xx, floor);
  d.yy = std::max(d.yy, floor);
  return d;
}

double truncate(double s) { return std::max(0.0, std::min(s, 1.0)); }

double psi(double z, int n_terms) {
  if (n_terms < 0) throw InvalidParameter("psi: number of terms must be nonnegative");
  if (!(z >= 0.0)) throw InvalidParameter("psi: argument must be nonnegative");
  // e^{-z} underflows beyond this point.
  if (z > 745.0) return 0.0;
  const double ez = std::exp(-z);
  double v = 0.0;
  for (int k = 0; k < n_terms; ++k) v = z / static_cast<double>(n_terms - k) * (v + ez);
  return v + ez;
}

namespace {

int radial_order(double dm) {
  if (!(dm > 0.0)) throw InvalidParameter("analytical solution needs d_m > 0");
  const double n = 2.0 / (4.0 * dm) - 1.0;
  const double rounded = std::round(n);
  if (rounded < 0.0 || std::abs(n - rounded) > 1e-9 * std::max(1.0, n)) {
    throw InvalidParameter("2 / (4 d_m) - 1 must be a nonnegative integer");
  }
  return static_cast<int>(rounded);
}

}  // namespace

AnalyticalRadialSolution::AnalyticalRadialSolution(double dm, Vec2 centre)
    : dm_(dm), order_(radial_order(dm)), centre_(centre) {}

double AnalyticalRadialSolution::concentration(Vec2 x, double t) const {
  if (!(t > 0.0)) throw InvalidParameter("analytical solution is evaluated at t > 0 only");
  const Vec2 d = x - centre_;
  return psi(dot(d, d) / (4.0 * dm_ * t), order_);
}

double exact_c(const AnalyticalRadialSolution& sol, Vec2 x, double t) { return sol.concentration(x, t); }

double SourceModel::total_injection() const {
  double s = 0.0;
  for (const auto& w : injection) s += w.rate;
  return s;
}

double production_angle(Vec2 injector, Vec2 point) {
  const Vec2 to_origin = Vec2{0.0, 0.0} - injector;
  const Vec2 to_point = point - injector;
  return std::atan2(std::abs(cross(to_origin, to_point)), dot(to_origin, to_point));
}

std::vector<double> boundary_production_weights(const GradientDiscretisation& gd, Vec2 injector) {
  const double tol = 1e-12 * std::max(gd.domain_hi.x - gd.domain_lo.x, gd.domain_hi.y - gd.domain_lo.y);
  std::vector<double> weights(gd.boundary.size(), 0.0);
  for (std::size_t k = 0; k < gd.boundary.size(); ++k) {
    const auto& s = gd.boundary[k];
    const bool bottom = std::abs(s.a.y) <= tol && std::abs(s.b.y) <= tol;
    const bool left = std::abs(s.a.x) <= tol && std::abs(s.b.x) <= tol;
    if (!bottom && !left) continue;
    weights[k] = std::abs(production_angle(injector, s.b) - production_angle(injector, s.a));
  }
  return weights;
}

double DiscreteSources::total_injection() const {
  double s = 0.0;
  for (double v : injection) s += v;
  return s;
}

double DiscreteSources::total_production() const {
  double s = 0.0;
  for (double v : production) s += v;
  return s;
}

namespace {

std::size_t nearest_recon(const GradientDiscretisation& gd, Vec2 p) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < gd.recon_count(); ++r) {
    const double d = norm(gd.recon_anchors[r] - p);
    if (d < best_d) {
      best_d = d;
      best = r;
    }
  }
  return best;
}

}  // namespace

DiscreteSources discretise_sources(const GradientDiscretisation& gd, const SourceModel& model) {
  std::vector<double> inj(gd.recon_count(), 0.0), prod(gd.recon_count(), 0.0);
  for (const auto& w : model.injection) inj[nearest_recon(gd, w.location)] += w.rate;
  for (const auto& w : model.production) prod[nearest_recon(gd, w.location)] += w.rate;
  if (model.lineic_production) {
    const auto weights = boundary_production_weights(gd, model.lineic.injector);
    for (std::size_t k = 0; k < weights.size(); ++k) prod[gd.boundary[k].recon] += model.lineic.rate_scale * weights[k];
  }
  DiscreteSources s;
  s.injection = gd.pi_map.transpose_multiply(inj);
  s.production = gd.pi_map.transpose_multiply(prod);
  s.injected_concentration = model.injected_concentration;
  const double ti = s.total_injection();
  const double tp = s.total_production();
  if (std::abs(ti - tp) > 1e-12 * std::max({1.0, ti, tp})) {
    throw ConfigError("source terms are not compatible: injection " + std::to_string(ti) + " vs production " +
                      std::to_string(tp));
  }
  return s;
}

}  // namespace gdm
