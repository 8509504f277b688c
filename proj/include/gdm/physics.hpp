#pragma once

#include <array>
#include <span>
#include <vector>

#include "gdm/gd.hpp"
#include "gdm/mesh.hpp"

namespace gdm {

// mu(c) = mu0 (1 + (M^{1/4} - 1) c)^{-4}, so that mu(0)/mu(1) = M.
struct ViscosityModel {
  double mu0 = 1.0;
  double mobility_ratio = 1.0;

  void validate() const;
};

double viscosity(const ViscosityModel& model, double c);

// A(c) = (k / mu(c)) I
struct MobilityTensor {
  double permeability = 1.0;
  ViscosityModel viscosity;

  double operator()(double c) const;
  // Ellipticity and boundedness constants over all c.
  double lower_bound() const;
  double upper_bound() const;
};

// Raw coefficients; the assembled ones are D_alpha = porosity * d_alpha.
struct DispersionParams {
  double porosity = 1.0;
  double molecular = 0.0;     // d_m
  double longitudinal = 0.0;  // d_l
  double transverse = 0.0;    // d_t

  void validate() const;
  double dm() const { return porosity * molecular; }
  double dl() const { return porosity * longitudinal; }
  double dt() const { return porosity * transverse; }
};

// Symmetric 2x2 tensor stored as {xx, xy, yy}.
struct Tensor2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  Vec2 apply(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
  friend bool operator==(const Tensor2&, const Tensor2&) = default;
};

// Peaceman diffusion-dispersion tensor; the dispersive part is zero at u = 0.
Tensor2 tensor_D(const DispersionParams& params, Vec2 u);
// Same tensor with each diagonal entry raised to at least |u| h.
Tensor2 tensor_Dh(const DispersionParams& params, Vec2 u, double h);

// Clamp onto [0, 1].
double truncate(double s);

// psi(z) = e^{-z} sum_{k=0}^{N} z^k / k!, evaluated by the forward recurrence
// that keeps e^{-z} factored out of every term.
double psi(double z, int n_terms);

// Radial self-similar solution centred at the corner `centre`, valid when
// 2 / (4 d_m) - 1 is a nonnegative integer.
class AnalyticalRadialSolution {
 public:
  explicit AnalyticalRadialSolution(double dm, Vec2 centre = {1.0, 1.0});

  double dm() const { return dm_; }
  int order() const { return order_; }
  Vec2 centre() const { return centre_; }
  double concentration(Vec2 x, double t) const;

 private:
  double dm_;
  int order_;
  Vec2 centre_;
};

double exact_c(const AnalyticalRadialSolution& sol, Vec2 x, double t);

struct PointWell {
  Vec2 location;
  double rate = 0.0;
};

// Lineic production on {x2 = 0} and {x1 = 0} weighted by the angle increment
// seen from the corner `injector` (total weight pi/2 on the unit square).
struct LineicProduction {
  Vec2 injector{1.0, 1.0};
  double rate_scale = 1.0;
};

struct SourceModel {
  std::vector<PointWell> injection;
  std::vector<PointWell> production;
  bool lineic_production = false;
  LineicProduction lineic;
  double injected_concentration = 1.0;
  double initial_concentration = 0.0;

  double total_injection() const;
};

// Angle at `injector` between the ray to the origin and the ray to a point
// of the bottom (x2 = 0) or left (x1 = 0) edge.
double production_angle(Vec2 injector, Vec2 point);

// Angle increment theta(b) - theta(a) for each segment of the bottom/left
// edges; zero for segments elsewhere.
std::vector<double> boundary_production_weights(const GradientDiscretisation& gd, Vec2 injector);

// Source rates integrated against each reconstruction cell indicator, lifted
// to dofs: injection_i = int q^I Pi phi_i, production_i = int q^P Pi phi_i.
struct DiscreteSources {
  std::vector<double> injection;
  std::vector<double> production;
  double injected_concentration = 1.0;

  double total_injection() const;
  double total_production() const;
};

// Throws ConfigError when the discrete rates are not balanced to 1e-12.
DiscreteSources discretise_sources(const GradientDiscretisation& gd, const SourceModel& model);

}  // namespace gdm
