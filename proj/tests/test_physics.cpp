#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "gdm/error.hpp"
#include "gdm/physics.hpp"

using namespace gdm;

namespace {

// e^{-z} sum_{k<=N} z^k / k! summed term by term in long double.
double psi_oracle(double z, int n) {
  long double term = 1.0L, s = 1.0L;
  for (int k = 1; k <= n; ++k) {
    term *= static_cast<long double>(z) / k;
    s += term;
  }
  return static_cast<double>(std::exp(-static_cast<long double>(z)) * s);
}

Eigen::Matrix2d peaceman_oracle(double dm, double dl, double dt, Eigen::Vector2d u) {
  const double s = u.norm();
  Eigen::Matrix2d d = dm * Eigen::Matrix2d::Identity();
  if (s > 0) {
    const Eigen::Matrix2d e = u * u.transpose() / (s * s);
    d += s * (dl * e + dt * (Eigen::Matrix2d::Identity() - e));
  }
  return d;
}

}  // namespace

TEST_CASE("viscosity law") {
  CHECK(viscosity({1.0, 41.0}, 0.0) == doctest::Approx(1.0));
  CHECK(viscosity({1.0, 41.0}, 1.0) == doctest::Approx(1.0 / 41.0));
  for (double c : {-0.3, 0.0, 0.4, 1.0, 2.0}) CHECK(viscosity({1.0, 1.0}, c) == 1.0);
  // Monotone decreasing for M > 1.
  double prev = 2.0;
  for (double c = 0.0; c <= 1.0; c += 0.1) {
    const double v = viscosity({1.0, 41.0}, c);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS((ViscosityModel{1.0, -1.0}).validate(), InvalidParameter);
}

TEST_CASE("mobility stays between its bounds") {
  const MobilityTensor a{80.0, {1.0, 41.0}};
  for (double c = -0.5; c <= 1.5; c += 0.05) {
    CHECK(a(c) >= a.lower_bound() * (1 - 1e-14));
    CHECK(a(c) <= a.upper_bound() * (1 + 1e-14));
  }
  CHECK(a.lower_bound() == 80.0);
  CHECK(a.upper_bound() == doctest::Approx(80.0 * 41.0));
}

TEST_CASE("Peaceman tensor") {
  const auto id = tensor_D({1.0, 1.0, 0.0, 0.0}, {0.0, 0.0});
  CHECK(id == Tensor2{1.0, 0.0, 1.0});
  const auto axis = tensor_D({1.0, 0.0, 5.0, 0.5}, {1.0, 0.0});
  CHECK(axis.xx == doctest::Approx(5.0));
  CHECK(axis.xy == doctest::Approx(0.0));
  CHECK(axis.yy == doctest::Approx(0.5));
  const auto d = tensor_D({1.0, 0.0, 5.0, 0.5}, {3.0, 4.0});
  const auto o = peaceman_oracle(0.0, 5.0, 0.5, {3.0, 4.0});
  CHECK(d.xx == doctest::Approx(10.6).epsilon(1e-14));
  CHECK(d.xy == doctest::Approx(10.8).epsilon(1e-14));
  CHECK(d.yy == doctest::Approx(16.9).epsilon(1e-14));
  CHECK(std::abs(d.xx - o(0, 0)) <= 1e-13);
  CHECK(std::abs(d.xy - o(0, 1)) <= 1e-13);
  CHECK(std::abs(d.yy - o(1, 1)) <= 1e-13);
}

TEST_CASE("Peaceman tensor: porosity scaling and eigenvalues") {
  const DispersionParams p{0.1, 10.0, 50.0, 5.0};
  for (Vec2 u : {Vec2{0.2, -1.3}, Vec2{-7.0, 2.0}, Vec2{1e-3, 0.0}}) {
    const auto d = tensor_D(p, u);
    const auto o = peaceman_oracle(p.dm(), p.dl(), p.dt(), {u.x, u.y});
    CHECK(d.xx == doctest::Approx(o(0, 0)));
    CHECK(d.xy == doctest::Approx(o(0, 1)).epsilon(1e-12));
    CHECK(d.yy == doctest::Approx(o(1, 1)));
    // u is an eigenvector with eigenvalue dm + dl |u|.
    const Vec2 du = d.apply(u);
    const double lam = p.dm() + p.dl() * norm(u);
    CHECK(du.x == doctest::Approx(lam * u.x));
    CHECK(du.y == doctest::Approx(lam * u.y));
  }
  CHECK_THROWS_AS((DispersionParams{0.0, 1.0, 0.0, 0.0}).validate(), InvalidParameter);
  CHECK_THROWS_AS((DispersionParams{0.5, -1.0, 0.0, 0.0}).validate(), InvalidParameter);
}

TEST_CASE("vanishing-diffusion tensor") {
  const auto d = tensor_Dh({1.0, 0.0, 0.0, 0.0}, {1.0, 0.0}, 0.02);
  CHECK(d == Tensor2{0.02, 0.0, 0.02});
  const DispersionParams dominant{1.0, 1.0, 0.0, 0.0};
  CHECK(tensor_Dh(dominant, {0.3, 0.4}, 0.01) == tensor_D(dominant, {0.3, 0.4}));
  CHECK(tensor_Dh(dominant, {0.0, 0.0}, 5.0) == tensor_D(dominant, {0.0, 0.0}));
  CHECK_THROWS_AS(tensor_Dh(dominant, {1.0, 0.0}, 0.0), InvalidParameter);
}

TEST_CASE("truncation") {
  CHECK(truncate(-0.5) == 0.0);
  CHECK(truncate(0.3) == 0.3);
  CHECK(truncate(2.0) == 1.0);
}

TEST_CASE("psi recurrence against the partial-sum oracle") {
  CHECK(psi(0.0, 9) == 1.0);
  CHECK(psi(1.0, 1) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(psi(1.0, 1) == doctest::Approx(0.735759).epsilon(1e-6));
  for (double z : {0.0, 0.7, 3.0, 40.0}) CHECK(psi(z, 0) == doctest::Approx(std::exp(-z)).epsilon(1e-15));
  double worst = 0.0;
  for (int n : {0, 1, 9, 99, 499}) {
    for (int k = 0; k < 500; ++k) {
      const double z = 50.0 * k / 499.0;
      worst = std::max(worst, std::abs(psi(z, n) - psi_oracle(z, n)));
    }
  }
  CHECK(worst <= 1e-12);
  CHECK_THROWS_AS(psi(-1.0, 3), InvalidParameter);
  CHECK_THROWS_AS(psi(1.0, -1), InvalidParameter);
}

TEST_CASE("radial analytical solution") {
  const AnalyticalRadialSolution s(0.05);
  CHECK(s.order() == 9);
  CHECK(AnalyticalRadialSolution(0.001).order() == 499);
  CHECK(exact_c(s, {1.0, 1.0}, 0.3) == 1.0);
  CHECK(exact_c(s, {0.0, 0.0}, 0.4) == doctest::Approx(psi_oracle(25.0, 9)).epsilon(1e-13));
  CHECK(exact_c(s, {0.0, 0.0}, 0.4) < 1e-3);
  CHECK(exact_c(s, {0.2, 0.5}, 1e-6) == 0.0);
  CHECK_THROWS_AS(AnalyticalRadialSolution(0.07), InvalidParameter);
  CHECK_THROWS_AS(exact_c(s, {0.5, 0.5}, 0.0), InvalidParameter);
}

TEST_CASE("lineic production weights") {
  const Vec2 inj{1.0, 1.0};
  for (int n : {2, 5, 16}) {
    const auto gd = scheme_a(build_cartesian(n, 1.0));
    const auto w = boundary_production_weights(gd, inj);
    double bottom = 0.0, total = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      total += w[k];
      if (gd.boundary[k].a.y == 0.0 && gd.boundary[k].b.y == 0.0) bottom += w[k];
      CHECK(w[k] >= 0.0);
    }
    CHECK(total == doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));
    CHECK(bottom == doctest::Approx(std::numbers::pi / 4).epsilon(1e-14));
    // Each bottom segment against a midpoint-rule integral of d theta / ds.
    for (std::size_t k = 0; k < w.size(); ++k) {
      const auto& s = gd.boundary[k];
      if (!(s.a.y == 0.0 && s.b.y == 0.0)) continue;
      const double lo = std::min(s.a.x, s.b.x), hi = std::max(s.a.x, s.b.x);
      const int m = 2000;
      double q = 0.0;
      for (int i = 0; i < m; ++i) {
        const double x = lo + (hi - lo) * (i + 0.5) / m;
        // theta(x) = pi/4 - atan2(1 - x, 1) measured from the diagonal, so
        // |d theta / dx| = 1 / (1 + (1 - x)^2).
        q += (hi - lo) / m / (1.0 + (1.0 - x) * (1.0 - x));
      }
      CHECK(std::abs(w[k] - q) <= 1e-7);
    }
  }
}

TEST_CASE("discrete sources are balanced or rejected") {
  const auto gd = scheme_a(build_cartesian(4, 1000.0));
  SourceModel wells;
  wells.injection = {{{1000.0, 1000.0}, 30.0}};
  wells.production = {{{0.0, 0.0}, 30.0}};
  const auto s = discretise_sources(gd, wells);
  CHECK(s.total_injection() == 30.0);
  CHECK(s.injection[gd.ndof - 1] == 30.0);
  CHECK(s.production[0] == 30.0);
  wells.production[0].rate = 20.0;
  CHECK_THROWS_AS(discretise_sources(gd, wells), ConfigError);

  const auto unit = scheme_a(build_cartesian(6, 1.0));
  SourceModel lineic;
  lineic.injection = {{{1.0, 1.0}, std::numbers::pi / 2}};
  lineic.lineic_production = true;
  const auto l = discretise_sources(unit, lineic);
  CHECK(l.total_production() == doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));
}
