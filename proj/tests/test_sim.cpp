#include <doctest.h>

#include <cmath>

#include "gdm/error.hpp"
#include "gdm/sim.hpp"

using namespace gdm;

TEST_CASE("default configurations carry the test data") {
  const auto a1 = default_config(TestCase::analytic1);
  CHECK(a1.m_ratio == 1.0);
  CHECK(a1.dm == 0.05);
  CHECK(a1.t_final == 0.4);
  const auto a2 = default_config(TestCase::analytic2);
  CHECK(a2.m_ratio == 40.0);
  CHECK(a2.dm == 0.001);
  const auto l2 = default_config(TestCase::lit2);
  CHECK(l2.m_ratio == 41.0);
  CHECK(l2.dl == 50.0);
  CHECK(l2.dt_disp == 5.0);
  CHECK(l2.length == 1000.0);
  for (auto t : {TestCase::analytic1, TestCase::analytic2, TestCase::lit1, TestCase::lit2}) {
    CHECK_NOTHROW(default_config(t).validate());
    CHECK(parse_test_case(to_string(t)) == t);
  }
}

TEST_CASE("configuration validation") {
  auto c = default_config(TestCase::analytic1);
  c.level = 4;
  CHECK_THROWS_AS(c.validate(), ConfigError);  // two mesh sources
  c = default_config(TestCase::analytic1);
  c.dt = 0.03;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = default_config(TestCase::analytic1);
  c.length = 2.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = default_config(TestCase::analytic1);
  c.dm = 0.07;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = default_config(TestCase::lit1);
  c.phi = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(parse_scheme("c"), ConfigError);
  CHECK_THROWS_AS(parse_variant("upwind"), ConfigError);
  CHECK_THROWS_AS(parse_pattern("hex"), ConfigError);
}

TEST_CASE("zero sources keep c and p at zero") {
  auto c = default_config(TestCase::lit1);
  c.n = 6;
  c.rate = 0.0;
  c.t_final = 90.0;
  const auto r = run_coupled(c);
  CHECK(r.report.steps.size() == 5);
  CHECK(max_abs(r.state.concentration) == 0.0);
  CHECK(max_abs(r.state.pressure) == 0.0);
  CHECK_FALSE(r.report.has_errors);
}

TEST_CASE("error norms of a uniform offset") {
  const auto gd = scheme_a(build_cartesian(7, 1.0));
  const AnalyticalRadialSolution exact(0.05);
  const double t = 0.4;
  auto c = interpolate(gd, [&](Vec2 p) { return exact.concentration(p, t); });
  auto e = error_norms(gd, c, exact, t);
  CHECK(e.l1 == 0.0);
  CHECK(e.l2 == 0.0);
  for (double& v : c) v += 0.125;
  e = error_norms(gd, c, exact, t);
  CHECK(e.l1 == doctest::Approx(0.125).epsilon(1e-13));
  CHECK(e.l2 == doctest::Approx(0.125).epsilon(1e-13));
}

TEST_CASE("Dirichlet dofs lie on the two production edges") {
  for (int n : {4, 9}) {
    const auto gd = scheme_a(build_cartesian(n, 1.0));
    const auto dofs = dirichlet_dofs(gd);
    CHECK(dofs.size() == static_cast<std::size_t>(2 * n + 1));
    for (auto i : dofs) CHECK((gd.anchors[i].x == 0.0 || gd.anchors[i].y == 0.0));
  }
}

TEST_CASE("suites have the table shapes") {
  const auto ta1 = suite_configs("ta1");
  REQUIRE(ta1.size() == 6);
  CHECK(ta1[0].n == 25);
  CHECK(ta1[2].n == 100);
  CHECK(ta1[2].dt == 0.00125);
  CHECK(ta1[3].scheme == SchemeKind::b);
  CHECK(ta1[3].level == 4);
  CHECK(mesh_label(ta1[4]) == "mesh5");
  const auto ta2 = suite_configs("ta2a");
  REQUIRE(ta2.size() == 9);
  CHECK(ta2[7].variant == VariantKind::dh);
  CHECK(ta2[7].dt == 0.01);
  CHECK(suite_configs("ta2b").size() == 9);
  CHECK_THROWS_AS(suite_configs("ta3"), ConfigError);
}

TEST_CASE("coarse analytic run: bounded, converged, deterministic") {
  auto c = default_config(TestCase::analytic1);
  c.n = 10;
  const auto a = run_coupled(c);
  const auto b = run_coupled(c);
  REQUIRE(a.report.has_errors);
  CHECK(a.report.l1 == b.report.l1);
  CHECK(a.report.l2 == b.report.l2);
  CHECK(a.report.l1 < 0.2);
  for (const auto& s : a.report.steps) {
    CHECK(s.cmin >= -0.05);
    CHECK(s.picard_iterations <= 30);
    CHECK(s.linear_residual <= 1e-10);
    CHECK(std::isnan(s.energy_residual));
  }
  // The centred scheme overshoots near the injection corner early on; the
  // overshoot decays as the front spreads.
  CHECK(a.report.steps.back().cmax <= 1.05);
  CHECK(a.report.steps.back().cmax < a.report.steps.front().cmax);
}

TEST_CASE("scheme b runs on a coarse criss-cross mesh and a mesh file") {
  auto c = default_config(TestCase::analytic1);
  c.scheme = SchemeKind::b;
  c.n = 0;
  c.level = 2;
  const auto r = run_coupled(c);
  CHECK(r.gd.ndof == 41);
  CHECK(r.report.l1 < 0.3);
  c.level = 0;
  c.mesh_file = "/nonexistent.mesh";
  CHECK_THROWS_AS(run_coupled(c), IoError);
}

TEST_CASE("observer sees every state") {
  auto c = default_config(TestCase::lit1);
  c.n = 6;
  c.t_final = 54.0;
  std::vector<std::size_t> seen;
  run_coupled(c, [&](const GradientDiscretisation&, const SimulationState& s) { seen.push_back(s.step); });
  CHECK(seen == std::vector<std::size_t>{0, 1, 2, 3});
}
