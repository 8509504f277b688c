#include <doctest.h>

#include <cmath>
#include <random>

#include "dense_oracle.hpp"
#include "gdm/error.hpp"
#include "gdm/quality.hpp"

using namespace gdm;
using gdm::testing::DenseSchemeA;

TEST_CASE("coercivity constant: dense generalised eigenvalue oracle on a 3x3 grid") {
  const auto gd = scheme_a(build_cartesian(3, 1.0));
  CHECK(std::abs(coercivity_constant(gd) - testing::dense_coercivity(DenseSchemeA(3))) <= 1e-6);
}

TEST_CASE("coercivity constant bounds every probe") {
  const auto tri = build_structured_triangulation(4, 1.0);
  for (const auto& gd : {scheme_a(build_cartesian(6, 1.0)), scheme_b(tri, build_dual(tri))}) {
    const double cd = coercivity_constant(gd);
    CHECK(cd >= 1.0 - 1e-6);  // w = 1 gives ratio 1 on the unit square
    std::mt19937 rng(11);
    std::normal_distribution<double> nd;
    for (int k = 0; k < 20; ++k) {
      std::vector<double> w(gd.ndof);
      for (double& v : w) v = nd(rng);
      CHECK(norm_l2_pi(gd, w) / norm_ell(gd, w) <= cd + 1e-6);
    }
  }
}

TEST_CASE("consistency defect: dense normal-equations oracle on a 3x3 grid") {
  const DenseSchemeA d(3);
  const auto phi = sine_product();
  const auto gd = scheme_a(build_cartesian(3, 1.0));
  CHECK(std::abs(consistency_defect(gd, phi) - testing::dense_consistency(d, phi)) <= 1e-8);
  const auto rhs = consistency_rhs(gd, phi);
  const auto b = testing::dense_consistency_rhs(d, phi);
  for (Eigen::Index i = 0; i < d.ndof; ++i) CHECK(std::abs(rhs[static_cast<std::size_t>(i)] - b(i)) <= 1e-13);
}

TEST_CASE("limit-conformity defect: dense factorisation oracle on a 3x3 grid") {
  const auto gd = scheme_a(build_cartesian(3, 1.0));
  const auto field = curl_bubble();
  CHECK(std::abs(limit_conformity_defect(gd, field) - testing::dense_conformity(DenseSchemeA(3), field)) <= 1e-8);
}

TEST_CASE("exactly representable test functions have zero defects") {
  const auto gd = scheme_a(build_cartesian(5, 1.0));
  const ScalarTestFunction one{"one", [](Vec2) { return 1.0; }, [](Vec2) { return Vec2{}; }};
  CHECK(consistency_defect(gd, one) <= 1e-10);
  const VectorTestField zero{"zero", [](Vec2) { return Vec2{}; }, [](Vec2) { return 0.0; }};
  CHECK(limit_conformity_defect(gd, zero) == 0.0);
  const VectorTestField leaking{"leaking", [](Vec2 p) { return Vec2{p.x, 0.0}; }, [](Vec2) { return 1.0; }};
  CHECK_THROWS_AS(limit_conformity_defect(gd, leaking), PreconditionViolation);
}

TEST_CASE("defects vanish under refinement on both schemes") {
  double s_a = 1e9, w_a = 1e9, s_b = 1e9, w_b = 1e9;
  for (int n : {8, 16, 32}) {
    const auto a = quality_report(scheme_a(build_cartesian(n, 1.0)), "a");
    const auto m = build_structured_triangulation(n, 1.0);
    const auto b = quality_report(scheme_b(m, build_dual(m)), "b");
    CHECK(a.consistency.at("sin_sin") < s_a);
    CHECK(a.conformity.at("curl_bubble") < w_a);
    CHECK(b.consistency.at("sin_sin") < s_b);
    CHECK(b.conformity.at("curl_bubble") < w_b);
    CHECK(a.coercivity == doctest::Approx(1.0).epsilon(0.05));
    CHECK(b.coercivity < 1.5);
    s_a = a.consistency.at("sin_sin");
    w_a = a.conformity.at("curl_bubble");
    s_b = b.consistency.at("sin_sin");
    w_b = b.conformity.at("curl_bubble");
  }
}
