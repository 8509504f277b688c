// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. The full run takes a few minutes on one core.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dense_oracle.hpp"
#include "gdm/io.hpp"
#include "gdm/physics.hpp"
#include "gdm/quality.hpp"
#include "gdm/sim.hpp"

using namespace gdm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string sci(double v) { return fmt("%.4e", v); }

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * target; }

// Solver health over every run the suite performs (criterion 9).
struct SolverHealth {
  std::size_t runs = 0;
  std::size_t max_picard = 0;
  double max_linear = 0.0;
  double max_pressure = 0.0;

  void record(const ErrorReport& r) {
    ++runs;
    for (const auto& s : r.steps) {
      max_picard = std::max(max_picard, s.picard_iterations);
      max_linear = std::max(max_linear, s.linear_residual);
      max_pressure = std::max(max_pressure, s.pressure_residual);
    }
  }
};

SolverHealth health;

RunResult run(const RunConfig& c) {
  std::fprintf(stderr, "  running %s %s %s %s dt=%g\n", to_string(c.test).c_str(), to_string(c.scheme).c_str(),
               to_string(c.variant).c_str(), mesh_label(c).c_str(), c.dt);
  auto r = run_coupled(c);
  health.record(r.report);
  return r;
}

RunConfig analytic(TestCase t, SchemeKind scheme, VariantKind variant, int k, double dt) {
  auto c = default_config(t);
  c.scheme = scheme;
  c.variant = variant;
  c.dt = dt;
  if (scheme == SchemeKind::a) {
    c.n = 25 << k;
  } else {
    c.n = 0;
    c.level = 4 + k;
  }
  return c;
}

Outcome criterion1() {
  Outcome o;
  const double dts[] = {0.02, 0.005, 0.00125};
  const double l1[] = {2.38e-2, 6.69e-3, 1.73e-3};
  const double l2[] = {3.23e-2, 9.10e-3, 2.36e-3};
  for (int k = 0; k < 3; ++k) {
    const auto r = run(analytic(TestCase::analytic1, SchemeKind::a, VariantKind::centred, k, dts[k]));
    o.require(within(r.report.l1, l1[k], 0.15) && within(r.report.l2, l2[k], 0.15),
              std::to_string(25 << k) + "x" + std::to_string(25 << k) + " L1 " + sci(r.report.l1) + " L2 " +
                  sci(r.report.l2));
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  const double dts[] = {0.02, 0.005, 0.00125};
  const double l1[] = {2.39e-2, 6.70e-3, 1.73e-3};
  const double l2[] = {3.20e-2, 9.04e-3, 2.38e-3};
  double prev = 0.0;
  for (int k = 0; k < 3; ++k) {
    const auto r = run(analytic(TestCase::analytic1, SchemeKind::b, VariantKind::centred, k, dts[k]));
    o.require(within(r.report.l1, l1[k], 0.20) && within(r.report.l2, l2[k], 0.20),
              "mesh" + std::to_string(4 + k) + " L1 " + sci(r.report.l1) + " L2 " + sci(r.report.l2));
    if (k > 0) {
      const double ratio = prev / r.report.l1;
      o.require(ratio >= 3.0 && ratio <= 4.6, "ratio " + fmt("%.2f", ratio));
    }
    prev = r.report.l1;
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  const double dts[] = {0.02, 0.01, 0.005};
  const double dh_l1[] = {1.51e-1, 1.11e-1, 7.80e-2};
  std::vector<double> dh, centred;
  for (int k = 0; k < 3; ++k) {
    const auto r = run(analytic(TestCase::analytic2, SchemeKind::a, VariantKind::dh, k, dts[k]));
    dh.push_back(r.report.l1);
    o.require(within(r.report.l1, dh_l1[k], 0.25), "dh " + std::to_string(25 << k) + " L1 " + sci(r.report.l1));
  }
  o.require(dh[0] > dh[1] && dh[1] > dh[2], "dh strictly decreasing");
  for (int k = 0; k < 3; ++k) {
    const auto r = run(analytic(TestCase::analytic2, SchemeKind::a, VariantKind::centred, k, dts[k]));
    centred.push_back(r.report.l1);
    o.detail += "; centred " + std::to_string(25 << k) + " L1 " + sci(r.report.l1);
  }
  o.require(centred[0] <= centred[1] && centred[1] <= centred[2], "centred non-decreasing");
  return o;
}

Outcome criterion4() {
  Outcome o;
  double worst = 0.0;
  for (int n : {0, 1, 9, 99, 499}) {
    for (int k = 0; k < 500; ++k) {
      const double z = 50.0 * k / 499.0;
      long double term = 1.0L, s = 1.0L;
      for (int j = 1; j <= n; ++j) {
        term *= static_cast<long double>(z) / j;
        s += term;
      }
      const double direct = static_cast<double>(std::exp(-static_cast<long double>(z)) * s);
      worst = std::max(worst, std::abs(psi(z, n) - direct));
    }
  }
  o.require(worst <= 1e-12, "max |psi - partial sum| " + sci(worst));
  return o;
}

// Lit runs are shared between criteria 5, 6 and 9.
std::vector<RunResult> lit_runs;

Outcome criterion5() {
  Outcome o;
  const auto& r = lit_runs.at(0);
  double worst = 0.0;
  for (const auto& s : r.report.steps) worst = std::max(worst, std::abs(s.mass_residual));
  o.require(r.report.steps.size() == 60 && worst <= 1e-8,
            "lit1 50x50, " + std::to_string(r.report.steps.size()) + " steps, max mass residual " + sci(worst));
  return o;
}

Outcome criterion6() {
  Outcome o;
  const char* names[] = {"lit1", "lit2"};
  for (std::size_t k = 0; k < lit_runs.size(); ++k) {
    double worst = 0.0;
    for (const auto& s : lit_runs[k].report.steps) worst = std::max(worst, std::abs(s.pressure_mean) / s.pressure_rhs_norm);
    o.require(worst <= 1e-8, std::string(names[k]) + " max |mean p| / |rhs| " + sci(worst));
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  auto c = default_config(TestCase::lit1);
  c.c0 = 1.0;
  c.c_injected = 1.0;
  c.t_final = 10 * c.dt;
  double worst = 0.0;
  std::size_t states = 0;
  run_coupled(c, [&](const GradientDiscretisation&, const SimulationState& s) {
    ++states;
    for (double v : s.concentration) worst = std::max(worst, std::abs(v - 1.0));
  });
  o.require(states == 11 && worst <= 1e-10, "10 steps, max |c - 1| " + sci(worst));
  return o;
}

Outcome criterion8() {
  Outcome o;
  std::vector<QualityReport> reports;
  for (int n : {8, 16, 32}) reports.push_back(quality_report(scheme_a(build_cartesian(n, 1.0)), std::to_string(n)));
  double lo = 1e300, hi = 0.0;
  for (const auto& r : reports) {
    lo = std::min(lo, r.coercivity);
    hi = std::max(hi, r.coercivity);
  }
  o.require((hi - lo) <= 0.05 * lo, "C_D in [" + fmt("%.6f", lo) + ", " + fmt("%.6f", hi) + "]");
  auto s = [&](int k) { return reports[k].consistency.at("sin_sin"); };
  auto w = [&](int k) { return reports[k].conformity.at("curl_bubble"); };
  o.require(s(0) > s(1) && s(1) > s(2), "S_D " + sci(s(0)) + " " + sci(s(1)) + " " + sci(s(2)));
  o.require(w(0) > w(1) && w(1) > w(2), "W_D " + sci(w(0)) + " " + sci(w(1)) + " " + sci(w(2)));

  const gdm::testing::DenseSchemeA d(3);
  const auto gd = scheme_a(build_cartesian(3, 1.0));
  const double dc = std::abs(coercivity_constant(gd) - gdm::testing::dense_coercivity(d));
  const double ds = std::abs(consistency_defect(gd, sine_product()) - gdm::testing::dense_consistency(d, sine_product()));
  const double dw = std::abs(limit_conformity_defect(gd, curl_bubble()) - gdm::testing::dense_conformity(d, curl_bubble()));
  o.require(dc <= 1e-6 && ds <= 1e-6 && dw <= 1e-6,
            "3x3 dense oracle gaps " + sci(dc) + " " + sci(ds) + " " + sci(dw));
  return o;
}

Outcome criterion9() {
  Outcome o;
  o.require(health.max_picard <= 30, std::to_string(health.runs) + " runs, max Picard " + std::to_string(health.max_picard));
  o.require(health.max_linear <= 1e-10 && health.max_pressure <= 1e-10,
            "max transport residual " + sci(health.max_linear) + ", max pressure residual " + sci(health.max_pressure));
  return o;
}

std::string errors_csv(const RunConfig& c) {
  const auto r = run(c);
  SuiteRow row;
  row.scheme = c.scheme;
  row.variant = c.variant;
  row.mesh = mesh_label(c);
  row.dt = c.dt;
  row.l1 = r.report.l1;
  row.l2 = r.report.l2;
  row.ratio_l1 = row.ratio_l2 = NAN;
  std::ostringstream out;
  write_errors_csv(out, {row});
  write_diagnostics_csv(out, r.report.steps);
  return out.str();
}

Outcome criterion10() {
  Outcome o;
  const auto c = analytic(TestCase::analytic1, SchemeKind::a, VariantKind::centred, 0, 0.02);
  const auto first = errors_csv(c);
  const auto second = errors_csv(c);
  o.require(first == second, "two 25x25 runs, " + std::to_string(first.size()) + " bytes of CSV, identical");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {4, criterion4},  {8, criterion8},  {7, criterion7}, {1, criterion1},
      {2, criterion2},  {3, criterion3},  {10, criterion10},
      {5, [] {
         lit_runs.push_back(run(default_config(TestCase::lit1)));
         lit_runs.push_back(run(default_config(TestCase::lit2)));
         return criterion5();
       }},
      {6, criterion6},  {9, criterion9},
  };
  std::vector<std::pair<int, Outcome>> results;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", c.id, o.detail.c_str());
    std::fflush(stdout);
    results.emplace_back(c.id, o);
  }
  const bool all = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.second.pass; });
  std::printf("%s: %zu criteria\n", all ? "ALL PASS" : "SOME FAILED", results.size());
  return all ? 0 : 1;
}
