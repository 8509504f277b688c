#include "gdm/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "gdm/error.hpp"

namespace gdm {

std::string to_string(TestCase t) {
  switch (t) {
    case TestCase::analytic1: return "analytic1";
    case TestCase::analytic2: return "analytic2";
    case TestCase::lit1: return "lit1";
    case TestCase::lit2: return "lit2";
  }
  return "?";
}

std::string to_string(SchemeKind s) { return s == SchemeKind::a ? "a" : "b"; }

std::string to_string(VariantKind v) {
  switch (v) {
    case VariantKind::centred: return "centred";
    case VariantKind::upstream: return "upstream";
    case VariantKind::dh: return "dh";
  }
  return "?";
}

std::string to_string(TrianglePattern p) { return p == TrianglePattern::diagonal ? "diagonal" : "criss_cross"; }

TestCase parse_test_case(const std::string& s) {
  for (auto t : {TestCase::analytic1, TestCase::analytic2, TestCase::lit1, TestCase::lit2}) {
    if (s == to_string(t)) return t;
  }
  throw ConfigError("unknown test '" + s + "'");
}

SchemeKind parse_scheme(const std::string& s) {
  if (s == "a" || s == "A") return SchemeKind::a;
  if (s == "b" || s == "B") return SchemeKind::b;
  throw ConfigError("unknown scheme '" + s + "'");
}

VariantKind parse_variant(const std::string& s) {
  for (auto v : {VariantKind::centred, VariantKind::upstream, VariantKind::dh}) {
    if (s == to_string(v)) return v;
  }
  throw ConfigError("unknown variant '" + s + "'");
}

TrianglePattern parse_pattern(const std::string& s) {
  if (s == "diagonal") return TrianglePattern::diagonal;
  if (s == "criss_cross") return TrianglePattern::criss_cross;
  throw ConfigError("unknown triangle pattern '" + s + "'");
}

void RunConfig::validate() const {
  const int sources = (n > 0) + (level > 0) + (!mesh_file.empty());
  if (sources != 1) throw ConfigError("exactly one of n, level, mesh_file must be given");
  if (scheme == SchemeKind::a && n < 2) throw ConfigError("scheme a needs n >= 2");
  if (n < 0 || level < 0) throw ConfigError("n and level must be positive");
  if (!(dt > 0.0) || !(t_final > 0.0)) throw ConfigError("dt and t_final must be positive");
  const double ratio = t_final / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio) || std::round(ratio) < 1.0) {
    throw ConfigError("dt must divide t_final");
  }
  if (!(length > 0.0)) throw ConfigError("length must be positive");
  if (!(m_ratio > 0.0) || !(mu0 > 0.0) || !(perm > 0.0)) throw ConfigError("m_ratio, mu0 and perm must be positive");
  if (!(phi > 0.0 && phi <= 1.0)) throw ConfigError("phi must lie in (0, 1]");
  if (dm < 0.0 || dl < 0.0 || dt_disp < 0.0) throw ConfigError("dispersion coefficients must be nonnegative");
  if (rate < 0.0) throw ConfigError("rate must be nonnegative");
  if (vtk_every < 0) throw ConfigError("vtk_every must be nonnegative");
  if (is_analytic()) {
    if (length != 1.0) throw ConfigError("analytic tests are posed on the unit square");
    if (dl != 0.0 || dt_disp != 0.0) throw ConfigError("analytic tests need dl = dt_disp = 0");
    try {
      AnalyticalRadialSolution check(dm);
    } catch (const InvalidParameter& e) {
      throw ConfigError(e.what());
    }
  }
}

RunConfig default_config(TestCase test) {
  RunConfig c;
  c.test = test;
  switch (test) {
    case TestCase::analytic1:
      c.n = 25, c.dt = 0.02, c.t_final = 0.4;
      c.m_ratio = 1.0, c.dm = 0.05;
      c.rate = std::numbers::pi / 2.0;
      break;
    case TestCase::analytic2:
      c.n = 25, c.dt = 0.02, c.t_final = 0.4;
      c.m_ratio = 40.0, c.dm = 0.001;
      c.rate = std::numbers::pi / 2.0;
      break;
    case TestCase::lit1:
    case TestCase::lit2:
      c.n = 50, c.dt = 18.0, c.t_final = 1080.0;
      c.length = 1000.0, c.phi = 0.1, c.perm = 80.0, c.rate = 30.0;
      if (test == TestCase::lit1) {
        c.m_ratio = 1.0, c.dm = 10.0;
      } else {
        c.m_ratio = 41.0, c.dl = 50.0, c.dt_disp = 5.0;
      }
      break;
  }
  return c;
}

GradientDiscretisation make_discretisation(const RunConfig& config) {
  if (config.scheme == SchemeKind::a) {
    if (!config.mesh_file.empty() || config.level > 0) throw ConfigError("scheme a is built from n only");
    return scheme_a(build_cartesian(config.n, config.length));
  }
  TriangularMesh mesh;
  if (!config.mesh_file.empty()) {
    mesh = load_mesh(config.mesh_file);
  } else {
    const int replication = config.n > 0 ? config.n : replication_for_level(config.level);
    mesh = build_structured_triangulation(replication, config.length, config.pattern);
  }
  const auto dual = build_dual(mesh);
  return scheme_b(mesh, dual);
}

SourceModel make_sources(const RunConfig& config) {
  SourceModel m;
  m.injected_concentration = config.c_injected;
  m.initial_concentration = config.c0;
  const double l = config.length;
  if (config.rate == 0.0) return m;
  m.injection.push_back({{l, l}, config.rate});
  if (config.is_analytic()) {
    m.lineic_production = true;
    m.lineic.injector = {l, l};
    m.lineic.rate_scale = config.rate / (std::numbers::pi / 2.0);
  } else {
    m.production.push_back({{0.0, 0.0}, config.rate});
  }
  return m;
}

ConvectionVariant make_variant(const RunConfig& config, const GradientDiscretisation& gd) {
  switch (config.variant) {
    case VariantKind::centred: return ConvectionVariant::centred();
    case VariantKind::upstream: return ConvectionVariant::upstream();
    case VariantKind::dh: return ConvectionVariant::dh(gd.mesh_size);
  }
  return ConvectionVariant::centred();
}

std::vector<std::size_t> dirichlet_dofs(const GradientDiscretisation& gd) {
  const double tol = 1e-12 * std::max(1.0, gd.domain_hi.x - gd.domain_lo.x);
  std::vector<std::size_t> dofs;
  for (std::size_t i = 0; i < gd.ndof; ++i) {
    const Vec2 p = gd.anchors[i];
    if (std::abs(p.x - gd.domain_lo.x) <= tol || std::abs(p.y - gd.domain_lo.y) <= tol) dofs.push_back(i);
  }
  return dofs;
}

ErrorNorms error_norms(const GradientDiscretisation& gd, std::span<const double> c,
                       const AnalyticalRadialSolution& exact, double t) {
  const auto pc = reconstruct(gd, c);
  ErrorNorms e;
  for (std::size_t r = 0; r < pc.size(); ++r) {
    const double d = pc[r] - exact.concentration(gd.recon_anchors[r], t);
    e.l1 += gd.recon_measures[r] * std::abs(d);
    e.l2 += gd.recon_measures[r] * d * d;
  }
  e.l2 = std::sqrt(e.l2);
  return e;
}

namespace {

std::string step_context(std::size_t step) { return " (time step " + std::to_string(step) + ")"; }

}  // namespace

RunResult run_coupled(const RunConfig& config, const StepObserver& observer) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  RunResult out;
  out.gd = make_discretisation(config);
  const auto& gd = out.gd;
  const auto time = TimeGrid::uniform(config.t_final, config.dt);
  const auto sources = discretise_sources(gd, make_sources(config));
  const MobilityTensor mobility{config.perm, {config.mu0, config.m_ratio}};
  mobility.viscosity.validate();
  const DispersionParams dispersion{config.phi, config.dm, config.dl, config.dt_disp};
  dispersion.validate();
  const auto variant = make_variant(config, gd);

  std::optional<AnalyticalRadialSolution> exact;
  DirichletData dirichlet;
  if (config.is_analytic()) {
    exact.emplace(config.dm, Vec2{config.length, config.length});
    dirichlet.dofs = dirichlet_dofs(gd);
    if (dirichlet.dofs.empty()) throw ConfigError("analytic test without Dirichlet dofs");
    dirichlet.values.resize(dirichlet.dofs.size());
  }

  auto& st = out.state;
  st.concentration = constant_dofs(gd, config.c0);
  st.pressure.assign(gd.ndof, 0.0);
  st.velocity.assign(gd.subcells.size(), Vec2{});
  if (observer) observer(gd, st);

  const SolverConfig pressure_solver{SolverMethod::conjugate_gradient, 1e-11};
  for (std::size_t n = 0; n < time.step_count(); ++n) {
    const double dt = time.step(n);
    const double t1 = time.times[n + 1];
    StepDiagnostics diag;
    diag.step = n + 1;
    diag.time = t1;
    try {
      const auto pressure = solve_pressure(gd, st.concentration, sources, mobility, pressure_solver, st.pressure);
      diag.pressure_mean = pressure.mean_value;
      diag.pressure_rhs_norm = pressure.rhs_norm;
      diag.pressure_residual = pressure.relative_residual;

      if (exact) {
        for (std::size_t k = 0; k < dirichlet.dofs.size(); ++k) {
          dirichlet.values[k] = exact->concentration(gd.anchors[dirichlet.dofs[k]], t1);
        }
      }
      auto result = transport_step(gd, pressure.velocity, st.concentration, dt, sources, dispersion, variant,
                                   dirichlet);
      diag.picard_iterations = result.picard_iterations;
      diag.nonlinear_residual = result.nonlinear_residual;
      diag.linear_residual = result.linear_residual;
      diag.mass_residual = mass_balance_residual(gd, result.concentration, st.concentration, dt, config.phi, sources);
      if (dirichlet.empty()) {
        const auto e = energy_balance(gd, pressure.velocity, result.concentration, st.concentration, dt, sources,
                                      dispersion, variant);
        diag.energy_residual = e.relative_residual();
      } else {
        diag.energy_residual = std::numeric_limits<double>::quiet_NaN();
      }
      st.pressure = pressure.pressure;
      st.velocity = pressure.velocity;
      st.concentration = std::move(result.concentration);
    } catch (const PicardNoConvergence& e) {
      throw PicardNoConvergence(std::string(e.what()) + step_context(n + 1), e.history());
    } catch (const SolverDivergence& e) {
      throw SolverDivergence("linear solve failed" + step_context(n + 1), e.residual());
    }
    st.step = n + 1;
    st.time = t1;
    const auto pc = reconstruct(gd, st.concentration);
    const auto [lo, hi] = std::minmax_element(pc.begin(), pc.end());
    diag.cmin = *lo;
    diag.cmax = *hi;
    out.report.steps.push_back(diag);
    if (observer) observer(gd, st);
  }

  if (exact) {
    const auto e = error_norms(gd, st.concentration, *exact, st.time);
    out.report.has_errors = true;
    out.report.l1 = e.l1;
    out.report.l2 = e.l2;
  }
  out.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string mesh_label(const RunConfig& config) {
  if (config.scheme == SchemeKind::a) return std::to_string(config.n) + "x" + std::to_string(config.n);
  if (!config.mesh_file.empty()) return config.mesh_file;
  if (config.level > 0) return "mesh" + std::to_string(config.level);
  return "tri" + std::to_string(config.n);
}

std::vector<RunConfig> suite_configs(const std::string& suite) {
  std::vector<RunConfig> out;
  if (suite == "ta1") {
    const double steps[] = {0.02, 0.005, 0.00125};
    for (auto scheme : {SchemeKind::a, SchemeKind::b}) {
      for (int k = 0; k < 3; ++k) {
        auto c = default_config(TestCase::analytic1);
        c.scheme = scheme;
        c.dt = steps[k];
        if (scheme == SchemeKind::a) {
          c.n = 25 << k;
        } else {
          c.n = 0;
          c.level = 4 + k;
        }
        out.push_back(c);
      }
    }
    return out;
  }
  if (suite == "ta2a" || suite == "ta2b") {
    const double steps[] = {0.02, 0.01, 0.005};
    const auto scheme = suite == "ta2a" ? SchemeKind::a : SchemeKind::b;
    for (auto v : {VariantKind::centred, VariantKind::upstream, VariantKind::dh}) {
      for (int k = 0; k < 3; ++k) {
        auto c = default_config(TestCase::analytic2);
        c.scheme = scheme;
        c.variant = v;
        c.dt = steps[k];
        if (scheme == SchemeKind::a) {
          c.n = 25 << k;
        } else {
          c.n = 0;
          c.level = 4 + k;
        }
        out.push_back(c);
      }
    }
    return out;
  }
  throw ConfigError("unknown suite '" + suite + "' (expected ta1, ta2a or ta2b)");
}

std::vector<SuiteRow> convergence_suite(const std::vector<RunConfig>& configs,
                                        const std::function<void(const RunConfig&)>& on_start) {
  std::vector<SuiteRow> rows;
  for (const auto& c : configs) {
    if (!c.is_analytic()) throw ConfigError("convergence suites need an analytic test");
    if (on_start) on_start(c);
    const auto r = run_coupled(c);
    SuiteRow row;
    row.scheme = c.scheme;
    row.variant = c.variant;
    row.mesh = mesh_label(c);
    row.dt = c.dt;
    row.l1 = r.report.l1;
    row.l2 = r.report.l2;
    row.ratio_l1 = row.ratio_l2 = std::numeric_limits<double>::quiet_NaN();
    if (!rows.empty() && rows.back().scheme == row.scheme && rows.back().variant == row.variant) {
      row.ratio_l1 = rows.back().l1 / row.l1;
      row.ratio_l2 = rows.back().l2 / row.l2;
    }
    for (const auto& s : r.report.steps) {
      row.max_picard = std::max(row.max_picard, s.picard_iterations);
      row.max_linear_residual = std::max(row.max_linear_residual, s.linear_residual);
    }
    row.wall_seconds = r.report.wall_seconds;
    rows.push_back(row);
  }
  return rows;
}

std::vector<SuiteRow> convergence_suite(const std::string& suite) { return convergence_suite(suite_configs(suite)); }

}  // namespace gdm
