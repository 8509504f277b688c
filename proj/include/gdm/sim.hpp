#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gdm/assembly.hpp"
#include "gdm/gd.hpp"
#include "gdm/physics.hpp"

namespace gdm {

enum class TestCase { analytic1, analytic2, lit1, lit2 };
enum class SchemeKind { a, b };
using VariantKind = ConvectionVariant::Kind;

std::string to_string(TestCase t);
std::string to_string(SchemeKind s);
std::string to_string(VariantKind v);
// Throw ConfigError on unknown names.
TestCase parse_test_case(const std::string& s);
SchemeKind parse_scheme(const std::string& s);
VariantKind parse_variant(const std::string& s);
TrianglePattern parse_pattern(const std::string& s);
std::string to_string(TrianglePattern p);

struct RunConfig {
  TestCase test = TestCase::analytic1;
  SchemeKind scheme = SchemeKind::a;
  VariantKind variant = VariantKind::centred;

  // Exactly one mesh source: n (cells per side, or triangle blocks per side
  // for scheme b), level (scheme b), or mesh_file (scheme b).
  int n = 0;
  int level = 0;
  std::string mesh_file;
  TrianglePattern pattern = TrianglePattern::criss_cross;

  double dt = 0.0;
  double t_final = 0.0;

  double length = 1.0;
  double m_ratio = 1.0;
  double mu0 = 1.0;
  double dm = 0.0;
  double dl = 0.0;
  double dt_disp = 0.0;
  double phi = 1.0;
  double perm = 1.0;
  // Well rate (point wells) or total lineic production rate.
  double rate = 0.0;
  double c0 = 0.0;
  double c_injected = 1.0;

  std::string out_dir = ".";
  // Write a VTK snapshot every k steps (0 = never).
  int vtk_every = 0;

  bool is_analytic() const { return test == TestCase::analytic1 || test == TestCase::analytic2; }
  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Physical data of each test with its first mesh level.
RunConfig default_config(TestCase test);

struct StepDiagnostics {
  std::size_t step = 0;
  double time = 0.0;
  double mass_residual = 0.0;
  double pressure_mean = 0.0;
  double pressure_rhs_norm = 0.0;
  double pressure_residual = 0.0;
  std::size_t picard_iterations = 0;
  double nonlinear_residual = 0.0;
  double linear_residual = 0.0;
  double cmin = 0.0;
  double cmax = 0.0;
  // NaN on Dirichlet-constrained runs, where the pairing does not telescope.
  double energy_residual = 0.0;
};

struct ErrorReport {
  bool has_errors = false;
  double l1 = 0.0;
  double l2 = 0.0;
  std::vector<StepDiagnostics> steps;
  double wall_seconds = 0.0;
};

struct SimulationState {
  std::size_t step = 0;
  double time = 0.0;
  DofVector concentration;
  DofVector pressure;
  std::vector<Vec2> velocity;
};

struct RunResult {
  GradientDiscretisation gd;
  SimulationState state;
  ErrorReport report;
};

GradientDiscretisation make_discretisation(const RunConfig& config);
SourceModel make_sources(const RunConfig& config);
ConvectionVariant make_variant(const RunConfig& config, const GradientDiscretisation& gd);

// Dofs on {x1 = 0} and {x2 = 0}.
std::vector<std::size_t> dirichlet_dofs(const GradientDiscretisation& gd);

using StepObserver = std::function<void(const GradientDiscretisation&, const SimulationState&)>;

// Explicit coupling: the pressure of step n+1 uses c^n, the transport step is
// implicit. The observer sees the initial state and every step.
RunResult run_coupled(const RunConfig& config, const StepObserver& observer = {});

struct ErrorNorms {
  double l1 = 0.0;
  double l2 = 0.0;
};

// Pi c against the exact solution at the reconstruction anchors, weighted by
// the reconstruction cell measures.
ErrorNorms error_norms(const GradientDiscretisation& gd, std::span<const double> c,
                       const AnalyticalRadialSolution& exact, double t);

struct SuiteRow {
  SchemeKind scheme = SchemeKind::a;
  VariantKind variant = VariantKind::centred;
  std::string mesh;
  double dt = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  // Ratio to the previous row of the same scheme and variant (NaN for the first).
  double ratio_l1 = 0.0;
  double ratio_l2 = 0.0;
  std::size_t max_picard = 0;
  double max_linear_residual = 0.0;
  double wall_seconds = 0.0;
};

// Mesh and time step pairs of a suite: "ta1", "ta2a" or "ta2b".
std::vector<RunConfig> suite_configs(const std::string& suite);
std::vector<SuiteRow> convergence_suite(const std::vector<RunConfig>& configs,
                                        const std::function<void(const RunConfig&)>& on_start = {});
std::vector<SuiteRow> convergence_suite(const std::string& suite);

std::string mesh_label(const RunConfig& config);

}  // namespace gdm
