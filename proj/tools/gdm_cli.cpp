// gdm: command-line driver for runs, error tables, quality indicators and
// mesh statistics.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "gdm/error.hpp"
#include "gdm/io.hpp"
#include "gdm/quality.hpp"
#include "gdm/sim.hpp"

namespace fs = std::filesystem;
using namespace gdm;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

int cmd_run(const std::string& config_path) {
  const RunConfig config = parse_config_file(config_path);
  const fs::path dir = config.out_dir;
  fs::create_directories(dir);

  StepObserver observer;
  if (config.vtk_every > 0) {
    observer = [&](const GradientDiscretisation& gd, const SimulationState& st) {
      if (st.step % static_cast<std::size_t>(config.vtk_every) != 0) return;
      write_vtk_file((dir / ("fields_" + std::to_string(st.step) + ".vtk")).string(), gd, st.concentration,
                     st.pressure, st.velocity);
    };
  }
  const auto result = run_coupled(config, observer);
  {
    auto out = open_output(dir / "diagnostics.csv");
    write_diagnostics_csv(out, result.report.steps);
  }
  std::size_t max_picard = 0;
  for (const auto& s : result.report.steps) max_picard = std::max(max_picard, s.picard_iterations);
  std::cout << "test " << to_string(config.test) << ", scheme " << to_string(config.scheme) << ", variant "
            << to_string(config.variant) << ", mesh " << mesh_label(config) << ", dt " << config.dt << "\n"
            << "steps " << result.report.steps.size() << ", ndof " << result.gd.ndof << ", max Picard iterations "
            << max_picard << ", wall " << result.report.wall_seconds << " s\n";
  if (result.report.has_errors) {
    SuiteRow row;
    row.scheme = config.scheme;
    row.variant = config.variant;
    row.mesh = mesh_label(config);
    row.dt = config.dt;
    row.l1 = result.report.l1;
    row.l2 = result.report.l2;
    row.ratio_l1 = row.ratio_l2 = NAN;
    auto out = open_output(dir / "errors.csv");
    write_errors_csv(out, {row});
    std::cout << "L1 " << format_number(row.l1) << ", L2 " << format_number(row.l2) << "\n";
  }
  return 0;
}

int cmd_table(const std::string& suite, const std::string& out_dir) {
  const auto rows = convergence_suite(suite_configs(suite), [](const RunConfig& c) {
    std::cerr << "running " << to_string(c.scheme) << " " << to_string(c.variant) << " " << mesh_label(c)
              << " dt=" << c.dt << "\n";
  });
  fs::create_directories(out_dir);
  auto out = open_output(fs::path(out_dir) / "errors.csv");
  write_errors_csv(out, rows);
  write_errors_csv(std::cout, rows);
  return 0;
}

int cmd_quality(const std::string& scheme, int levels, const std::string& out_path) {
  if (levels < 1 || levels > 6) throw ConfigError("--levels must lie in [1, 6]");
  const auto kind = parse_scheme(scheme);
  std::vector<QualityReport> reports;
  for (int k = 0; k < levels; ++k) {
    const int n = 8 << k;
    if (kind == SchemeKind::a) {
      reports.push_back(quality_report(scheme_a(build_cartesian(n, 1.0)), std::to_string(n) + "x" + std::to_string(n)));
    } else {
      const auto mesh = build_structured_triangulation(n, 1.0);
      reports.push_back(quality_report(scheme_b(mesh, build_dual(mesh)), "tri" + std::to_string(n)));
    }
  }
  if (out_path.empty()) {
    write_quality_csv(std::cout, reports);
  } else {
    auto out = open_output(out_path);
    write_quality_csv(out, reports);
  }
  return 0;
}

int cmd_mesh_info(const std::string& scheme, int n, int level, const std::string& mesh_file, double length,
                  const std::string& pattern) {
  RunConfig c = default_config(TestCase::analytic1);
  c.scheme = parse_scheme(scheme);
  c.n = n;
  c.level = level;
  c.mesh_file = mesh_file;
  c.length = length;
  c.pattern = parse_pattern(pattern);
  if ((c.n > 0) + (c.level > 0) + (!c.mesh_file.empty()) != 1) {
    throw ConfigError("give exactly one of --n, --level, --mesh-file");
  }
  const auto gd = make_discretisation(c);
  const auto [lo, hi] = std::minmax_element(gd.recon_measures.begin(), gd.recon_measures.end());
  double total = 0.0;
  for (double m : gd.recon_measures) total += m;
  std::cout << "scheme " << gd.scheme << "\n"
            << "dofs " << gd.ndof << "\n"
            << "primal cells " << gd.primal_count << "\n"
            << "gradient cells " << gd.grad_count() << "\n"
            << "sub-cells " << gd.subcells.size() << "\n"
            << "boundary segments " << gd.boundary.size() << "\n"
            << "mesh size " << gd.mesh_size << "\n"
            << "domain [" << gd.domain_lo.x << ", " << gd.domain_hi.x << "] x [" << gd.domain_lo.y << ", "
            << gd.domain_hi.y << "]\n"
            << "reconstruction measures min " << *lo << " max " << *hi << " sum " << total << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient discretisation solver for miscible displacement"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one simulation from a key=value config file");
  run->add_option("--config", config_path, "Config file")->required();

  std::string suite, table_out = ".";
  auto* table = app.add_subcommand("table", "Reproduce an error table (ta1, ta2a, ta2b)");
  table->add_option("--suite", suite, "Suite name")->required();
  table->add_option("--out", table_out, "Output directory for errors.csv");

  std::string q_scheme = "a", q_out;
  int q_levels = 3;
  auto* quality = app.add_subcommand("quality", "Coercivity, consistency and limit-conformity indicators");
  quality->add_option("--scheme", q_scheme, "a or b");
  quality->add_option("--levels", q_levels, "Number of refinement levels starting at 8x8");
  quality->add_option("--out", q_out, "CSV path (default: stdout)");

  std::string m_scheme = "a", m_file, m_pattern = "criss_cross";
  int m_n = 0, m_level = 0;
  double m_length = 1.0;
  auto* mesh_info = app.add_subcommand("mesh-info", "Print mesh and discretisation statistics");
  mesh_info->add_option("--scheme", m_scheme, "a or b");
  mesh_info->add_option("--n", m_n, "Cells (scheme a) or pattern blocks (scheme b) per side");
  mesh_info->add_option("--level", m_level, "Triangulation level (scheme b)");
  mesh_info->add_option("--mesh-file", m_file, "Triangular mesh file (scheme b)");
  mesh_info->add_option("--length", m_length, "Side length of the square domain");
  mesh_info->add_option("--pattern", m_pattern, "diagonal or criss_cross");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*table) return cmd_table(suite, table_out);
    if (*quality) return cmd_quality(q_scheme, q_levels, q_out);
    if (*mesh_info) return cmd_mesh_info(m_scheme, m_n, m_level, m_file, m_length, m_pattern);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
