#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gdm/quality.hpp"
#include "gdm/sim.hpp"

namespace gdm {

// key=value lines, '#' starts a comment. `test` is required and selects the
// defaults; the other keys override them. Errors name the offending line.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);
// Writes every key, so parse_config(serialise(c)) == c.
std::string serialise(const RunConfig& config);

// Numbers in the CSV files carry 6 significant digits.
std::string format_number(double v);

void write_errors_csv(std::ostream& out, const std::vector<SuiteRow>& rows);
void write_diagnostics_csv(std::ostream& out, const std::vector<StepDiagnostics>& steps);
void write_quality_csv(std::ostream& out, const std::vector<QualityReport>& reports);

// Legacy ASCII VTK unstructured grid with one polygon per reconstruction cell,
// cell scalars c and p and the velocity averaged over each cell's sub-cells.
void write_vtk(std::ostream& out, const GradientDiscretisation& gd, std::span<const double> c,
               std::span<const double> p, std::span<const Vec2> subcell_velocity);
void write_vtk_file(const std::string& path, const GradientDiscretisation& gd, std::span<const double> c,
                    std::span<const double> p, std::span<const Vec2> subcell_velocity);

struct VtkSummary {
  std::size_t points = 0;
  std::size_t cells = 0;
  std::vector<std::string> scalars;
  std::vector<std::string> vectors;
};

// Re-reads a file written by write_vtk and checks that every count matches.
// Throws ValidationError.
VtkSummary validate_vtk(std::istream& in);
VtkSummary validate_vtk_file(const std::string& path);

}  // namespace gdm
