#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "gdm/gd.hpp"

namespace gdm {

struct ScalarTestFunction {
  std::string name;
  ScalarFunction value;
  VectorFunction gradient;
};

struct VectorTestField {
  std::string name;
  VectorFunction value;
  ScalarFunction divergence;
};

// sin(pi x / L) sin(pi y / L)
ScalarTestFunction sine_product(double length = 1.0);
// (-d psi/dy, d psi/dx) with psi = x^2 (1-x)^2 y^2 (1-y)^2 on the unit square;
// divergence free and tangential on the boundary.
VectorTestField curl_bubble();

struct PowerIterationOptions {
  double tolerance = 1e-8;
  std::size_t max_iterations = 5000;
};

// max ||Pi w|| / ||w||_ell, from the largest eigenvalue of the pencil
// (Pi-Gram, ell-Gram) by power iteration. Throws NumericalError when the
// iteration does not settle.
double coercivity_constant(const GradientDiscretisation& gd, const PowerIterationOptions& options = {});

// ||Pi w - phi|| + ||grad w - grad phi|| at the least-squares minimiser of the
// squared sum.
double consistency_defect(const GradientDiscretisation& gd, const ScalarTestFunction& phi);

// Dual ell-norm of w -> int (grad w . phi + Pi w div phi). Throws
// PreconditionViolation when phi . n exceeds 1e-10 on the boundary.
double limit_conformity_defect(const GradientDiscretisation& gd, const VectorTestField& phi);

// Right-hand sides exposed for the dense cross-checks in the tests.
std::vector<double> consistency_rhs(const GradientDiscretisation& gd, const ScalarTestFunction& phi);
std::vector<double> conformity_functional(const GradientDiscretisation& gd, const VectorTestField& phi);

struct QualityReport {
  std::string scheme;
  std::string mesh;
  double h = 0.0;
  std::size_t ndof = 0;
  double coercivity = 0.0;
  std::map<std::string, double> consistency;
  std::map<std::string, double> conformity;
};

// C_D, S_D(sine_product) and W_D(curl_bubble) on a unit-square discretisation.
QualityReport quality_report(const GradientDiscretisation& gd, const std::string& mesh_label);

}  // namespace gdm
