#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gdm {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Compressed-row sparse matrix. Column indices are sorted and unique within
// each row; duplicate triplets are summed on construction in input order, so
// identical triplet sequences give bit-identical matrices.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);

  static SparseMatrix identity(std::size_t n);
  static SparseMatrix diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_offsets() const noexcept { return offsets_; }
  std::span<const std::size_t> col_indices() const noexcept { return cols_idx_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  // y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;
  // y = A^T x
  std::vector<double> transpose_multiply(std::span<const double> x) const;

  double coeff(std::size_t i, std::size_t j) const;
  std::vector<double> diagonal_entries() const;
  SparseMatrix transpose() const;
  std::vector<Triplet> triplets() const;
  // Dense row-major copy, meant for tests and small fallbacks.
  std::vector<double> to_dense() const;

  // Structural and numerical symmetry up to an absolute tolerance.
  bool is_symmetric(double tol = 0.0) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> cols_idx_;
  std::vector<double> values_;
};

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double beta = 1.0);

// sparse_lu is only reported as the method used by the direct fallback on
// systems larger than dense_fallback_limit.
enum class SolverMethod { conjugate_gradient, bicgstab, dense_lu, sparse_lu };

struct SolverConfig {
  SolverMethod method = SolverMethod::conjugate_gradient;
  double tolerance = 1e-10;
  // 0 selects 20 * ndof.
  std::size_t max_iterations = 0;
  bool jacobi = true;
  // solve_general falls back to dense LU up to this size, sparse LU above.
  std::size_t dense_fallback_limit = 2000;

  void validate() const;
};

struct SolveResult {
  std::vector<double> x;
  std::size_t iterations = 0;
  // ||b - A x|| / ||b||, recomputed from the returned x.
  double relative_residual = 0.0;
  SolverMethod method_used = SolverMethod::conjugate_gradient;
};

// Solves (A + m m^T) x = b for symmetric positive definite A + m m^T by
// Jacobi-preconditioned conjugate gradients. The rank-one term is applied
// matrix-free; pass an empty span to omit it.
SolveResult solve_spd(const SparseMatrix& a, std::span<const double> b,
                      const SolverConfig& config = {},
                      std::span<const double> rank_one = {},
                      std::span<const double> x0 = {});

// Nonsymmetric solve by preconditioned BiCGStab. When the iteration stalls or
// diverges it falls back to dense LU up to dense_fallback_limit unknowns and to
// sparse LU above.
SolveResult solve_general(const SparseMatrix& a, std::span<const double> b,
                          const SolverConfig& config = {},
                          std::span<const double> x0 = {});

// Dense LU with partial pivoting on a row-major n x n matrix.
std::vector<double> dense_lu_solve(std::span<const double> a, std::size_t n,
                                   std::span<const double> b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double max_abs(std::span<const double> a);

// ||b - (A + m m^T) x|| / ||b|| (absolute residual when b = 0).
double relative_residual(const SparseMatrix& a, std::span<const double> x,
                         std::span<const double> b,
                         std::span<const double> rank_one = {});

std::string to_string(SolverMethod m);

}  // namespace gdm
