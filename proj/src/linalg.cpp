#include "gdm/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gdm/error.hpp"

namespace gdm {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets)
    : rows_(rows), cols_(cols) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) {
      throw InvalidParameter("sparse triplet index out of range");
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  offsets_.assign(rows + 1, 0);
  cols_idx_.reserve(triplets.size());
  values_.reserve(triplets.size());
  std::size_t k = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    while (k < triplets.size() && triplets[k].row == r) {
      const std::size_t c = triplets[k].col;
      double sum = 0.0;
      while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) {
        sum += triplets[k].value;
        ++k;
      }
      cols_idx_.push_back(c);
      values_.push_back(sum);
    }
    offsets_[r + 1] = cols_idx_.size();
  }
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<double> ones(n, 1.0);
  return diagonal(ones);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d) {
  std::vector<Triplet> t;
  t.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
  return SparseMatrix(d.size(), d.size(), std::move(t));
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) s += values_[k] * x[cols_idx_[k]];
    y[r] = s;
  }
}

std::vector<double> SparseMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

std::vector<double> SparseMatrix::transpose_multiply(std::span<const double> x) const {
  std::vector<double> y(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) y[cols_idx_[k]] += values_[k] * x[r];
  }
  return y;
}

double SparseMatrix::coeff(std::size_t i, std::size_t j) const {
  const auto first = cols_idx_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
  const auto last = cols_idx_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_idx_.begin())];
}

std::vector<double> SparseMatrix::diagonal_entries() const {
  std::vector<double> d(std::min(rows_, cols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = coeff(i, i);
  return d;
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) t.push_back({r, cols_idx_[k], values_[k]});
  }
  return t;
}

SparseMatrix SparseMatrix::transpose() const {
  auto t = triplets();
  for (auto& e : t) std::swap(e.row, e.col);
  return SparseMatrix(cols_, rows_, std::move(t));
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> d(rows_ * cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) d[r * cols_ + cols_idx_[k]] = values_[k];
  }
  return d;
}

bool SparseMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      if (std::abs(values_[k] - coeff(cols_idx_[k], r)) > tol) return false;
    }
  }
  return true;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidParameter("matrix size mismatch in add");
  auto t = a.triplets();
  auto tb = b.triplets();
  t.reserve(t.size() + tb.size());
  for (auto& e : tb) t.push_back({e.row, e.col, beta * e.value});
  return SparseMatrix(a.rows(), a.cols(), std::move(t));
}

void SolverConfig::validate() const {
  if (!(tolerance > 0.0 && tolerance < 1.0)) throw InvalidParameter("solver tolerance must lie in (0, 1)");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

namespace {

// y = (A + m m^T) x
void apply_operator(const SparseMatrix& a, std::span<const double> m, std::span<const double> x,
                    std::span<double> y) {
  a.multiply(x, y);
  if (!m.empty()) {
    const double s = dot(m, x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += m[i] * s;
  }
}

std::vector<double> inverse_diagonal(const SparseMatrix& a, std::span<const double> m, bool jacobi) {
  std::vector<double> d(a.rows(), 1.0);
  if (!jacobi) return d;
  const auto diag = a.diagonal_entries();
  for (std::size_t i = 0; i < d.size(); ++i) {
    double v = diag[i] + (m.empty() ? 0.0 : m[i] * m[i]);
    d[i] = (v != 0.0) ? 1.0 / v : 1.0;
  }
  return d;
}

std::size_t iteration_cap(const SolverConfig& c, std::size_t n) {
  return c.max_iterations > 0 ? c.max_iterations : std::max<std::size_t>(20 * n, 20);
}

std::vector<double> initial_guess(std::span<const double> x0, std::size_t n) {
  if (x0.size() == n) return {x0.begin(), x0.end()};
  return std::vector<double>(n, 0.0);
}

SolveResult dense_fallback(const SparseMatrix& a, std::span<const double> b) {
  SolveResult res;
  res.x = dense_lu_solve(a.to_dense(), a.rows(), b);
  res.method_used = SolverMethod::dense_lu;
  res.relative_residual = relative_residual(a, res.x, b);
  return res;
}

SolveResult sparse_fallback(const SparseMatrix& a, std::span<const double> b) {
  const auto n = static_cast<Eigen::Index>(a.rows());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(a.nnz());
  const auto off = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      entries.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols[k]), vals[k]);
    }
  }
  Eigen::SparseMatrix<double> mat(n, n);
  mat.setFromTriplets(entries.begin(), entries.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(mat);
  if (lu.info() != Eigen::Success) throw SolverDivergence("sparse LU factorisation failed", INFINITY);
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n);
  Eigen::VectorXd x = lu.solve(rhs);
  if (!x.allFinite()) throw SolverDivergence("sparse LU produced non-finite values", INFINITY);
  SolveResult res;
  res.x.assign(x.data(), x.data() + n);
  res.method_used = SolverMethod::sparse_lu;
  res.relative_residual = relative_residual(a, res.x, b);
  return res;
}

}  // namespace

double relative_residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b,
                         std::span<const double> rank_one) {
  std::vector<double> r(b.size());
  apply_operator(a, rank_one, x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const double nb = norm2(b);
  return nb > 0.0 ? norm2(r) / nb : norm2(r);
}

std::vector<double> dense_lu_solve(std::span<const double> a, std::size_t n, std::span<const double> b) {
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> mat(
      a.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(n));
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(mat);
  Eigen::VectorXd x = lu.solve(rhs);
  if (!x.allFinite()) throw SolverDivergence("dense LU produced non-finite values", INFINITY);
  return {x.data(), x.data() + n};
}

SolveResult solve_spd(const SparseMatrix& a, std::span<const double> b, const SolverConfig& config,
                      std::span<const double> rank_one, std::span<const double> x0) {
  config.validate();
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw InvalidParameter("solve_spd: dimension mismatch");
  if (!rank_one.empty() && rank_one.size() != n) throw InvalidParameter("solve_spd: rank-one size mismatch");

  SolveResult res;
  res.method_used = SolverMethod::conjugate_gradient;
  res.x = initial_guess(x0, n);
  const double nb = norm2(b);
  if (nb == 0.0) {
    std::fill(res.x.begin(), res.x.end(), 0.0);
    return res;
  }
  const auto dinv = inverse_diagonal(a, rank_one, config.jacobi);
  std::vector<double> r(n), z(n), p(n), q(n);
  apply_operator(a, rank_one, res.x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  const std::size_t cap = iteration_cap(config, n);
  const double target = config.tolerance * nb;

  // Restarted on the true residual so the returned residual is never a
  // recursion artefact.
  for (int sweep = 0; sweep < 4; ++sweep) {
    if (norm2(r) <= target) break;
    for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    p = z;
    double rz = dot(r, z);
    while (res.iterations < cap) {
      apply_operator(a, rank_one, p, q);
      const double pq = dot(p, q);
      if (!(pq > 0.0)) throw SolverDivergence("conjugate gradient: operator not positive definite", norm2(r) / nb);
      const double alpha = rz / pq;
      for (std::size_t i = 0; i < n; ++i) {
        res.x[i] += alpha * p[i];
        r[i] -= alpha * q[i];
      }
      ++res.iterations;
      if (norm2(r) <= 0.5 * target) break;
      for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    apply_operator(a, rank_one, res.x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    if (res.iterations >= cap) break;
  }
  res.relative_residual = norm2(r) / nb;
  if (res.relative_residual > config.tolerance) {
    throw SolverDivergence("conjugate gradient did not converge in " + std::to_string(res.iterations) +
                               " iterations",
                           res.relative_residual);
  }
  return res;
}

SolveResult solve_general(const SparseMatrix& a, std::span<const double> b, const SolverConfig& config,
                          std::span<const double> x0) {
  config.validate();
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw InvalidParameter("solve_general: dimension mismatch");
  if (config.method == SolverMethod::dense_lu) return dense_fallback(a, b);

  SolveResult res;
  res.method_used = SolverMethod::bicgstab;
  res.x = initial_guess(x0, n);
  const double nb = norm2(b);
  if (nb == 0.0) {
    std::fill(res.x.begin(), res.x.end(), 0.0);
    return res;
  }
  const auto dinv = inverse_diagonal(a, {}, config.jacobi);
  const std::size_t cap = iteration_cap(config, n);
  const double target = config.tolerance * nb;

  std::vector<double> r(n), rhat(n), p(n, 0.0), v(n, 0.0), s(n), t(n), phat(n), shat(n);
  a.multiply(res.x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];

  bool converged = norm2(r) <= target;
  double best_r = norm2(r);
  while (!converged && res.iterations < cap) {
    // (Re)start from the true residual.
    rhat = r;
    const std::size_t restart_at = res.iterations;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    bool breakdown = false;
    while (res.iterations < cap) {
      const double rho_new = dot(rhat, r);
      if (std::abs(rho_new) < 1e-300 * nb * nb || omega == 0.0) {
        breakdown = true;
        break;
      }
      const double beta = (rho_new / rho) * (alpha / omega);
      rho = rho_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      for (std::size_t i = 0; i < n; ++i) phat[i] = dinv[i] * p[i];
      a.multiply(phat, v);
      const double rv = dot(rhat, v);
      if (rv == 0.0) {
        breakdown = true;
        break;
      }
      alpha = rho / rv;
      for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
      ++res.iterations;
      if (norm2(s) <= 0.5 * target) {
        for (std::size_t i = 0; i < n; ++i) res.x[i] += alpha * phat[i];
        r = s;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) shat[i] = dinv[i] * s[i];
      a.multiply(shat, t);
      const double tt = dot(t, t);
      omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        res.x[i] += alpha * phat[i] + omega * shat[i];
        r[i] = s[i] - omega * t[i];
      }
      const double rn = norm2(r);
      if (rn <= 0.5 * target || !(rn < 1e3 * best_r)) break;
    }
    a.multiply(res.x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    const double rn = norm2(r);
    converged = rn <= target;
    if (std::isfinite(rn) && rn < best_r) {
      best_r = rn;
    } else if (!(rn < 1e3 * best_r)) {
      break;  // diverging; hand over to the direct solver
    }
    if (breakdown && !converged && res.iterations == restart_at) break;
  }

  res.relative_residual = norm2(r) / nb;
  if (converged && std::isfinite(res.relative_residual)) return res;

  // Stalled: direct solve, dense up to the configured size.
  auto fb = n <= config.dense_fallback_limit ? dense_fallback(a, b) : sparse_fallback(a, b);
  fb.iterations = res.iterations;
  if (fb.relative_residual <= config.tolerance) return fb;
  throw SolverDivergence("direct fallback failed to reach tolerance after " + std::to_string(res.iterations) +
                             " BiCGStab iterations",
                         fb.relative_residual);
}

std::string to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::conjugate_gradient:
      return "conjugate-gradient";
    case SolverMethod::bicgstab:
      return "stabilised-biconjugate";
    case SolverMethod::dense_lu:
      return "dense-lu";
    case SolverMethod::sparse_lu:
      return "sparse-lu";
  }
  return "unknown";
}

}  // namespace gdm
