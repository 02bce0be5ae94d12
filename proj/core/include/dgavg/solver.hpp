#pragma once

#include <dgavg/sparse.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace dgavg {

struct SolveReport {
  int iterations = 0;
  double final_relative_residual = 0.0;
  /// lambda_max / lambda_min of the Jacobi-preconditioned operator, from the
  /// Lanczos tridiagonal matrix built out of the CG coefficients.
  double condition_estimate = 1.0;
  double wall_time = 0.0;  // seconds
  std::vector<double> residual_history;  // relative residual per iteration
};

struct SolveResult {
  std::vector<double> x;
  SolveReport report;
};

/// Jacobi-preconditioned CG from x0 = 0 until |b - A x| <= tol |b|.
/// Throws SolverError on non-convergence within max_iter (carrying the
/// residual history) or when a search direction with p^T A p <= 0 appears.
SolveResult cg_solve(const SymSparseMatrix& a, std::span<const double> b, double tol, int max_iter);

struct SpdCheck {
  bool positive_definite = false;
  double min_pivot = 0.0;  // smallest pivot before breakdown (<= 0 on failure)
};

inline constexpr std::size_t kDenseCholeskyLimit = 2000;

/// Dense Cholesky attempt; throws BudgetError above `dense_limit`.
SpdCheck cholesky_spd_check(const SymSparseMatrix& a, std::size_t dense_limit = kDenseCholeskyLimit);

struct DenseSolve {
  SolveResult result;           // iterations = 0; condition = max|λ| / min|λ|
  int negative_eigenvalues = 0;
};

/// Dense LU solve for oracle-size systems that may be indefinite. Reports the
/// inertia so callers can tell an SPD system from a merely nonsingular one.
DenseSolve dense_solve(const SymSparseMatrix& a, std::span<const double> b,
                       std::size_t dense_limit = kDenseCholeskyLimit);

}  // namespace dgavg
