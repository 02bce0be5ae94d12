#include <dgavg/errors.hpp>
#include <dgavg/solver.hpp>
#include <dgavg/sparse.hpp>

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

using namespace dgavg;

namespace {

// Tridiagonal 1D Laplacian scaled by `shift` on the diagonal.
SymSparseMatrix laplacian(std::size_t n, double diag = 2.0) {
  std::vector<std::vector<std::size_t>> pattern(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) pattern[i].push_back(i - 1);
    pattern[i].push_back(i);
  }
  SymSparseMatrix a(n, pattern);
  for (std::size_t i = 0; i < n; ++i) {
    a.add(i, i, diag);
    if (i > 0) a.add(i, i - 1, -1.0);
  }
  return a;
}

}  // namespace

TEST_CASE("symmetric storage") {
  const SymSparseMatrix a = laplacian(4);
  CHECK(a.at(1, 0) == -1.0);
  CHECK(a.at(0, 1) == -1.0);
  CHECK(a.at(0, 3) == 0.0);
  CHECK(a.contains(2, 1));
  CHECK_FALSE(a.contains(3, 0));
  const std::vector<double> y = a.multiply(std::vector<double>{1, 1, 1, 1});
  CHECK(y == std::vector<double>{1, 0, 0, 1});
  CHECK(a.bilinear(std::vector<double>{1, 0, 0, 0}, std::vector<double>{0, 1, 0, 0}) == -1.0);
  CHECK(write_matrix_market(a, "unit").find("%%MatrixMarket matrix coordinate real general") == 0);
}

TEST_CASE("cg converges on an spd system") {
  const SymSparseMatrix a = laplacian(50);
  const std::vector<double> b(50, 1.0);
  const SolveResult r = cg_solve(a, b, 1e-12, 1000);
  CHECK(r.report.final_relative_residual <= 1e-12);
  CHECK(r.report.iterations <= 50);
  // Exact solution x_i = (i + 1)(n - i) / 2.
  for (std::size_t i = 0; i < 50; ++i) CHECK(r.x[i] == doctest::Approx((i + 1.0) * (50.0 - i) / 2.0).epsilon(1e-9));
  // lambda_max / lambda_min of the 1D Laplacian: cot^2(pi / (2 (n + 1))).
  const double t = std::tan(3.14159265358979323846 / (2.0 * 51.0));
  CHECK(r.report.condition_estimate == doctest::Approx(1.0 / (t * t)).epsilon(1e-2));
  CHECK(r.report.residual_history.size() == static_cast<std::size_t>(r.report.iterations));
}

TEST_CASE("cg detects indefiniteness and non-convergence") {
  const SymSparseMatrix indefinite = laplacian(20, 0.5);
  CHECK_THROWS_AS(cg_solve(indefinite, std::vector<double>(20, 1.0), 1e-12, 1000), SolverError);
  try {
    cg_solve(laplacian(200), std::vector<double>(200, 1.0), 1e-14, 3);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.residual_history().size() == 3);
  }
}

TEST_CASE("dense checks") {
  CHECK(cholesky_spd_check(laplacian(10)).positive_definite);
  const SpdCheck bad = cholesky_spd_check(laplacian(10, 0.5));
  CHECK_FALSE(bad.positive_definite);
  CHECK(bad.min_pivot <= 0.0);
  CHECK_THROWS_AS(cholesky_spd_check(laplacian(30), 10), BudgetError);

  const DenseSolve d = dense_solve(laplacian(20, 0.5), std::vector<double>(20, 1.0));
  CHECK(d.negative_eigenvalues > 0);
  const std::vector<double> back = laplacian(20, 0.5).multiply(d.result.x);
  for (double v : back) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
}
