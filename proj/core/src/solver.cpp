#include <dgavg/errors.hpp>
#include <dgavg/solver.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dgavg {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double lanczos_condition(const std::vector<double>& alpha, const std::vector<double>& beta) {
  const Eigen::Index m = static_cast<Eigen::Index>(alpha.size());
  if (m == 0) return 1.0;
  Eigen::VectorXd diag(m);
  Eigen::VectorXd sub(std::max<Eigen::Index>(m - 1, 0));
  for (Eigen::Index j = 0; j < m; ++j) {
    diag[j] = 1.0 / alpha[j] + (j > 0 ? beta[j - 1] / alpha[j - 1] : 0.0);
    if (j + 1 < m) sub[j] = std::sqrt(beta[j]) / alpha[j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return ev[m - 1] / ev[0];
}

}  // namespace

SolveResult cg_solve(const SymSparseMatrix& a, std::span<const double> b, double tol, int max_iter) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = a.dim();
  if (b.size() != n) throw std::invalid_argument("cg_solve: right-hand side has wrong length");
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("cg_solve: tol must lie in (0, 1)");

  SolveResult result;
  result.x.assign(n, 0.0);
  auto& rep = result.report;
  const double bnorm = norm2(b);
  auto finish = [&] {
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  if (bnorm == 0.0) {
    finish();
    return result;
  }

  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) d = d > 0.0 ? 1.0 / d : 1.0;
  std::vector<double> r(b.begin(), b.end()), z(n), p(n), ap(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = 0.0;
  for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];

  std::vector<double> alphas, betas;
  for (int it = 1; it <= max_iter; ++it) {
    a.multiply(p, ap);
    double pap = 0.0;
    for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
    if (!(pap > 0.0)) {
      std::size_t dominant = 0;
      for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(p[i]) > std::abs(p[dominant])) dominant = i;
      }
      std::ostringstream os;
      os << "matrix is not positive definite: search direction at iteration " << it
         << " has p^T A p = " << pap << " (largest component at dof " << dominant << ")";
      throw SolverError(os.str(), rep.residual_history);
    }
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      result.x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    alphas.push_back(alpha);
    rep.iterations = it;
    const double rel = norm2(r) / bnorm;
    rep.residual_history.push_back(rel);
    rep.final_relative_residual = rel;
    if (rel <= tol) {
      rep.condition_estimate = lanczos_condition(alphas, betas);
      finish();
      return result;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    double rz_new = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz_new += r[i] * z[i];
    const double beta = rz_new / rz;
    betas.push_back(beta);
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  std::ostringstream os;
  os << "CG did not converge in " << max_iter << " iterations (relative residual "
     << rep.final_relative_residual << ", tolerance " << tol << ")";
  throw SolverError(os.str(), rep.residual_history);
}

SpdCheck cholesky_spd_check(const SymSparseMatrix& a, std::size_t dense_limit) {
  const std::size_t n = a.dim();
  if (n > dense_limit) {
    throw BudgetError("dense Cholesky check refused: dimension " + std::to_string(n) +
                      " exceeds the limit " + std::to_string(dense_limit));
  }
  std::vector<double> l = a.to_dense();
  SpdCheck check;
  check.min_pivot = n == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    double d = l[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    check.min_pivot = std::min(check.min_pivot, d);
    if (!(d > 0.0)) {
      check.positive_definite = false;
      return check;
    }
    const double root = std::sqrt(d);
    l[j * n + j] = root;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = l[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = v / root;
    }
  }
  check.positive_definite = n > 0;
  return check;
}

DenseSolve dense_solve(const SymSparseMatrix& a, std::span<const double> b, std::size_t dense_limit) {
  const std::size_t n = a.dim();
  if (n > dense_limit) {
    throw BudgetError("dense solve refused: dimension " + std::to_string(n) + " exceeds the limit " +
                      std::to_string(dense_limit));
  }
  if (b.size() != n) throw std::invalid_argument("dense_solve: right-hand side has the wrong size");
  const auto start = std::chrono::steady_clock::now();
  const std::vector<double> dense = a.to_dense();
  const auto idx = static_cast<Eigen::Index>(n);
  const Eigen::MatrixXd m = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      dense.data(), idx, idx);
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b.data(), idx);

  DenseSolve out;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  out.negative_eigenvalues = static_cast<int>((lambda.array() < 0.0).count());
  const double smallest = n == 0 ? 0.0 : lambda.cwiseAbs().minCoeff();
  const double largest = n == 0 ? 0.0 : lambda.cwiseAbs().maxCoeff();
  if (!(smallest > 1e-14 * largest)) throw SolverError("dense solve: matrix is numerically singular", {});
  out.result.report.condition_estimate = largest / smallest;

  const Eigen::VectorXd x = m.partialPivLu().solve(rhs);
  out.result.x.assign(x.data(), x.data() + n);
  const double bnorm = rhs.norm();
  out.result.report.final_relative_residual = bnorm > 0.0 ? (m * x - rhs).norm() / bnorm : 0.0;
  out.result.report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace dgavg
