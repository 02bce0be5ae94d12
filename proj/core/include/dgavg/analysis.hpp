#pragma once

// Error norms, convergence orders and the convergence-study driver.

#include <dgavg/dg_space.hpp>
#include <dgavg/forms.hpp>
#include <dgavg/mollifier.hpp>
#include <dgavg/solver.hpp>

#include <string>
#include <utility>
#include <vector>

namespace dgavg {

/// Manufactured solution u with forcing g = -Δu; u vanishes on ∂Ω.
struct Problem {
  std::string name;
  ScalarField u;
  VectorField grad_u;
  ScalarField g;
};

/// "sin2", "bubble" or "zero"; throws ConfigError(key "problem") otherwise.
Problem problem_by_name(const std::string& name);
std::vector<std::string> problem_names();

double l2_norm(const DgFunction& fn);
double broken_h1_seminorm(const DgFunction& fn);
double l2_error(const ScalarField& u, const DgFunction& fn);
double broken_h1_error(const VectorField& grad_u, const DgFunction& fn);

struct ErrorQuadrature {
  int tube_refinement = 2;  // pieces touching a tube boundary split into tube_refinement² cells
  int rule_degree = 8;
  int threads = 1;
};

/// ‖grad_u − ∇(η ∗ fn)‖ over Ω on cut cells aligned with the tubes of
/// width 2R around every face line.
double averaged_h1_error(const VectorField& grad_u, const DgFunction& fn, const Mollifier& m,
                         const ErrorQuadrature& quad = {});

/// ‖η ∗ g − g_0‖ over Ω_h, g_0 being g extended by zero outside Ω.
double averaged_data_error(const ScalarField& g, const Mesh& mesh, const Mollifier& m,
                           const ErrorQuadrature& quad = {});

/// log(e_i / e_{i+1}) / log(h_i / h_{i+1}); NaN where an error vanishes.
std::vector<double> eoc(const std::vector<double>& h, const std::vector<double>& errors);

/// Least-squares slope of log y against log x over the finite positive pairs.
/// NaN when fewer than `min_points` pairs remain.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y, int min_points = 3);

enum class Method { sipg, oipg };
Method method_by_name(const std::string& name);
const char* method_name(Method method);

struct StudyOptions {
  Method method = Method::oipg;
  int k = 1;
  double s = 1.6;
  double sigma0 = 10.0;
  HChoice h_choice = HChoice::global;
  std::vector<int> mesh_sizes{8, 16, 32};
  double tol = 1e-10;
  int max_iter = 20000;
  int threads = 1;
  MollifierOptions mollifier;
  ErrorQuadrature quadrature;
};

struct StudyRow {
  int n = 0;
  double h = 0.0;
  std::size_t dofs = 0;
  std::vector<double> values;  // one per StudyReport::metrics entry
};

struct StudyReport {
  std::vector<std::string> metrics;
  std::vector<StudyRow> rows;
  std::vector<std::vector<double>> eoc;  // rows.size() - 1 entries, one value per error metric
  std::vector<std::string> eoc_metrics;  // the metrics carrying an EOC
  std::vector<std::pair<std::string, std::string>> config;
  std::string failure;                   // non-empty when a mesh aborted the study
};

/// Assembles, solves and measures on every mesh of the sequence. A solver
/// failure stops the study and is recorded in `failure`.
StudyReport run_convergence_study(const Problem& problem, const StudyOptions& options);

/// Value of the EOC column `metric` on the last refinement step; NaN if absent.
double final_eoc(const StudyReport& report, const std::string& metric);

}  // namespace dgavg
