#pragma once

// Measured checks of the averaged interior penalty theory. Each probe returns
// a table of per-configuration measurements and a pass flag against a
// declared threshold.

#include <dgavg/a_eta.hpp>
#include <dgavg/analysis.hpp>
#include <dgavg/mollifier.hpp>

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace dgavg {

struct ProbeResult {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  double slope = std::numeric_limits<double>::quiet_NaN();  // log-log fit, ≥ 3 refinements only
  double threshold = std::numeric_limits<double>::quiet_NaN();
  bool passed = false;
  std::string message;
  std::vector<std::pair<std::string, std::string>> summary;  // extra key=value facts
};

struct ProbeOptions {
  double s = 1.6;
  int k = 1;
  std::uint64_t seed = 42;
  int threads = 1;
  MollifierOptions mollifier;
  ErrorQuadrature quadrature;
  double oracle_tol = 1e-6;      // relative tolerance of the oracle a_eta assemblies
  double crossval_tol = 1e-8;    // tolerance of the direct vs expanded comparison
  int max_oracle_n = 4;
  double solver_tol = 1e-10;
  int max_iter = 20000;
  double theorem2_bound = 50.0;
  int samples = 200;             // gradient decomposition sample points per mesh
};

ProbeResult probe_penalty_constants(const ProbeOptions& options = {});
ProbeResult probe_a_eta_crossval(const ProbeOptions& options = {});
ProbeResult probe_theorem1(const ProbeOptions& options = {});
ProbeResult probe_theorem2(const ProbeOptions& options = {});
ProbeResult probe_prop2(const ProbeOptions& options = {});
ProbeResult probe_prop1(const ProbeOptions& options = {});
ProbeResult probe_gradient_decomposition(const ProbeOptions& options = {});
ProbeResult probe_mollifier(const ProbeOptions& options = {});
ProbeResult probe_structural(const ProbeOptions& options = {});

std::vector<std::string> probe_names();

/// Runs the probe called `name`; throws ConfigError(key "name") if unknown.
ProbeResult run_probe(const std::string& name, const ProbeOptions& options = {});

}  // namespace dgavg
