#pragma once

// Run configuration: a flat key=value file overridden by --key value flags.

#include <dgavg/analysis.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dgavg {

const char* version();

struct RunConfig {
  std::string command;             // mesh | solve | study | probe
  std::string problem = "sin2";
  Method method = Method::oipg;
  int k = 1;
  double s = 1.6;
  double sigma0 = 10.0;
  std::vector<int> mesh_sizes{8, 16, 32};
  BallMode ball = BallMode::exact;
  int n_circ = 64;
  int tube_refinement = 2;
  double tol = 1e-10;
  int max_iter = 20000;
  std::uint64_t seed = 42;
  std::string output = "dgavg_out";
  int threads = 1;
  std::string name;                // probe name
  bool export_matrix = false;
  double eoc_threshold = 0.9;
  HChoice h_choice = HChoice::global;
  int max_oracle_n = 4;
  double quad_tol = 1e-6;          // oracle a_eta relative tolerance

  /// Effective configuration as ordered key=value pairs.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

std::vector<std::string> config_keys();

/// Parses `file_text` (key = value per line, '#' comments), then applies the
/// flag list: a bare first word is the command, `--key value` and
/// `--key=value` override file entries. Dashes in keys read as underscores.
/// Throws ConfigError naming the offending key.
RunConfig parse_config(std::string_view file_text, const std::vector<std::string>& args);

/// Cross-field validation (command present, s > 1.5 for oipg, increasing
/// mesh sizes, ...). Throws ConfigError.
void validate(const RunConfig& config);

}  // namespace dgavg
