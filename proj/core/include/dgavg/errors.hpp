#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dgavg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed mesh or config text. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string key) : Error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// An oracle computation whose cost estimate exceeds the configured budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Iterative solve failure: non-convergence or detected indefiniteness.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> residual_history)
      : Error(what), residual_history_(std::move(residual_history)) {}
  const std::vector<double>& residual_history() const noexcept { return residual_history_; }

 private:
  std::vector<double> residual_history_;
};

}  // namespace dgavg
