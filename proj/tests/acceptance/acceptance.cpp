// Acceptance gate: evaluates the nine criteria and prints one line each.
//
// Usage: dgavg_acceptance [--strict] [criterion numbers...]
// Exit status is 0 once every selected criterion has been evaluated; with
// --strict a failing criterion also yields 1. An exception while evaluating
// a criterion always yields 1.

#include <dgavg/analysis.hpp>
#include <dgavg/errors.hpp>
#include <dgavg/probes.hpp>
#include <dgavg/report.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Outcome {
  bool passed = false;
  std::string message;
};

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> evaluate;
};

Outcome from_probe(const dgavg::ProbeResult& r) { return {r.passed, r.name + ": " + r.message}; }

Outcome both(const dgavg::ProbeResult& a, const dgavg::ProbeResult& b) {
  return {a.passed && b.passed, a.name + ": " + a.message + "; " + b.name + ": " + b.message};
}

Outcome theorem3_study() {
  dgavg::StudyOptions options;
  options.method = dgavg::Method::oipg;
  options.k = 1;
  options.s = 1.6;
  options.mesh_sizes = {8, 16, 32};
  const dgavg::StudyReport report = dgavg::run_convergence_study(dgavg::problem_by_name("sin2"), options);

  std::ostringstream msg;
  bool ok = report.failure.empty() && report.rows.size() == options.mesh_sizes.size();
  if (!report.failure.empty()) msg << "study aborted: " << report.failure << "; ";
  for (const char* metric : {"h1_averaged_error", "h1_broken_error"}) {
    std::size_t col = 0;
    while (col < report.eoc_metrics.size() && report.eoc_metrics[col] != metric) ++col;
    msg << metric << " eoc [";
    for (std::size_t i = 0; i < report.eoc.size(); ++i) {
      const double v = col < report.eoc_metrics.size() ? report.eoc[i][col] : std::nan("");
      msg << (i ? ", " : "") << dgavg::format_number(v);
      if (!(v >= 0.9)) ok = false;
    }
    msg << "] ";
  }
  if (report.eoc.size() + 1 != options.mesh_sizes.size()) ok = false;
  msg << "(threshold 0.9)";
  return {ok, msg.str()};
}

std::vector<Criterion> criteria() {
  return {
      {1, "penalty constants", [] { return from_probe(dgavg::probe_penalty_constants()); }},
      {2, "a_eta direct vs expanded", [] { return from_probe(dgavg::probe_a_eta_crossval()); }},
      {3, "theorem 1 consistency rate", [] { return from_probe(dgavg::probe_theorem1()); }},
      {4, "theorem 2 closeness", [] { return from_probe(dgavg::probe_theorem2()); }},
      {5, "theorem 3 convergence", theorem3_study},
      {6, "gradient decomposition", [] { return from_probe(dgavg::probe_gradient_decomposition()); }},
      {7, "structural invariants", [] { return from_probe(dgavg::probe_structural()); }},
      {8, "proposition probes", [] { return both(dgavg::probe_prop2(), dgavg::probe_prop1()); }},
      {9, "mollifier unit checks", [] { return from_probe(dgavg::probe_mollifier()); }},
  };
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--strict") {
      strict = true;
    } else if (arg == "--help" || arg == "-h") {
      std::cout << "usage: dgavg_acceptance [--strict] [criterion numbers 1-9...]\n";
      return 0;
    } else {
      try {
        selected.insert(std::stoi(arg));
      } catch (const std::exception&) {
        std::cerr << "unknown argument: " << arg << "\n";
        return 2;
      }
    }
  }

  int failed = 0;
  int errored = 0;
  int evaluated = 0;
  for (const Criterion& c : criteria()) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    bool error = false;
    try {
      outcome = c.evaluate();
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
      error = true;
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.1fs", seconds);
    std::cout << (outcome.passed ? "[PASS]" : "[FAIL]") << " criterion " << c.id << " (" << c.title << ", "
              << timing << "): " << outcome.message << std::endl;
    ++evaluated;
    if (!outcome.passed) ++failed;
    if (error) ++errored;
  }
  std::cout << evaluated - failed << "/" << evaluated << " criteria passed" << std::endl;
  if (errored > 0) return 1;
  return strict && failed > 0 ? 1 : 0;
}
