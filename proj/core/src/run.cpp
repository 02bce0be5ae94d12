#include <dgavg/errors.hpp>
#include <dgavg/forms.hpp>
#include <dgavg/mesh.hpp>
#include <dgavg/report.hpp>
#include <dgavg/run.hpp>
#include <dgavg/solver.hpp>

#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace dgavg {

namespace {

MollifierOptions mollifier_options(const RunConfig& c) {
  MollifierOptions m;
  m.mode = c.ball;
  m.n_circ = c.n_circ;
  return m;
}

ErrorQuadrature error_quadrature(const RunConfig& c) {
  ErrorQuadrature q;
  q.tube_refinement = c.tube_refinement;
  q.threads = c.threads;
  return q;
}

PenaltySpec penalty_spec(const RunConfig& c) {
  PenaltySpec spec;
  spec.kind = c.method == Method::oipg ? PenaltyKind::overpenalized : PenaltyKind::classical;
  spec.sigma0 = c.sigma0;
  spec.s = c.s;
  spec.h_choice = c.h_choice;
  return spec;
}

int run_mesh(const RunConfig& c, std::ostream& log) {
  const KeyValues config = c.echo();
  std::vector<std::vector<std::string>> rows;
  for (int n : c.mesh_sizes) {
    const Mesh mesh = build_structured_unit_square(n);
    const std::string path = c.output + "_n" + std::to_string(n) + ".mesh";
    write_text_file(path, write_mesh(mesh));
    const MeshMetrics mm = mesh_metrics(mesh);
    rows.push_back({std::to_string(n), format_number(mm.h_global), std::to_string(mm.num_vertices),
                    std::to_string(mm.num_elements), std::to_string(mm.num_faces),
                    std::to_string(mm.num_boundary_faces), format_number(mm.min_face_diameter),
                    format_number(mm.shape_regularity)});
    log << "mesh n=" << n << ": " << mm.num_elements << " elements -> " << path << '\n';
  }
  write_text_file(c.output + ".csv",
                  table_csv({"n", "h", "vertices", "elements", "faces", "boundary_faces", "min_face_diameter",
                             "shape_regularity"},
                            rows, config));
  write_text_file(c.output + ".summary", summary_text({{"passed", "true"}}, config));
  return kExitPass;
}

int run_solve(const RunConfig& c, std::ostream& log) {
  const KeyValues config = c.echo();
  const Problem problem = problem_by_name(c.problem);
  const PenaltySpec spec = penalty_spec(c);
  std::vector<std::vector<std::string>> rows;
  KeyValues summary;
  bool passed = true;
  for (int n : c.mesh_sizes) {
    const Mesh mesh = build_structured_unit_square(n);
    const BrokenSpace space(mesh, c.k);
    const SymSparseMatrix a = assemble_sipg(space, spec, {c.threads});
    const std::vector<double> b = assemble_rhs(space, problem.g, RhsMode::plain, nullptr, {c.threads});
    if (c.export_matrix && n == c.mesh_sizes.back()) {
      write_text_file(c.output + ".mtx", write_matrix_market(a, std::string("dgavg ") + version() + " " +
                                                                      method_name(c.method) + " n=" +
                                                                      std::to_string(n)));
    }
    SolveResult solved;
    try {
      solved = cg_solve(a, b, c.tol, c.max_iter);
    } catch (const SolverError& e) {
      log << "solve n=" << n << " failed: " << e.what() << '\n';
      summary.push_back({"failure", "n=" + std::to_string(n) + ": " + e.what()});
      passed = false;
      break;
    }
    const DgFunction uh(space, solved.x);
    const Mollifier m(mesh.h_global(), c.s, mollifier_options(c));
    rows.push_back({std::to_string(n), format_number(mesh.h_global()), std::to_string(space.total_dofs()),
                    format_number(l2_error(problem.u, uh)), format_number(broken_h1_error(problem.grad_u, uh)),
                    format_number(averaged_h1_error(problem.grad_u, uh, m, error_quadrature(c))),
                    std::to_string(solved.report.iterations), format_number(solved.report.final_relative_residual),
                    format_number(solved.report.condition_estimate)});
    log << "solve n=" << n << ": " << solved.report.iterations << " iterations, residual "
        << solved.report.final_relative_residual << '\n';
    if (n == c.mesh_sizes.back()) {
      write_text_file(c.output + "_solution.csv",
                      write_dg_csv(uh, std::string("dgavg ") + version() + " " + c.problem + " n=" + std::to_string(n)));
    }
  }
  write_text_file(c.output + ".csv",
                  table_csv({"n", "h", "dofs", "l2_error", "h1_broken_error", "h1_averaged_error", "iterations",
                             "relative_residual", "condition_estimate"},
                            rows, config));
  summary.insert(summary.begin(), {"passed", passed ? "true" : "false"});
  write_text_file(c.output + ".summary", summary_text(summary, config));
  return passed ? kExitPass : kExitFailure;
}

int run_study(const RunConfig& c, std::ostream& log) {
  const KeyValues config = c.echo();
  StudyOptions o;
  o.method = c.method;
  o.k = c.k;
  o.s = c.s;
  o.sigma0 = c.sigma0;
  o.h_choice = c.h_choice;
  o.mesh_sizes = c.mesh_sizes;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  o.threads = c.threads;
  o.mollifier = mollifier_options(c);
  o.quadrature = error_quadrature(c);
  const StudyReport report = run_convergence_study(problem_by_name(c.problem), o);
  write_text_file(c.output + ".csv", study_csv(report, config));

  KeyValues summary;
  std::vector<std::string> reasons;
  bool passed = report.failure.empty() && report.rows.size() == c.mesh_sizes.size();
  for (const std::string metric : {"h1_averaged_error", "h1_broken_error"}) {
    for (std::size_t c_idx = 0; c_idx < report.eoc_metrics.size(); ++c_idx) {
      if (report.eoc_metrics[c_idx] != metric) continue;
      double worst = report.eoc.empty() ? std::numeric_limits<double>::quiet_NaN()
                                        : std::numeric_limits<double>::infinity();
      for (const auto& step : report.eoc) {
        if (!(step[c_idx] >= worst)) worst = step[c_idx];  // NaN sticks
      }
      if (!(worst >= c.eoc_threshold)) {
        passed = false;
        if (report.failure.empty()) reasons.push_back("min " + metric + " eoc " + format_number(worst));
      }
      summary.push_back({"min_eoc." + metric, format_number(worst)});
    }
  }
  for (std::size_t i = 0; i < report.eoc.size(); ++i) {
    for (std::size_t c_idx = 0; c_idx < report.eoc_metrics.size(); ++c_idx) {
      summary.push_back({"eoc." + report.eoc_metrics[c_idx] + ".n" + std::to_string(report.rows[i + 1].n),
                         format_number(report.eoc[i][c_idx])});
    }
  }
  if (!report.failure.empty()) summary.push_back({"failure", report.failure});
  summary.insert(summary.begin(), {"passed", passed ? "true" : "false"});
  write_text_file(c.output + ".summary", summary_text(summary, config));
  log << "study " << (passed ? "passed" : "FAILED");
  if (!report.failure.empty()) log << ": " << report.failure;
  for (std::size_t i = 0; i < reasons.size(); ++i) log << (i ? ", " : ": ") << reasons[i];
  if (!reasons.empty()) log << " (threshold " << format_number(c.eoc_threshold) << ")";
  log << '\n';
  return passed ? kExitPass : kExitFailure;
}

int run_probe_command(const RunConfig& c, std::ostream& log) {
  const KeyValues config = c.echo();
  ProbeOptions o;
  o.s = c.s;
  o.k = c.k;
  o.seed = c.seed;
  o.threads = c.threads;
  o.mollifier = mollifier_options(c);
  o.quadrature = error_quadrature(c);
  o.oracle_tol = c.quad_tol;
  o.max_oracle_n = c.max_oracle_n;
  o.solver_tol = c.tol;
  o.max_iter = c.max_iter;
  const ProbeResult r = run_probe(c.name, o);
  write_text_file(c.output + ".csv", probe_csv(r, config));
  KeyValues summary{{"passed", r.passed ? "true" : "false"},
                    {"probe", r.name},
                    {"threshold", format_number(r.threshold)},
                    {"slope", format_number(r.slope)},
                    {"message", r.message}};
  summary.insert(summary.end(), r.summary.begin(), r.summary.end());
  write_text_file(c.output + ".summary", summary_text(summary, config));
  log << "probe " << r.name << ' ' << (r.passed ? "passed" : "FAILED") << ": " << r.message << '\n';
  return r.passed ? kExitPass : kExitFailure;
}

}  // namespace

int run(const RunConfig& config, std::ostream& log) {
  validate(config);
  if (config.command == "mesh") return run_mesh(config, log);
  if (config.command == "solve") return run_solve(config, log);
  if (config.command == "study") return run_study(config, log);
  return run_probe_command(config, log);
}

std::string usage() {
  std::ostringstream out;
  out << "usage: dgavg <mesh|solve|study|probe> [--config FILE] [--KEY VALUE ...]\n\nkeys:\n";
  for (const auto& [key, value] : RunConfig{}.echo()) out << "  " << key << " (default: " << value << ")\n";
  out << "\nprobes:";
  for (const auto& name : probe_names()) out << ' ' << name;
  out << '\n';
  return out.str();
}

int run_command_line(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> rest;
  std::string file_text;
  try {
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--help" || args[i] == "-h") {
        out << usage();
        return kExitPass;
      }
      if (args[i] == "--config" || args[i].rfind("--config=", 0) == 0) {
        std::string path;
        if (args[i] == "--config") {
          if (i + 1 >= args.size()) throw ConfigError("--config needs a file name", "config");
          path = args[++i];
        } else {
          path = args[i].substr(9);
        }
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read config file '" + path + "'", "config");
        std::ostringstream buf;
        buf << in.rdbuf();
        file_text = buf.str();
        continue;
      }
      rest.push_back(args[i]);
    }
    const RunConfig config = parse_config(file_text, rest);
    return run(config, out);
  } catch (const ConfigError& e) {
    err << "config error (" << e.key() << "): " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace dgavg
