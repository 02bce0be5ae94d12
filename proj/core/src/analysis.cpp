#include <dgavg/analysis.hpp>
#include <dgavg/errors.hpp>
#include <dgavg/quadrature.hpp>
#include <dgavg/detail/parallel.hpp>
#include <dgavg/detail/seeds.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace dgavg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int error_rule_degree(const BrokenSpace& space, int e) {
  return std::min(kMaxRuleDegree, 2 * space.degree(e) + 8);
}

// Σ_e ∫_e f(e, x) with per-element slots summed in element order.
template <class Fn>
double element_sum(const Mesh& mesh, int threads, Fn&& f) {
  std::vector<double> parts(mesh.num_elements(), 0.0);
  detail::parallel_for(mesh.num_elements(), threads, [&](std::size_t idx) { parts[idx] = f(static_cast<int>(idx)); });
  double total = 0.0;
  for (double p : parts) total += p;
  return total;
}

template <class Fn>
double integrate_on(const Triangle& t, const QuadratureRule& rule, Fn&& f) {
  const double jac = 2.0 * std::abs(triangle_area(t));
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) sum += rule.weights[q] * f(map_to_triangle(t, rule.points[q]));
  return jac * sum;
}

}  // namespace

Problem problem_by_name(const std::string& name) {
  if (name == "sin2") {
    return {name, [](const Vec2& x) { return std::sin(pi * x.x) * std::sin(pi * x.y); },
            [](const Vec2& x) {
              return Vec2{pi * std::cos(pi * x.x) * std::sin(pi * x.y), pi * std::sin(pi * x.x) * std::cos(pi * x.y)};
            },
            [](const Vec2& x) { return 2.0 * pi * pi * std::sin(pi * x.x) * std::sin(pi * x.y); }};
  }
  if (name == "bubble") {
    return {name, [](const Vec2& x) { return x.x * (1.0 - x.x) * x.y * (1.0 - x.y); },
            [](const Vec2& x) {
              return Vec2{(1.0 - 2.0 * x.x) * x.y * (1.0 - x.y), x.x * (1.0 - x.x) * (1.0 - 2.0 * x.y)};
            },
            [](const Vec2& x) { return 2.0 * (x.x * (1.0 - x.x) + x.y * (1.0 - x.y)); }};
  }
  if (name == "zero") {
    return {name, [](const Vec2&) { return 0.0; }, [](const Vec2&) { return Vec2{}; },
            [](const Vec2&) { return 0.0; }};
  }
  throw ConfigError("unknown problem '" + name + "' (expected sin2, bubble or zero)", "problem");
}

std::vector<std::string> problem_names() { return {"sin2", "bubble", "zero"}; }

double l2_norm(const DgFunction& fn) {
  return l2_error([](const Vec2&) { return 0.0; }, fn);
}

double broken_h1_seminorm(const DgFunction& fn) {
  return broken_h1_error([](const Vec2&) { return Vec2{}; }, fn);
}

double l2_error(const ScalarField& u, const DgFunction& fn) {
  const BrokenSpace& space = fn.space();
  const double sum = element_sum(space.mesh(), 1, [&](int e) {
    return integrate_on(space.mesh().triangle(e), triangle_rule(error_rule_degree(space, e)), [&](const Vec2& x) {
      const double d = u(x) - fn.eval(e, x);
      return d * d;
    });
  });
  return std::sqrt(sum);
}

double broken_h1_error(const VectorField& grad_u, const DgFunction& fn) {
  const BrokenSpace& space = fn.space();
  const double sum = element_sum(space.mesh(), 1, [&](int e) {
    return integrate_on(space.mesh().triangle(e), triangle_rule(error_rule_degree(space, e)), [&](const Vec2& x) {
      const Vec2 d = grad_u(x) - fn.grad_eval(e, x);
      return dot(d, d);
    });
  });
  return std::sqrt(sum);
}

double averaged_h1_error(const VectorField& grad_u, const DgFunction& fn, const Mollifier& m,
                         const ErrorQuadrature& quad) {
  const Mesh& mesh = fn.space().mesh();
  const QuadratureRule& rule = triangle_rule(std::min(kMaxRuleDegree, quad.rule_degree));
  const double sum = element_sum(mesh, quad.threads, [&](int e) {
    double part = 0.0;
    for (const Triangle& t : detail::element_seeds(mesh, e, m.radius(), quad.tube_refinement)) {
      part += integrate_on(t, rule, [&](const Vec2& x) {
        const Vec2 d = grad_u(x) - grad_average_at(m, fn, x);
        return dot(d, d);
      });
    }
    return part;
  });
  return std::sqrt(sum);
}

double averaged_data_error(const ScalarField& g, const Mesh& mesh, const Mollifier& m,
                           const ErrorQuadrature& quad) {
  const QuadratureRule& rule = triangle_rule(std::min(kMaxRuleDegree, quad.rule_degree));
  const std::vector<Triangle> seeds = detail::background_seeds(mesh, m.radius(), 4);
  std::vector<double> parts(seeds.size(), 0.0);
  detail::parallel_for(seeds.size(), quad.threads, [&](std::size_t i) {
    parts[i] = integrate_on(seeds[i], rule, [&](const Vec2& x) {
      const double g0 = mesh.locate(x) >= 0 ? g(x) : 0.0;
      const double d = average_field_at(m, mesh, g, x) - g0;
      return d * d;
    });
  });
  double sum = 0.0;
  for (double p : parts) sum += p;
  return std::sqrt(sum);
}

std::vector<double> eoc(const std::vector<double>& h, const std::vector<double>& errors) {
  if (h.size() != errors.size()) throw std::invalid_argument("eoc: size mismatch");
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    const bool ok = errors[i] > 0.0 && errors[i + 1] > 0.0 && h[i] > 0.0 && h[i + 1] > 0.0 && h[i] != h[i + 1];
    out.push_back(ok ? std::log(errors[i] / errors[i + 1]) / std::log(h[i] / h[i + 1]) : kNaN);
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y, int min_points) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count < std::max(min_points, 2)) return kNaN;
  const double denom = count * sxx - sx * sx;
  if (denom == 0.0) return kNaN;
  return (count * sxy - sx * sy) / denom;
}

Method method_by_name(const std::string& name) {
  if (name == "sipg") return Method::sipg;
  if (name == "oipg") return Method::oipg;
  throw ConfigError("unknown method '" + name + "' (expected sipg or oipg)", "method");
}

const char* method_name(Method method) { return method == Method::sipg ? "sipg" : "oipg"; }

StudyReport run_convergence_study(const Problem& problem, const StudyOptions& options) {
  if (options.mesh_sizes.size() < 3) throw ConfigError("a convergence study needs at least 3 meshes", "mesh_sizes");
  for (std::size_t i = 0; i < options.mesh_sizes.size(); ++i) {
    if (options.mesh_sizes[i] < 1 || (i > 0 && options.mesh_sizes[i] <= options.mesh_sizes[i - 1])) {
      throw ConfigError("mesh_sizes must be positive and strictly increasing", "mesh_sizes");
    }
  }
  PenaltySpec spec;
  spec.kind = options.method == Method::oipg ? PenaltyKind::overpenalized : PenaltyKind::classical;
  spec.sigma0 = options.sigma0;
  spec.s = options.s;
  spec.h_choice = options.h_choice;
  validate(spec);
  if (!(options.s > 1.0)) throw ConfigError("the mollifier exponent s must exceed 1", "s");

  StudyReport report;
  report.metrics = {"l2_error", "h1_broken_error", "h1_averaged_error", "h1_projection_error",
                    "iterations", "condition_estimate", "relative_residual"};
  report.eoc_metrics = {"l2_error", "h1_broken_error", "h1_averaged_error", "h1_projection_error"};
  std::ostringstream sizes;
  for (std::size_t i = 0; i < options.mesh_sizes.size(); ++i) sizes << (i ? "," : "") << options.mesh_sizes[i];
  report.config = {{"problem", problem.name},       {"method", method_name(options.method)},
                   {"k", std::to_string(options.k)}, {"s", std::to_string(options.s)},
                   {"sigma0", std::to_string(options.sigma0)}, {"mesh_sizes", sizes.str()}};

  AssemblyOptions assembly;
  assembly.threads = options.threads;
  for (int n : options.mesh_sizes) {
    const Mesh mesh = build_structured_unit_square(n);
    const BrokenSpace space(mesh, options.k);
    const SymSparseMatrix a = assemble_sipg(space, spec, assembly);
    const std::vector<double> b = assemble_rhs(space, problem.g, RhsMode::plain, nullptr, assembly);
    SolveResult solved;
    try {
      solved = cg_solve(a, b, options.tol, options.max_iter);
    } catch (const SolverError& err) {
      report.failure = "n=" + std::to_string(n) + ": " + err.what();
      break;
    }
    const DgFunction uh(space, std::move(solved.x));
    const Mollifier m(mesh.h_global(), options.s, options.mollifier);
    ErrorQuadrature quad = options.quadrature;
    quad.threads = options.threads;
    StudyRow row;
    row.n = n;
    row.h = mesh.h_global();
    row.dofs = space.total_dofs();
    row.values = {l2_error(problem.u, uh),
                  broken_h1_error(problem.grad_u, uh),
                  averaged_h1_error(problem.grad_u, uh, m, quad),
                  broken_h1_error(problem.grad_u, project(problem.u, space)),
                  static_cast<double>(solved.report.iterations),
                  solved.report.condition_estimate,
                  solved.report.final_relative_residual};
    report.rows.push_back(std::move(row));
  }

  std::vector<double> hs;
  for (const StudyRow& r : report.rows) hs.push_back(r.h);
  std::vector<std::vector<double>> columns;
  for (std::size_t c = 0; c < report.eoc_metrics.size(); ++c) {
    std::vector<double> values;
    for (const StudyRow& r : report.rows) values.push_back(r.values[c]);
    columns.push_back(eoc(hs, values));
  }
  for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
    std::vector<double> step;
    for (const auto& col : columns) step.push_back(col[i]);
    report.eoc.push_back(std::move(step));
  }
  return report;
}

double final_eoc(const StudyReport& report, const std::string& metric) {
  for (std::size_t c = 0; c < report.eoc_metrics.size(); ++c) {
    if (report.eoc_metrics[c] == metric && !report.eoc.empty()) return report.eoc.back()[c];
  }
  return kNaN;
}

}  // namespace dgavg
