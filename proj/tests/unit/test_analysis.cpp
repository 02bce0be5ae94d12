#include <dgavg/analysis.hpp>
#include <dgavg/dg_space.hpp>
#include <dgavg/errors.hpp>
#include <dgavg/mesh.hpp>
#include <dgavg/mollifier.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace dgavg;

TEST_CASE("eoc and log-log slope") {
  const std::vector<double> h{0.4, 0.2, 0.1};
  const std::vector<double> e{1.6, 0.4, 0.1};
  const std::vector<double> rates = eoc(h, e);
  REQUIRE(rates.size() == 2);
  CHECK(rates[0] == doctest::Approx(2.0));
  CHECK(rates[1] == doctest::Approx(2.0));
  CHECK(std::isnan(eoc({0.4, 0.2}, {1.0, 0.0})[0]));
  CHECK(loglog_slope(h, e) == doctest::Approx(2.0));
  CHECK(std::isnan(loglog_slope({0.4, 0.2}, {1.0, 0.5})));
}

TEST_CASE("problems") {
  const Problem p = problem_by_name("sin2");
  const Vec2 x{0.3, 0.7};
  const double pi = std::numbers::pi;
  CHECK(p.u(x) == doctest::Approx(std::sin(pi * 0.3) * std::sin(pi * 0.7)));
  CHECK(p.g(x) == doctest::Approx(2 * pi * pi * p.u(x)));
  CHECK(p.grad_u(x).x == doctest::Approx(pi * std::cos(pi * 0.3) * std::sin(pi * 0.7)));
  CHECK_THROWS_AS(problem_by_name("nope"), ConfigError);
  CHECK(method_by_name("sipg") == Method::sipg);
  CHECK(std::string(method_name(Method::oipg)) == "oipg");
}

TEST_CASE("norms of projections") {
  const Mesh mesh = build_structured_unit_square(4);
  const BrokenSpace v(mesh, 1);
  const DgFunction lin = project([](const Vec2& x) { return x.x + 2.0 * x.y; }, v);
  CHECK(l2_error([](const Vec2& x) { return x.x + 2.0 * x.y; }, lin) < 1e-12);
  CHECK(broken_h1_seminorm(lin) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(broken_h1_error([](const Vec2&) { return Vec2{1.0, 2.0}; }, lin) < 1e-12);
}

TEST_CASE("averaged error of the zero function") {
  // With fn = 0 the error is the L2 norm of grad sin(pi x) sin(pi y): pi / sqrt(2).
  const Mesh mesh = build_structured_unit_square(4);
  const BrokenSpace v(mesh, 1);
  const DgFunction zero(v);
  const Mollifier m(mesh.h_global(), 1.6);
  const Problem p = problem_by_name("sin2");
  CHECK(averaged_h1_error(p.grad_u, zero, m) == doctest::Approx(std::numbers::pi / std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("study input validation") {
  StudyOptions opts;
  opts.mesh_sizes = {4, 8};
  CHECK_THROWS_AS(run_convergence_study(problem_by_name("sin2"), opts), ConfigError);
  opts.mesh_sizes = {8, 4, 16};
  CHECK_THROWS_AS(run_convergence_study(problem_by_name("sin2"), opts), ConfigError);
}

TEST_CASE("sipg study converges") {
  StudyOptions opts;
  opts.method = Method::sipg;
  opts.k = 1;
  opts.s = 2.0;
  opts.mesh_sizes = {2, 4, 8};
  const StudyReport r = run_convergence_study(problem_by_name("sin2"), opts);
  REQUIRE(r.failure.empty());
  REQUIRE(r.rows.size() == 3);
  CHECK(final_eoc(r, "l2_error") > 1.7);
  CHECK(final_eoc(r, "h1_broken_error") > 0.8);
  CHECK(std::isnan(final_eoc(r, "missing")));
}
