#include <dgavg/quadrature.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace dgavg;

namespace {

// Exact integral of x^a y^b over the reference triangle: a! b! / (a + b + 2)!.
double monomial_integral(int a, int b) {
  return std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 3.0);
}

}  // namespace

TEST_CASE("triangle rule integrates x^2 to 1/12") {
  const QuadratureRule& r = triangle_rule(2);
  double sum = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) sum += r.weights[q] * r.points[q].x * r.points[q].x;
  CHECK(sum == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
}

TEST_CASE("triangle rules are exact up to their degree") {
  for (int degree = 0; degree <= kMaxRuleDegree; ++degree) {
    const QuadratureRule& r = triangle_rule(degree);
    CHECK(r.exactness_degree >= degree);
    for (int a = 0; a <= degree; ++a) {
      const int b = degree - a;
      double sum = 0.0;
      for (std::size_t q = 0; q < r.size(); ++q) {
        CHECK(r.weights[q] > 0.0);
        sum += r.weights[q] * std::pow(r.points[q].x, a) * std::pow(r.points[q].y, b);
      }
      CHECK(sum == doctest::Approx(monomial_integral(a, b)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(triangle_rule(kMaxRuleDegree + 1), std::invalid_argument);
}

TEST_CASE("gauss-legendre on [0,1]") {
  const QuadratureRule& r = gauss_legendre(5);
  double sum = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) sum += r.weights[q] * std::pow(r.points[q].x, 9);
  CHECK(sum == doctest::Approx(0.1).epsilon(1e-14));
  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("adaptive 1d integration handles a kink at a breakpoint") {
  AdaptiveOptions opts;
  opts.rel_tol = 1e-12;
  const double kink[] = {0.3};
  const AdaptiveResult r = integrate_adaptive_1d(
      [](double x, std::span<double> out) {
        out[0] = std::abs(x - 0.3);
        out[1] = std::sin(x);
      },
      2, 0.0, 1.0, opts, kink);
  CHECK(r.converged);
  CHECK(r.value[0] == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-12));
  CHECK(r.value[1] == doctest::Approx(1.0 - std::cos(1.0)).epsilon(1e-12));
}

TEST_CASE("adaptive triangle integration of a disc indicator") {
  AdaptiveOptions opts;
  opts.rel_tol = 1e-3;
  opts.max_cells = 20000;
  const std::vector<Triangle> seeds{Triangle{Vec2{0, 0}, Vec2{1, 0}, Vec2{1, 1}},
                                    Triangle{Vec2{0, 0}, Vec2{1, 1}, Vec2{0, 1}}};
  const AdaptiveResult r = integrate_adaptive_triangles(
      [](const Vec2& x, std::span<double> out) { out[0] = x.x * x.x + x.y * x.y < 1.0 ? 1.0 : 0.0; }, 1,
      seeds, opts);
  CHECK(r.value[0] == doctest::Approx(std::numbers::pi / 4.0).epsilon(2e-3));
}
