#include <dgavg/dg_space.hpp>
#include <dgavg/mesh.hpp>
#include <dgavg/mollifier.hpp>
#include <dgavg/quadrature.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace dgavg;

namespace {

constexpr double kPi = std::numbers::pi;

int face_containing(const Mesh& mesh, const Vec2& x) {
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.faces()[f];
    const Vec2 a = mesh.vertices()[face.vertices[0]];
    const Vec2 b = mesh.vertices()[face.vertices[1]];
    if (std::abs(cross(b - a, x - a)) < 1e-14 && dot(x - a, x - b) <= 0.0) return static_cast<int>(f);
  }
  return -1;
}

}  // namespace

TEST_CASE("radius, measure and kernel") {
  const Mollifier m(0.25, 1.6);
  CHECK(std::abs(m.radius() - std::pow(0.25, 1.6)) < 1e-14);
  CHECK(m.ball_measure() == doctest::Approx(kPi * m.radius() * m.radius()));
  CHECK(m.kernel({0.0, 0.0}) * m.ball_measure() == doctest::Approx(1.0));
  CHECK(m.kernel({0.3 * m.radius(), 0.1 * m.radius()}) == m.kernel({-0.3 * m.radius(), -0.1 * m.radius()}));
  CHECK(m.kernel({2.0 * m.radius(), 0.0}) == 0.0);
}

TEST_CASE("double kernel") {
  const Mollifier m(0.5, 2.0);
  const double r = m.radius();
  CHECK(m.eta2_value({0.0, 0.0}) == doctest::Approx(1.0 / (kPi * r * r)));
  CHECK(m.eta2_value({2.0 * r, 0.0}) == 0.0);
  AdaptiveOptions opts;
  opts.rel_tol = 1e-10;
  const double breaks[] = {r};
  const AdaptiveResult mass = integrate_adaptive_1d(
      [&](double t, std::span<double> out) { out[0] = 2.0 * kPi * t * m.eta2_radial(t); }, 1, 0.0, 2.0 * r,
      opts, breaks);
  CHECK(std::abs(mass.value[0] - 1.0) < 1e-6);
}

TEST_CASE("averages of constants and linear fields") {
  const Mesh mesh = build_structured_unit_square(8);
  const Mollifier m(mesh.h_global(), 2.0);
  const BrokenSpace v(mesh, 1);
  const DgFunction one = project([](const Vec2&) { return 1.0; }, v);
  const DgFunction lin = project([](const Vec2& x) { return x.x + 2.0 * x.y; }, v);
  const Vec2 x{0.43, 0.61};
  CHECK(average_at(m, one, {0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(average_at(m, lin, x) == doctest::Approx(x.x + 2.0 * x.y).epsilon(1e-10));

  const Vec2 g = grad_average_at(m, lin, {0.43, 0.61});
  CHECK(g.x == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(g.y == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(norm(grad_average_at(m, one, {0.43, 0.61})) < 1e-9);

  const Vec2 dd = double_convolved_grad_at(m, lin, {0.43, 0.61});
  CHECK(dd.x == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(dd.y == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(norm(double_convolved_grad_at(m, one, {0.43, 0.61})) < 1e-9);
}

TEST_CASE("step function across a straight interior edge") {
  const Mesh mesh = build_structured_unit_square(8);
  const Mollifier m(mesh.h_global(), 2.0);
  const BrokenSpace v0(mesh, 0);
  const DgFunction step = project([](const Vec2& x) { return x.x < 0.5 ? 1.0 : 0.0; }, v0);
  const Vec2 x{0.5, 0.3125};
  CHECK(average_at(m, step, x) == doctest::Approx(0.5).epsilon(1e-10));

  const int f = face_containing(mesh, x);
  REQUIRE(f >= 0);
  const Vec2 c = face_convolution_at(m, step, f, x);
  CHECK(norm(c) == doctest::Approx(2.0 * m.radius() / m.ball_measure()).epsilon(1e-10));
  CHECK(std::abs(c.y) < 1e-12);
  CHECK(norm(face_convolution_at(m, step, f, {0.5 + 2.0 * m.radius(), 0.3125})) == 0.0);
}

TEST_CASE("gradient of the average matches finite differences") {
  const Mesh mesh = build_structured_unit_square(4);
  const Mollifier m(mesh.h_global(), 1.6);
  const BrokenSpace v(mesh, 1);
  const DgFunction fn = random_function(v, 11);
  const double step = m.radius() * 1e-4;
  for (const Vec2 x : {Vec2{0.37, 0.52}, Vec2{0.71, 0.19}, Vec2{0.05, 0.93}}) {
    const Vec2 g = grad_average_at(m, fn, x);
    const double fx = (average_at(m, fn, {x.x + step, x.y}) - average_at(m, fn, {x.x - step, x.y})) / (2 * step);
    const double fy = (average_at(m, fn, {x.x, x.y + step}) - average_at(m, fn, {x.x, x.y - step})) / (2 * step);
    CHECK(std::abs(g.x - fx) < 1e-6 * (1.0 + std::abs(fx)));
    CHECK(std::abs(g.y - fy) < 1e-6 * (1.0 + std::abs(fy)));
  }
}

TEST_CASE("average of a zero-extended field near the boundary") {
  const Mesh mesh = build_structured_unit_square(4);
  const Mollifier m(mesh.h_global(), 2.0);
  // Centred on the boundary: half the ball lies outside the domain.
  CHECK(average_field_at(m, mesh, [](const Vec2&) { return 1.0; }, {0.5, 0.0}) ==
        doctest::Approx(0.5).epsilon(1e-10));
  CHECK(average_field_at(m, mesh, [](const Vec2&) { return 1.0; }, {0.0, 0.0}) ==
        doctest::Approx(0.25).epsilon(1e-10));
}
