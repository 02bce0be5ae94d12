#include <dgavg/dg_space.hpp>
#include <dgavg/errors.hpp>
#include <dgavg/mesh.hpp>

#include <doctest.h>

#include <cmath>
#include <string>

using namespace dgavg;

TEST_CASE("dof counts") {
  const Mesh m = build_structured_unit_square(2);
  CHECK(BrokenSpace(m, 0).total_dofs() == 8);
  CHECK(BrokenSpace(m, 1).total_dofs() == 24);
  CHECK(BrokenSpace(m, 2).total_dofs() == 48);
  CHECK(dofs_for_degree(3) == 10);
}

TEST_CASE("projection reproduces polynomials of the space degree") {
  const Mesh m = build_structured_unit_square(3);
  const BrokenSpace v(m, 2);
  const DgFunction f = project([](const Vec2& x) { return 1.0 + 2.0 * x.x - x.y + x.x * x.y; }, v);
  for (const Vec2 p : {Vec2{0.1, 0.2}, Vec2{0.55, 0.41}, Vec2{0.9, 0.95}}) {
    const int e = m.locate(p);
    REQUIRE(e >= 0);
    CHECK(f.eval(e, p) == doctest::Approx(1.0 + 2.0 * p.x - p.y + p.x * p.y).epsilon(1e-12));
    const Vec2 g = f.grad_eval(e, p);
    CHECK(g.x == doctest::Approx(2.0 + p.y).epsilon(1e-12));
    CHECK(g.y == doctest::Approx(-1.0 + p.x).epsilon(1e-12));
  }
}

TEST_CASE("jumps and averages") {
  const Mesh m = build_structured_unit_square(2);
  const BrokenSpace v(m, 1);
  const DgFunction linear = project([](const Vec2& x) { return x.x + 2.0 * x.y; }, v);
  for (std::size_t f = 0; f < m.num_faces(); ++f) {
    const Face& face = m.faces()[f];
    const Vec2 mid = 0.5 * (m.vertices()[face.vertices[0]] + m.vertices()[face.vertices[1]]);
    const Vec2 jump = linear.jump(static_cast<int>(f), mid);
    const Vec2 avg = linear.average_grad(static_cast<int>(f), mid);
    if (face.is_boundary()) {
      // Boundary faces carry the one-sided trace.
      const double u = mid.x + 2.0 * mid.y;
      CHECK(jump.x == doctest::Approx(u * face.unit_normal.x).epsilon(1e-12));
      CHECK(jump.y == doctest::Approx(u * face.unit_normal.y).epsilon(1e-12));
    } else {
      CHECK(norm(jump) < 1e-12);
    }
    CHECK(avg.x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(avg.y == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("random functions are seeded") {
  const Mesh m = build_structured_unit_square(2);
  const BrokenSpace v(m, 1);
  CHECK(random_function(v, 7).coefficients() == random_function(v, 7).coefficients());
  CHECK(random_function(v, 7).coefficients() != random_function(v, 8).coefficients());
}

TEST_CASE("dg csv round trip") {
  const Mesh m = build_structured_unit_square(2);
  const BrokenSpace v(m, 1);
  const DgFunction f = random_function(v, 3);
  const std::string text = write_dg_csv(f, "unit");
  const DgFunction g = read_dg_csv(text, v);
  CHECK(g.coefficients() == f.coefficients());
  CHECK_THROWS_AS(read_dg_csv("garbage\n", v), ParseError);
}
