#include <dgavg/analysis.hpp>
#include <dgavg/dg_space.hpp>
#include <dgavg/errors.hpp>
#include <dgavg/forms.hpp>
#include <dgavg/mesh.hpp>
#include <dgavg/mollifier.hpp>
#include <dgavg/solver.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace dgavg;

namespace {

constexpr double kPi = std::numbers::pi;

bool exactly_symmetric(const SymSparseMatrix& a) {
  const std::vector<double> d = a.to_dense();
  const std::size_t n = a.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (d[i * n + j] != d[j * n + i]) return false;
  return true;
}

}  // namespace

TEST_CASE("penalty constants and coefficients") {
  CHECK(overpenalty_constant(2) == doctest::Approx(16.0 / (3.0 * kPi * kPi)));
  CHECK(overpenalty_constant(3) == doctest::Approx(0.6));

  Face face;
  face.diameter = 0.125;
  PenaltySpec over;
  over.kind = PenaltyKind::overpenalized;
  over.s = 1.6;
  CHECK(penalty_coefficient(over, face, 0.25) == doctest::Approx(4.9659).epsilon(1e-4));
  CHECK(penalty_coefficient(over, face, 0.25) ==
        doctest::Approx(std::pow(0.25, -1.6) * 16.0 / (3.0 * kPi * kPi)).epsilon(1e-14));

  PenaltySpec classical;
  classical.sigma0 = 10.0;
  CHECK(penalty_coefficient(classical, face, 0.25) == doctest::Approx(80.0));

  over.s = 1.5;
  CHECK_THROWS_AS(validate(over), ConfigError);
  const Mesh mesh = build_structured_unit_square(2);
  CHECK_THROWS_AS(assemble_oipg(BrokenSpace(mesh, 1), 1.2), ConfigError);
}

TEST_CASE("interior penalty matrices are symmetric") {
  const Mesh mesh = build_structured_unit_square(4);
  for (int k = 0; k <= 2; ++k) {
    const BrokenSpace v(mesh, k);
    const SymSparseMatrix sipg = assemble_sipg(v, PenaltySpec{});
    const SymSparseMatrix oipg = assemble_oipg(v, 2.0);
    CHECK(exactly_symmetric(sipg));
    CHECK(exactly_symmetric(oipg));
    CHECK(cholesky_spd_check(sipg).positive_definite);
  }
}

TEST_CASE("sipg reproduces a quadratic bubble") {
  // Manufactured bubble: the k=2 solution is close to its projection.
  const Mesh mesh = build_structured_unit_square(8);
  const BrokenSpace v(mesh, 2);
  const SymSparseMatrix a = assemble_sipg(v, PenaltySpec{});
  const auto u = [](const Vec2& x) { return x.x * (1 - x.x) * x.y * (1 - x.y); };
  const auto g = [](const Vec2& x) { return 2.0 * (x.x * (1 - x.x) + x.y * (1 - x.y)); };
  const std::vector<double> b = assemble_rhs(v, g, RhsMode::plain);
  const SolveResult r = cg_solve(a, b, 1e-12, 10000);
  const DgFunction uh(v, r.x);
  CHECK(l2_error(u, uh) < 1e-4);
  CHECK(l2_error(u, uh) < 2.0 * l2_error(u, project(u, v)));
}

TEST_CASE("threaded assembly is deterministic") {
  const Mesh mesh = build_structured_unit_square(6);
  const BrokenSpace v(mesh, 2);
  AssemblyOptions one;
  AssemblyOptions four;
  four.threads = 4;
  CHECK(assemble_oipg(v, 1.6, one).values() == assemble_oipg(v, 1.6, four).values());
  const auto g = [](const Vec2& x) { return std::sin(3 * x.x) * x.y; };
  CHECK(assemble_rhs(v, g, RhsMode::plain, nullptr, one) == assemble_rhs(v, g, RhsMode::plain, nullptr, four));
}

TEST_CASE("averaged load of a constant field") {
  const Mesh mesh = build_structured_unit_square(4);
  const BrokenSpace v(mesh, 0);
  const Mollifier m(mesh.h_global(), 2.0);
  const auto one = [](const Vec2&) { return 1.0; };
  const std::vector<double> plain = assemble_rhs(v, one, RhsMode::plain);
  const std::vector<double> avg = assemble_rhs(v, one, RhsMode::averaged, &m);
  // Away from the boundary the average of a constant is the constant.
  const int inner = mesh.locate({0.45, 0.55});
  CHECK(avg[v.offset(inner)] == doctest::Approx(plain[v.offset(inner)]).epsilon(1e-10));
  // The zero extension lowers the load next to the boundary.
  const int corner = mesh.locate({0.02, 0.01});
  CHECK(avg[v.offset(corner)] < plain[v.offset(corner)]);
  CHECK_THROWS(assemble_rhs(v, one, RhsMode::averaged));
}
