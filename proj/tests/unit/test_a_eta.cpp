#include <dgavg/a_eta.hpp>
#include <dgavg/dg_space.hpp>
#include <dgavg/errors.hpp>
#include <dgavg/mesh.hpp>
#include <dgavg/mollifier.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace dgavg;

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_rel_diff(const SymSparseMatrix& a, const SymSparseMatrix& b) {
  const std::vector<double> da = a.to_dense();
  const std::vector<double> db = b.to_dense();
  double diff = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) diff = std::max(diff, std::abs(da[i] - db[i]));
  return diff / max_abs(db);
}

}  // namespace

TEST_CASE("piecewise constants only see the jump term") {
  const Mesh mesh = build_structured_unit_square(2);
  const BrokenSpace v(mesh, 0);
  const Mollifier m(mesh.h_global(), 2.0);
  AEtaOptions opts;
  opts.rel_tol = 1e-4;
  const AEtaTerms terms = assemble_a_eta_terms(v, m, opts);
  CHECK(max_abs(terms.volume.values()) == 0.0);
  CHECK(max_abs(terms.cross.values()) == 0.0);
  CHECK(max_abs(terms.jump.values()) > 0.0);

  const SymSparseMatrix tube = assemble_jump_term_tube(v, m, opts);
  CHECK(max_rel_diff(tube, terms.jump) < 1e-4);
}

TEST_CASE("expanded form of a single constant") {
  // One k=0 function equal to 1 on the whole square: a_eta(1, 1) is the
  // squared gradient norm of eta * 1_Omega, a quantity the direct form
  // evaluates independently.
  const Mesh mesh = build_structured_unit_square(2);
  const BrokenSpace v(mesh, 0);
  const Mollifier m(mesh.h_global(), 2.0);
  const DgFunction one = project([](const Vec2&) { return 1.0; }, v);
  AEtaOptions opts;
  opts.rel_tol = 1e-4;
  const SymSparseMatrix a = assemble_a_eta_expanded(v, m, opts);
  const double expanded = a.bilinear(one.coefficients(), one.coefficients());
  const double direct = a_eta_value_direct(m, one, one, opts);
  CHECK(expanded > 0.0);
  CHECK(std::abs(expanded - direct) < 1e-5 * expanded);
}

TEST_CASE("direct assembly respects its budget") {
  const Mesh mesh = build_structured_unit_square(8);
  const BrokenSpace v(mesh, 2);
  const Mollifier m(mesh.h_global(), 1.6);
  AEtaOptions opts;
  opts.max_evaluations = 1e3;
  CHECK_THROWS_AS(assemble_a_eta_direct(v, m, opts), BudgetError);
}
