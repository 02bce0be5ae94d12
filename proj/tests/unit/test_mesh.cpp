#include <dgavg/errors.hpp>
#include <dgavg/mesh.hpp>

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace dgavg;

TEST_CASE("structured mesh counts") {
  const Mesh m1 = build_structured_unit_square(1);
  const MeshMetrics a = mesh_metrics(m1);
  CHECK(a.num_vertices == 4);
  CHECK(a.num_elements == 2);
  CHECK(a.num_faces == 5);
  CHECK(a.num_boundary_faces == 4);
  CHECK(a.num_interior_faces == 1);
  CHECK(m1.h_global() == doctest::Approx(std::sqrt(2.0)));

  const MeshMetrics b = mesh_metrics(build_structured_unit_square(2));
  CHECK(b.num_vertices == 9);
  CHECK(b.num_elements == 8);
  CHECK(b.num_faces == 16);
  CHECK(b.num_boundary_faces == 8);
  CHECK(b.min_face_diameter == doctest::Approx(0.5));
}

TEST_CASE("face normals point out of the plus element") {
  const Mesh m = build_structured_unit_square(4);
  for (const Face& f : m.faces()) {
    CHECK(std::abs(norm(f.unit_normal) - 1.0) < 1e-14);
    const Triangle t = m.triangle(f.plus_element);
    const Vec2 centroid = (1.0 / 3.0) * (t[0] + t[1] + t[2]);
    const Vec2 mid = 0.5 * (m.vertices()[f.vertices[0]] + m.vertices()[f.vertices[1]]);
    CHECK(dot(mid - centroid, f.unit_normal) > 0.0);
  }
}

TEST_CASE("element areas sum to one and locate finds interior points") {
  const Mesh m = build_structured_unit_square(5);
  double area = 0.0;
  for (std::size_t e = 0; e < m.num_elements(); ++e) area += m.element_area(static_cast<int>(e));
  CHECK(area == doctest::Approx(1.0).epsilon(1e-14));
  const int e = m.locate({0.31, 0.77});
  REQUIRE(e >= 0);
  CHECK(m.locate({1.5, 0.5}) < 0);
}

TEST_CASE("mesh text round trip") {
  const Mesh m = build_structured_unit_square(3);
  const Mesh r = load_mesh(write_mesh(m));
  CHECK(r.num_elements() == m.num_elements());
  CHECK(r.num_faces() == m.num_faces());
  CHECK(r.h_global() == doctest::Approx(m.h_global()));
}

TEST_CASE("invalid mesh input") {
  CHECK_THROWS_AS(build_structured_unit_square(0), std::invalid_argument);
  CHECK_THROWS_AS(load_mesh("not a mesh"), ParseError);
}
