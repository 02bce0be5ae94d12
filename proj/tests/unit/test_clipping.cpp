#include <dgavg/clipping.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace dgavg;

namespace {

const Triangle kBig{Vec2{-10, -10}, Vec2{10, -10}, Vec2{0, 10}};
const Triangle kUnit{Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}};

}  // namespace

TEST_CASE("lens area") {
  CHECK(lens_area(1.0, 1.0) == doctest::Approx(2.0 * std::numbers::pi / 3.0 - std::sqrt(3.0) / 2.0));
  CHECK(lens_area(1.0, 1.0) == doctest::Approx(1.228370).epsilon(1e-6));
  CHECK(lens_area(1.0, 0.0) == doctest::Approx(std::numbers::pi));
  CHECK(lens_area(1.0, 2.0) == 0.0);
  CHECK(lens_area(1.0, 3.0) == 0.0);
}

TEST_CASE("convex polygon clipping") {
  const std::vector<Vec2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const std::vector<Vec2> clipped = clip_convex_polygon(square, kUnit);
  double area = 0.0;
  for (std::size_t i = 0; i < clipped.size(); ++i) area += 0.5 * cross(clipped[i], clipped[(i + 1) % clipped.size()]);
  CHECK(area == doctest::Approx(0.5));

  const std::vector<Vec2> far{{5, 5}, {6, 5}, {6, 6}};
  CHECK(clip_convex_polygon(far, kUnit).size() < 3);
}

TEST_CASE("ball clipped by a triangle") {
  const ClippedRegion inside = clip_ball_triangle({0, 0}, 1.0, kBig, 64);
  const double ngon = 0.5 * 64 * std::sin(2.0 * std::numbers::pi / 64);
  CHECK(inside.area() == doctest::Approx(ngon).epsilon(1e-12));
  CHECK(clip_ball_triangle({50, 50}, 1.0, kBig).empty());

  CHECK(disk_triangle_area({0, 0}, 1.0, kBig) == doctest::Approx(std::numbers::pi).epsilon(1e-12));
  // Quarter disc at the right-angle corner of the unit triangle.
  CHECK(disk_triangle_area({0, 0}, 0.5, kUnit) == doctest::Approx(std::numbers::pi / 16.0).epsilon(1e-12));
}

TEST_CASE("polynomial integration over a clipped region") {
  const ClippedRegion r = clip_ball_triangle({0.2, 0.2}, 0.1, kUnit, 128);
  const double mass = integrate_polynomial_over_region(r, 2, [](const Vec2&) { return 1.0; });
  CHECK(mass == doctest::Approx(r.area()).epsilon(1e-13));
  const double mx = integrate_polynomial_over_region(r, 2, [](const Vec2& x) { return x.x; });
  CHECK(mx / mass == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("disc quadrature on a cut triangle") {
  PointWeights pw;
  disk_triangle_rule({0.0, 0.0}, 0.5, kUnit, 6, pw);
  CHECK(pw.total_weight() == doctest::Approx(std::numbers::pi / 16.0).epsilon(1e-10));
  double mx = 0.0;
  for (std::size_t i = 0; i < pw.points.size(); ++i) mx += pw.weights[i] * pw.points[i].x;
  // Centroid of a quarter disc of radius r sits at 4r / (3 pi).
  CHECK(mx / pw.total_weight() == doctest::Approx(4.0 * 0.5 / (3.0 * std::numbers::pi)).epsilon(1e-10));

  const auto hit = segment_ball_intersection({-2, 0}, {2, 0}, {0, 0}, 1.0);
  REQUIRE(hit.has_value());
  CHECK(hit->first == doctest::Approx(0.25));
  CHECK(hit->second == doctest::Approx(0.75));
}
