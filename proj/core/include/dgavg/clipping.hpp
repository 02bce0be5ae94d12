#pragma once

#include <dgavg/geometry.hpp>
#include <dgavg/quadrature.hpp>

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace dgavg {

inline constexpr int kDefaultCircleSegments = 64;

/// Polygonal approximation of B(center, radius) ∩ T obtained by clipping the
/// regular N-gon inscribed in the circle against the triangle's half-planes.
struct ClippedRegion {
  std::vector<Vec2> polygon;  // counterclockwise, empty when disjoint
  int circle_segments = kDefaultCircleSegments;

  bool empty() const noexcept { return polygon.size() < 3; }
  double area() const;
};

/// Sutherland-Hodgman clip of a convex counterclockwise polygon by a
/// counterclockwise triangle.
std::vector<Vec2> clip_convex_polygon(std::span<const Vec2> subject, const Triangle& clip);

ClippedRegion clip_ball_triangle(const Vec2& center, double radius, const Triangle& triangle,
                                 int circle_segments = kDefaultCircleSegments);

/// Integral of `poly` over the clipped polygon by fan triangulation and a
/// triangle rule of the given exactness degree.
template <class Fn>
double integrate_polynomial_over_region(const ClippedRegion& region, int degree, Fn&& poly) {
  if (region.empty()) return 0.0;
  const QuadratureRule& rule = triangle_rule(degree);
  double sum = 0.0;
  const Vec2 anchor = region.polygon.front();
  for (std::size_t i = 1; i + 1 < region.polygon.size(); ++i) {
    const Triangle t{anchor, region.polygon[i], region.polygon[i + 1]};
    const double jac = 2.0 * triangle_area(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      sum += rule.weights[q] * jac * poly(map_to_triangle(t, rule.points[q]));
    }
  }
  return sum;
}

/// Parametric sub-interval [t0, t1] ⊂ [0, 1] of the segment a + t (b - a)
/// that lies inside the closed ball; nullopt when the segment misses it.
std::optional<std::pair<double, double>> segment_ball_intersection(const Vec2& a, const Vec2& b,
                                                                   const Vec2& center,
                                                                   double radius);

/// Area of B(0, r) ∩ B(z, r) with |z| = d.
double lens_area(double r, double d);

/// Angular intervals [theta0, theta1] (theta0 < theta1, total length <= 2 pi)
/// of the circle |y - center| = radius lying inside the triangle.
std::vector<std::pair<double, double>> circle_arcs_in_triangle(const Vec2& center, double radius,
                                                               const Triangle& triangle);

/// A weighted point set: sum_k w_k p(y_k) approximates an integral of p.
struct PointWeights {
  std::vector<Vec2> points;
  std::vector<double> weights;

  void clear() { points.clear(); weights.clear(); }
  void add(const Vec2& p, double w) { points.push_back(p); weights.push_back(w); }
  double total_weight() const;
};

/// Arc-length rule on the part of the circle |y - center| = radius inside
/// the triangle. Arcs are split into pieces no wider than pi/4, each with
/// `points_per_piece` Gauss nodes.
void circle_arc_rule(const Vec2& center, double radius, const Triangle& triangle, int points_per_piece,
                     PointWeights& out);

/// Rule exact (to rounding, with spectrally accurate arcs) for polynomials of
/// total degree <= degree over B(center, radius) ∩ T. Built from the
/// divergence theorem with the radial field (y - c) q(y),
/// q(y) = ∫_0^1 τ p(c + τ (y - c)) dτ, so the disk boundary is treated
/// exactly rather than by a polygon. Weights may be negative.
void disk_triangle_rule(const Vec2& center, double radius, const Triangle& triangle, int degree,
                        PointWeights& out);

/// Area of B(center, radius) ∩ T in closed form (straight edges plus arcs).
double disk_triangle_area(const Vec2& center, double radius, const Triangle& triangle);

/// Polar rule about `center` for integrals of the form
///   ∫_{T ∩ B(center, rmax)} w(|y - center|) f(y) dy
/// with the radial weight folded into the returned weights. The radial range
/// is split at every distance where the circle topology changes (vertices,
/// edge-line feet, rmax) and each piece uses a cosine-graded Gauss rule, so
/// square-root endpoint behaviour is integrated accurately. `angular_degree`
/// is the polynomial degree of f in y; 0 gives one node per arc.
template <class Weight>
void polar_triangle_rule(const Vec2& center, double rmax, const Triangle& triangle, int radial_points,
                         int angular_degree, Weight&& weight, PointWeights& out);

}  // namespace dgavg

#include <dgavg/detail/polar_rule.hpp>
