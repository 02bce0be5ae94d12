#pragma once

// Implementation of polar_triangle_rule; included from clipping.hpp.

#include <algorithm>
#include <cmath>

namespace dgavg {

namespace detail {
void polar_breakpoints(const Vec2& center, double rmax, const Triangle& triangle,
                       std::vector<double>& out);
void append_arc_nodes(const Vec2& center, double radius, double theta0, double theta1, int degree,
                      double scale, PointWeights& out);
}  // namespace detail

template <class Weight>
void polar_triangle_rule(const Vec2& center, double rmax, const Triangle& triangle, int radial_points,
                         int angular_degree, Weight&& weight, PointWeights& out) {
  thread_local std::vector<double> cuts;
  thread_local std::vector<std::pair<double, double>> radial;
  detail::polar_breakpoints(center, rmax, triangle, cuts);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (!(b > a)) continue;
    graded_rule(a, b, radial_points, radial);
    for (const auto& [rho, wr] : radial) {
      if (rho <= 0.0) continue;
      const double w = wr * rho * weight(rho);
      if (w == 0.0) continue;
      for (const auto& [t0, t1] : circle_arcs_in_triangle(center, rho, triangle)) {
        detail::append_arc_nodes(center, rho, t0, t1, angular_degree, w, out);
      }
    }
  }
}

}  // namespace dgavg
