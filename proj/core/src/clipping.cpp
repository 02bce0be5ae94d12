#include <dgavg/clipping.hpp>

#include <algorithm>
#include <cmath>

namespace dgavg {

double ClippedRegion::area() const {
  double a = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    a += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
  }
  return 0.5 * a;
}

double PointWeights::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

std::vector<Vec2> clip_convex_polygon(std::span<const Vec2> subject, const Triangle& clip) {
  std::vector<Vec2> current(subject.begin(), subject.end());
  std::vector<Vec2> next;
  for (int e = 0; e < 3 && !current.empty(); ++e) {
    const Vec2 a = clip[e];
    const Vec2 b = clip[(e + 1) % 3];
    auto side = [&](const Vec2& p) { return orient2d(a, b, p); };
    next.clear();
    for (std::size_t i = 0; i < current.size(); ++i) {
      const Vec2& p = current[i];
      const Vec2& q = current[(i + 1) % current.size()];
      const double sp = side(p), sq = side(q);
      if (sp >= 0.0) next.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) {
        const double t = sp / (sp - sq);
        next.push_back(p + t * (q - p));
      }
    }
    current.swap(next);
  }
  if (current.size() < 3) current.clear();
  return current;
}

ClippedRegion clip_ball_triangle(const Vec2& center, double radius, const Triangle& triangle,
                                 int circle_segments) {
  ClippedRegion region;
  region.circle_segments = circle_segments;
  if (radius <= 0.0 || point_triangle_distance(center, triangle) >= radius) return region;
  std::vector<Vec2> ngon;
  ngon.reserve(circle_segments);
  for (int k = 0; k < circle_segments; ++k) {
    ngon.push_back(center + radius * unit_direction(2.0 * pi * k / circle_segments));
  }
  region.polygon = clip_convex_polygon(ngon, triangle);
  return region;
}

std::optional<std::pair<double, double>> segment_ball_intersection(const Vec2& a, const Vec2& b,
                                                                   const Vec2& center,
                                                                   double radius) {
  const Vec2 d = b - a;
  const Vec2 f = a - center;
  const double A = dot(d, d);
  if (A <= 0.0) return std::nullopt;
  const double B = dot(f, d);
  const double C = dot(f, f) - radius * radius;
  const double disc = B * B - A * C;
  if (disc < 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  const double t0 = std::max(0.0, (-B - sq) / A);
  const double t1 = std::min(1.0, (-B + sq) / A);
  if (t0 > t1) return std::nullopt;
  return std::pair{t0, t1};
}

double lens_area(double r, double d) {
  if (d >= 2.0 * r) return 0.0;
  if (d <= 0.0) return pi * r * r;
  return 2.0 * r * r * std::acos(d / (2.0 * r)) - 0.5 * d * std::sqrt(4.0 * r * r - d * d);
}

std::vector<std::pair<double, double>> circle_arcs_in_triangle(const Vec2& center, double radius,
                                                               const Triangle& triangle) {
  std::vector<std::pair<double, double>> arcs;
  if (radius <= 0.0) return arcs;
  double angles[12];
  int count = 0;
  for (int e = 0; e < 3; ++e) {
    const Vec2 a = triangle[e];
    const Vec2 d = triangle[(e + 1) % 3] - a;
    const Vec2 f = a - center;
    const double A = dot(d, d);
    const double B = dot(f, d);
    const double C = dot(f, f) - radius * radius;
    const double disc = B * B - A * C;
    if (disc < 0.0) continue;
    const double sq = std::sqrt(disc);
    for (double t : {(-B - sq) / A, (-B + sq) / A}) {
      if (t < 0.0 || t > 1.0) continue;
      const Vec2 p = f + t * d;
      double th = std::atan2(p.y, p.x);
      if (th < 0.0) th += 2.0 * pi;
      angles[count++] = th;
    }
  }
  auto inside = [&](double th) {
    return point_in_triangle(center + radius * unit_direction(th), triangle, 1e-14);
  };
  if (count == 0) {
    if (inside(0.0)) arcs.emplace_back(0.0, 2.0 * pi);
    return arcs;
  }
  std::sort(angles, angles + count);
  for (int i = 0; i < count; ++i) {
    const double t0 = angles[i];
    const double t1 = (i + 1 < count) ? angles[i + 1] : angles[0] + 2.0 * pi;
    if (t1 - t0 <= 1e-15) continue;
    if (!inside(0.5 * (t0 + t1))) continue;
    if (!arcs.empty() && std::abs(arcs.back().second - t0) <= 1e-15) {
      arcs.back().second = t1;
    } else {
      arcs.emplace_back(t0, t1);
    }
  }
  // merge wrap-around continuation
  if (arcs.size() >= 2 && std::abs(arcs.back().second - (arcs.front().first + 2.0 * pi)) <= 1e-15) {
    arcs.back().second = arcs.front().second + 2.0 * pi;
    arcs.erase(arcs.begin());
  }
  return arcs;
}

namespace {

void append_arc_gauss(const Vec2& center, double radius, double theta0, double theta1, int n,
                      double scale, PointWeights& out) {
  const double width = theta1 - theta0;
  const int pieces = std::max(1, static_cast<int>(std::ceil(width / (0.25 * pi))));
  const auto& gl = gauss_legendre(std::clamp(n, 1, 64));
  const double piece = width / pieces;
  for (int p = 0; p < pieces; ++p) {
    const double lo = theta0 + p * piece;
    for (std::size_t q = 0; q < gl.size(); ++q) {
      const double th = lo + gl.points[q].x * piece;
      out.add(center + radius * unit_direction(th), scale * gl.weights[q] * piece);
    }
  }
}

}  // namespace

namespace detail {

void append_arc_nodes(const Vec2& center, double radius, double theta0, double theta1, int degree,
                      double scale, PointWeights& out) {
  const double width = theta1 - theta0;
  if (width <= 0.0) return;
  if (degree <= 0) {
    const double mid = 0.5 * (theta0 + theta1);
    out.add(center + radius * unit_direction(mid), scale * width);
    return;
  }
  append_arc_gauss(center, radius, theta0, theta1, degree / 2 + 6, scale, out);
}

void polar_breakpoints(const Vec2& center, double rmax, const Triangle& triangle,
                       std::vector<double>& out) {
  out.clear();
  out.push_back(0.0);
  out.push_back(rmax);
  out.push_back(point_triangle_distance(center, triangle));
  for (int e = 0; e < 3; ++e) {
    const Vec2 a = triangle[e];
    const Vec2 b = triangle[(e + 1) % 3];
    out.push_back(distance(center, a));
    const Vec2 d = b - a;
    const double t = dot(center - a, d) / dot(d, d);
    if (t > 0.0 && t < 1.0) out.push_back(distance(center, a + t * d));
  }
  std::erase_if(out, [&](double r) { return r < 0.0 || r > rmax; });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [&](double x, double y) { return std::abs(x - y) <= 1e-15 * rmax; }),
            out.end());
}

}  // namespace detail

void circle_arc_rule(const Vec2& center, double radius, const Triangle& triangle, int points_per_piece,
                     PointWeights& out) {
  for (const auto& [t0, t1] : circle_arcs_in_triangle(center, radius, triangle)) {
    append_arc_gauss(center, radius, t0, t1, points_per_piece, radius, out);
  }
}

void disk_triangle_rule(const Vec2& center, double radius, const Triangle& triangle, int degree,
                        PointWeights& out) {
  if (radius <= 0.0 || point_triangle_distance(center, triangle) >= radius) return;
  const int n_tau = std::max(1, (degree + 3) / 2);
  const auto& tau_rule = gauss_legendre(n_tau);
  const int n_seg = std::max(1, (degree + 2) / 2);
  const auto& seg_rule = gauss_legendre(n_seg);

  auto push_radial = [&](const Vec2& y, double w) {
    for (std::size_t k = 0; k < tau_rule.size(); ++k) {
      const double tau = tau_rule.points[k].x;
      out.add(center + tau * (y - center), w * tau * tau_rule.weights[k]);
    }
  };

  for (int e = 0; e < 3; ++e) {
    const Vec2 a = triangle[e];
    const Vec2 b = triangle[(e + 1) % 3];
    const auto piece = segment_ball_intersection(a, b, center, radius);
    if (!piece) continue;
    const Vec2 d = b - a;
    const double len = norm(d);
    const Vec2 normal{d.y / len, -d.x / len};
    const double h = dot(normal, a - center);
    const double plen = (piece->second - piece->first) * len;
    if (plen <= 0.0 || h == 0.0) continue;
    for (std::size_t q = 0; q < seg_rule.size(); ++q) {
      const double t = piece->first + seg_rule.points[q].x * (piece->second - piece->first);
      push_radial(a + t * d, h * plen * seg_rule.weights[q]);
    }
  }

  thread_local PointWeights arc;
  arc.clear();
  for (const auto& [t0, t1] : circle_arcs_in_triangle(center, radius, triangle)) {
    detail::append_arc_nodes(center, radius, t0, t1, std::max(degree, 1), radius * radius, arc);
  }
  for (std::size_t i = 0; i < arc.points.size(); ++i) push_radial(arc.points[i], arc.weights[i]);
}

double disk_triangle_area(const Vec2& center, double radius, const Triangle& triangle) {
  if (radius <= 0.0 || point_triangle_distance(center, triangle) >= radius) return 0.0;
  double twice = 0.0;
  for (int e = 0; e < 3; ++e) {
    const Vec2 a = triangle[e];
    const Vec2 b = triangle[(e + 1) % 3];
    const auto piece = segment_ball_intersection(a, b, center, radius);
    if (!piece) continue;
    const Vec2 d = b - a;
    const double len = norm(d);
    const Vec2 normal{d.y / len, -d.x / len};
    twice += dot(normal, a - center) * (piece->second - piece->first) * len;
  }
  for (const auto& [t0, t1] : circle_arcs_in_triangle(center, radius, triangle)) {
    twice += radius * radius * (t1 - t0);
  }
  return 0.5 * twice;
}

}  // namespace dgavg
