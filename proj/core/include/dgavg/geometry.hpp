#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace dgavg {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }
inline Vec2 unit_direction(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Twice the signed area of (a, b, c); positive for counterclockwise order.
constexpr double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  return cross(b - a, c - a);
}

using Triangle = std::array<Vec2, 3>;

inline double triangle_area(const Triangle& t) { return 0.5 * orient2d(t[0], t[1], t[2]); }

inline Vec2 triangle_centroid(const Triangle& t) {
  return (t[0] + t[1] + t[2]) * (1.0 / 3.0);
}

/// Euclidean distance from p to the closed segment [a, b].
inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  double t = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
  t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
  return distance(p, a + t * d);
}

inline bool point_in_triangle(const Vec2& p, const Triangle& t, double tol = 1e-12) {
  const double scale = std::abs(orient2d(t[0], t[1], t[2]));
  const double e = -tol * scale;
  return orient2d(t[0], t[1], p) >= e && orient2d(t[1], t[2], p) >= e &&
         orient2d(t[2], t[0], p) >= e;
}

inline double point_triangle_distance(const Vec2& p, const Triangle& t) {
  if (point_in_triangle(p, t, 0.0)) return 0.0;
  double d = point_segment_distance(p, t[0], t[1]);
  d = std::min(d, point_segment_distance(p, t[1], t[2]));
  return std::min(d, point_segment_distance(p, t[2], t[0]));
}

constexpr double pi = 3.14159265358979323846;

}  // namespace dgavg
