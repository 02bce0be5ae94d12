#pragma once

#include <dgavg/geometry.hpp>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dgavg {

/// Points and positive weights on a reference domain: the triangle
/// {x, y >= 0, x + y <= 1} (weights sum to 1/2) or the segment [0, 1]
/// (weights sum to 1, points stored in `x`).
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int exactness_degree = 0;

  std::size_t size() const noexcept { return weights.size(); }
};

inline constexpr int kMaxRuleDegree = 20;

/// Gauss-Legendre nodes and weights on [0, 1]; n in [1, 64]. Cached.
const QuadratureRule& gauss_legendre(int n);

/// Rule exact for polynomials of total degree <= degree. Throws
/// std::invalid_argument for degree outside [0, kMaxRuleDegree].
const QuadratureRule& triangle_rule(int degree);
const QuadratureRule& segment_rule(int degree);

/// Affine image of a reference-triangle point.
inline Vec2 map_to_triangle(const Triangle& t, const Vec2& ref) {
  return t[0] + ref.x * (t[1] - t[0]) + ref.y * (t[2] - t[0]);
}

struct AdaptiveOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_cells = 200000;
};

struct AdaptiveResult {
  std::vector<double> value;
  double error_estimate = 0.0;
  long evaluations = 0;
  bool converged = false;
};

/// Vector-valued integrand: writes `out.size()` components at a point.
using Integrand1D = std::function<void(double, std::span<double>)>;
using Integrand2D = std::function<void(const Vec2&, std::span<double>)>;

/// Globally adaptive Gauss-Kronrod (7/15) over [a, b], split first at the
/// given interior breakpoints. Error is measured in the max norm.
AdaptiveResult integrate_adaptive_1d(const Integrand1D& f, std::size_t dim, double a, double b,
                                     const AdaptiveOptions& opts,
                                     std::span<const double> breakpoints = {});

/// Globally adaptive integration over a union of triangles. Each cell's
/// error is the discrepancy between its rule value and the sum over its four
/// midpoint children; cells with the largest discrepancy are refined first.
AdaptiveResult integrate_adaptive_triangles(const Integrand2D& f, std::size_t dim,
                                            std::span<const Triangle> seeds,
                                            const AdaptiveOptions& opts, int rule_degree = 6);

/// Cosine-graded Gauss rule on [a, b]: smooths inverse-square-root type
/// endpoint behaviour (x = a + (b - a) sin^2(pi t / 2)). Returns (node, weight).
void graded_rule(double a, double b, int n, std::vector<std::pair<double, double>>& out);

}  // namespace dgavg
