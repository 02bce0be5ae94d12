#include <dgavg/clipping.hpp>
#include <dgavg/mollifier.hpp>
#include <dgavg/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dgavg {

Mollifier::Mollifier(double h, double s, MollifierOptions options)
    : h_(h), s_(s), options_(options) {
  if (!(h > 0.0)) throw std::invalid_argument("mollifier: h must be positive");
  if (!(s > 1.0)) throw std::invalid_argument("mollifier: s must exceed 1");
  if (options_.n_circ < 3) throw std::invalid_argument("mollifier: n_circ must be at least 3");
  if (options_.radial_points < 1) throw std::invalid_argument("mollifier: radial_points must be positive");
  radius_ = std::pow(h, s);
  ball_measure_ = pi * radius_ * radius_;
}

double Mollifier::kernel(const Vec2& z) const noexcept {
  return dot(z, z) <= radius_ * radius_ ? 1.0 / ball_measure_ : 0.0;
}

double Mollifier::eta2_radial(double r) const noexcept {
  return lens_area(radius_, r) / (ball_measure_ * ball_measure_);
}

double Mollifier::eta2_value(const Vec2& z) const noexcept { return eta2_radial(norm(z)); }

namespace {

struct BoundaryNodes {
  std::vector<Vec2> points;
  std::vector<double> weights;
  std::vector<Vec2> normals;

  void clear() { points.clear(); weights.clear(); normals.clear(); }
};

// Volume rule for B(x, R) ∩ T exact for polynomials of the given degree.
void ball_rule(const Mollifier& m, const Vec2& x, const Triangle& tri, int degree,
               PointWeights& out) {
  out.clear();
  if (m.options().mode == BallMode::exact) {
    disk_triangle_rule(x, m.radius(), tri, degree, out);
    return;
  }
  const ClippedRegion region = clip_ball_triangle(x, m.radius(), tri, m.options().n_circ);
  if (region.empty()) return;
  const QuadratureRule& rule = triangle_rule(std::max(degree, 0));
  const Vec2 anchor = region.polygon.front();
  for (std::size_t i = 1; i + 1 < region.polygon.size(); ++i) {
    const Triangle t{anchor, region.polygon[i], region.polygon[i + 1]};
    const double jac = 2.0 * triangle_area(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      out.add(map_to_triangle(t, rule.points[q]), rule.weights[q] * jac);
    }
  }
}

// Parametric range of the segment a + t (b - a), t in [0, 1], inside tri.
bool clip_segment_to_triangle(const Vec2& a, const Vec2& b, const Triangle& tri, double& t0,
                              double& t1) {
  t0 = 0.0;
  t1 = 1.0;
  for (int e = 0; e < 3; ++e) {
    const Vec2 p = tri[e], q = tri[(e + 1) % 3];
    const double fa = orient2d(p, q, a);
    const double fb = orient2d(p, q, b);
    if (fa < 0.0 && fb < 0.0) return false;
    if (fa < 0.0) t0 = std::max(t0, fa / (fa - fb));
    if (fb < 0.0) t1 = std::min(t1, fa / (fa - fb));
  }
  return t1 > t0;
}

// Rule on ∂B(x, R) ∩ T with outward ball normals, exact on the arcs for
// trigonometric polynomials of the given degree.
void sphere_rule(const Mollifier& m, const Vec2& x, const Triangle& tri, int degree,
                 BoundaryNodes& out) {
  out.clear();
  const double r = m.radius();
  if (m.options().mode == BallMode::exact) {
    thread_local PointWeights arc;
    arc.clear();
    circle_arc_rule(x, r, tri, degree / 2 + 6, arc);
    for (std::size_t i = 0; i < arc.points.size(); ++i) {
      out.points.push_back(arc.points[i]);
      out.weights.push_back(arc.weights[i]);
      out.normals.push_back((1.0 / r) * (arc.points[i] - x));
    }
    return;
  }
  const int n = m.options().n_circ;
  const QuadratureRule& gl = gauss_legendre(std::max(1, degree / 2 + 1));
  for (int k = 0; k < n; ++k) {
    const Vec2 a = x + r * unit_direction(2.0 * pi * k / n);
    const Vec2 b = x + r * unit_direction(2.0 * pi * (k + 1) / n);
    double t0 = 0.0, t1 = 0.0;
    if (!clip_segment_to_triangle(a, b, tri, t0, t1)) continue;
    const Vec2 d = b - a;
    const double len = norm(d);
    const Vec2 normal{d.y / len, -d.x / len};
    for (std::size_t q = 0; q < gl.size(); ++q) {
      const double t = t0 + gl.points[q].x * (t1 - t0);
      out.points.push_back(a + t * d);
      out.weights.push_back(gl.weights[q] * (t1 - t0) * len);
      out.normals.push_back(normal);
    }
  }
}

}  // namespace

void average_basis_at(const Mollifier& m, const BrokenSpace& space, const Vec2& x,
                      DofScalars& out) {
  out.clear();
  thread_local std::vector<int> elements;
  thread_local PointWeights rule;
  space.mesh().elements_near(x, m.radius(), elements);
  double phi[kMaxLocalDofs];
  for (int e : elements) {
    const int n = space.dofs_on(e);
    ball_rule(m, x, space.mesh().triangle(e), space.degree(e), rule);
    if (rule.points.empty()) continue;
    double acc[kMaxLocalDofs] = {};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      space.basis_values(e, rule.points[q], std::span<double>(phi, n));
      for (int i = 0; i < n; ++i) acc[i] += rule.weights[q] * phi[i];
    }
    for (int i = 0; i < n; ++i) out.add(space.offset(e) + i, acc[i] / m.ball_measure());
  }
}

void grad_average_basis_at(const Mollifier& m, const BrokenSpace& space, const Vec2& x,
                           DofVectors& out) {
  out.clear();
  thread_local std::vector<int> elements;
  thread_local BoundaryNodes nodes;
  space.mesh().elements_near(x, m.radius(), elements);
  double phi[kMaxLocalDofs];
  for (int e : elements) {
    const int n = space.dofs_on(e);
    sphere_rule(m, x, space.mesh().triangle(e), space.degree(e), nodes);
    if (nodes.points.empty()) continue;
    Vec2 acc[kMaxLocalDofs] = {};
    for (std::size_t q = 0; q < nodes.points.size(); ++q) {
      space.basis_values(e, nodes.points[q], std::span<double>(phi, n));
      const Vec2 wn = nodes.weights[q] * nodes.normals[q];
      for (int i = 0; i < n; ++i) acc[i] += phi[i] * wn;
    }
    for (int i = 0; i < n; ++i) out.add(space.offset(e) + i, (1.0 / m.ball_measure()) * acc[i]);
  }
}

void convolved_broken_grad_basis_at(const Mollifier& m, const BrokenSpace& space, const Vec2& x,
                                    DofVectors& out) {
  out.clear();
  thread_local std::vector<int> elements;
  thread_local PointWeights rule;
  space.mesh().elements_near(x, m.radius(), elements);
  Vec2 grad[kMaxLocalDofs];
  for (int e : elements) {
    const int k = space.degree(e);
    if (k == 0) continue;
    const int n = space.dofs_on(e);
    ball_rule(m, x, space.mesh().triangle(e), k - 1, rule);
    if (rule.points.empty()) continue;
    Vec2 acc[kMaxLocalDofs] = {};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      space.basis_gradients(e, rule.points[q], std::span<Vec2>(grad, n));
      for (int i = 0; i < n; ++i) acc[i] += rule.weights[q] * grad[i];
    }
    for (int i = 0; i < n; ++i) out.add(space.offset(e) + i, (1.0 / m.ball_measure()) * acc[i]);
  }
}

void double_convolved_grad_basis_at(const Mollifier& m, const BrokenSpace& space, const Vec2& x,
                                    DofVectors& out) {
  out.clear();
  thread_local std::vector<int> elements;
  thread_local PointWeights rule;
  const double reach = 2.0 * m.radius();
  space.mesh().elements_near(x, reach, elements);
  Vec2 grad[kMaxLocalDofs];
  auto weight = [&m](double r) { return m.eta2_radial(r); };
  for (int e : elements) {
    const int k = space.degree(e);
    if (k == 0) continue;
    const int n = space.dofs_on(e);
    rule.clear();
    polar_triangle_rule(x, reach, space.mesh().triangle(e), m.options().radial_points, k - 1, weight,
                        rule);
    if (rule.points.empty()) continue;
    Vec2 acc[kMaxLocalDofs] = {};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      space.basis_gradients(e, rule.points[q], std::span<Vec2>(grad, n));
      for (int i = 0; i < n; ++i) acc[i] += rule.weights[q] * grad[i];
    }
    for (int i = 0; i < n; ++i) out.add(space.offset(e) + i, acc[i]);
  }
}

void face_convolution_basis_at(const Mollifier& m, const BrokenSpace& space, int face,
                               const Vec2& x, DofVectors& out) {
  out.clear();
  const Mesh& mesh = space.mesh();
  const Face& f = mesh.faces().at(face);
  const Vec2 a = mesh.vertices()[f.vertices[0]];
  const Vec2 b = mesh.vertices()[f.vertices[1]];
  const auto piece = segment_ball_intersection(a, b, x, m.radius());
  if (!piece || piece->second <= piece->first) return;
  const double len = (piece->second - piece->first) * f.diameter;
  double phi[kMaxLocalDofs];
  auto side = [&](int e, const Vec2& normal) {
    const int n = space.dofs_on(e);
    const QuadratureRule& rule = segment_rule(space.degree(e));
    double acc[kMaxLocalDofs] = {};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double t = piece->first + rule.points[q].x * (piece->second - piece->first);
      space.basis_values(e, a + t * (b - a), std::span<double>(phi, n));
      for (int i = 0; i < n; ++i) acc[i] += rule.weights[q] * phi[i];
    }
    const double scale = len / m.ball_measure();
    for (int i = 0; i < n; ++i) out.add(space.offset(e) + i, (scale * acc[i]) * normal);
  };
  side(f.plus_element, f.unit_normal);
  if (!f.is_boundary()) side(f.minus_element, -f.unit_normal);
}

double average_at(const Mollifier& m, const DgFunction& fn, const Vec2& x) {
  thread_local DofScalars v;
  average_basis_at(m, fn.space(), x, v);
  return contract(v, fn.coefficients());
}

Vec2 grad_average_at(const Mollifier& m, const DgFunction& fn, const Vec2& x) {
  thread_local DofVectors v;
  grad_average_basis_at(m, fn.space(), x, v);
  return contract(v, fn.coefficients());
}

Vec2 convolved_broken_grad_at(const Mollifier& m, const DgFunction& fn, const Vec2& x) {
  thread_local DofVectors v;
  convolved_broken_grad_basis_at(m, fn.space(), x, v);
  return contract(v, fn.coefficients());
}

Vec2 double_convolved_grad_at(const Mollifier& m, const DgFunction& fn, const Vec2& x) {
  thread_local DofVectors v;
  double_convolved_grad_basis_at(m, fn.space(), x, v);
  return contract(v, fn.coefficients());
}

Vec2 face_convolution_at(const Mollifier& m, const DgFunction& fn, int face, const Vec2& x) {
  thread_local DofVectors v;
  face_convolution_basis_at(m, fn.space(), face, x, v);
  return contract(v, fn.coefficients());
}

double average_field_at(const Mollifier& m, const Mesh& mesh, const ScalarField& g, const Vec2& x,
                        int degree) {
  thread_local std::vector<int> elements;
  thread_local PointWeights rule;
  mesh.elements_near(x, m.radius(), elements);
  double sum = 0.0;
  for (int e : elements) {
    ball_rule(m, x, mesh.triangle(e), degree, rule);
    for (std::size_t q = 0; q < rule.points.size(); ++q) sum += rule.weights[q] * g(rule.points[q]);
  }
  return sum / m.ball_measure();
}

}  // namespace dgavg
