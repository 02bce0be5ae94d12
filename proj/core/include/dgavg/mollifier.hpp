#pragma once

#include <dgavg/dg_space.hpp>
#include <dgavg/geometry.hpp>

#include <cstddef>
#include <vector>

namespace dgavg {

enum class BallMode {
  exact,      // straight edges plus true circular arcs
  polygonal,  // ball replaced by the inscribed regular n_circ-gon
};

struct MollifierOptions {
  BallMode mode = BallMode::exact;
  int n_circ = 64;
  int radial_points = 24;  // per radial piece of the eta*eta polar rule
};

/// eta_h = 1 / |B(0, h^s)| on B(0, h^s), zero outside.
class Mollifier {
 public:
  /// Throws std::invalid_argument unless h > 0 and s > 1.
  Mollifier(double h, double s, MollifierOptions options = {});

  double h() const noexcept { return h_; }
  double s() const noexcept { return s_; }
  double radius() const noexcept { return radius_; }
  double ball_measure() const noexcept { return ball_measure_; }
  const MollifierOptions& options() const noexcept { return options_; }

  double kernel(const Vec2& z) const noexcept;
  /// (eta_h * eta_h)(z) = lens_area(h^s, |z|) / |B|^2.
  double eta2_value(const Vec2& z) const noexcept;
  double eta2_radial(double r) const noexcept;

 private:
  double h_;
  double s_;
  double radius_;
  double ball_measure_;
  MollifierOptions options_;
};

/// Sparse per-dof values: entry i belongs to global dof dofs[i].
template <class T>
struct DofValues {
  std::vector<std::size_t> dofs;
  std::vector<T> values;

  void clear() { dofs.clear(); values.clear(); }
  void add(std::size_t dof, const T& v) { dofs.push_back(dof); values.push_back(v); }
};
using DofScalars = DofValues<double>;
using DofVectors = DofValues<Vec2>;

// Per-basis-function forms of the mollifier operators. Each writes, for every
// basis function phi_i whose value at x can be nonzero, the operator applied
// to phi_i (zero-extended outside the mesh).

/// (eta_h * phi_i)(x)
void average_basis_at(const Mollifier& m, const BrokenSpace& space, const Vec2& x, DofScalars& out);
/// grad (eta_h * phi_i)(x), from the boundary integral over the sphere.
void grad_average_basis_at(const Mollifier& m, const BrokenSpace& space, const Vec2& x,
                           DofVectors& out);
/// (eta_h * grad_h phi_i)(x)
void convolved_broken_grad_basis_at(const Mollifier& m, const BrokenSpace& space, const Vec2& x,
                                    DofVectors& out);
/// (eta_h * eta_h * grad_h phi_i)(x)
void double_convolved_grad_basis_at(const Mollifier& m, const BrokenSpace& space, const Vec2& x,
                                    DofVectors& out);
/// (eta_h * [[phi_i]]_f)(x) = ∫_f eta_h(x - y) [[phi_i]](y) dy
void face_convolution_basis_at(const Mollifier& m, const BrokenSpace& space, int face,
                               const Vec2& x, DofVectors& out);

// Function-level forms.
double average_at(const Mollifier& m, const DgFunction& fn, const Vec2& x);
Vec2 grad_average_at(const Mollifier& m, const DgFunction& fn, const Vec2& x);
Vec2 convolved_broken_grad_at(const Mollifier& m, const DgFunction& fn, const Vec2& x);
Vec2 double_convolved_grad_at(const Mollifier& m, const DgFunction& fn, const Vec2& x);
Vec2 face_convolution_at(const Mollifier& m, const DgFunction& fn, int face, const Vec2& x);

/// (eta_h * g_0)(x) for a field g zero-extended outside the mesh, by
/// disk-triangle quadrature of the given polynomial degree.
double average_field_at(const Mollifier& m, const Mesh& mesh, const ScalarField& g, const Vec2& x,
                        int degree = 12);

template <class T>
T contract(const DofValues<T>& v, const std::vector<double>& coefficients) {
  T sum{};
  for (std::size_t i = 0; i < v.dofs.size(); ++i) sum += coefficients[v.dofs[i]] * v.values[i];
  return sum;
}

}  // namespace dgavg
