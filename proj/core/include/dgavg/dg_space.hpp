#pragma once

#include <dgavg/geometry.hpp>
#include <dgavg/mesh.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dgavg {

inline constexpr int kMaxElementDegree = 6;
inline constexpr int kMaxLocalDofs = (kMaxElementDegree + 1) * (kMaxElementDegree + 2) / 2;

constexpr int dofs_for_degree(int k) { return (k + 1) * (k + 2) / 2; }

/// Broken polynomial space over a mesh: on each element the polynomials of
/// total degree <= k_e, spanned by an L2-orthonormal basis obtained from
/// scaled monomials by Gram-Schmidt. The mesh must outlive the space.
class BrokenSpace {
 public:
  BrokenSpace(const Mesh& mesh, int degree);
  BrokenSpace(const Mesh& mesh, std::vector<int> degrees);

  const Mesh& mesh() const noexcept { return *mesh_; }
  int degree(int e) const { return degrees_.at(e); }
  int max_degree() const noexcept { return max_degree_; }
  int dofs_on(int e) const { return dofs_for_degree(degrees_.at(e)); }
  std::size_t offset(int e) const { return offsets_.at(e); }
  std::size_t total_dofs() const noexcept { return total_dofs_; }
  /// Element owning a global dof.
  int element_of(std::size_t dof) const;

  /// Values of the element's basis functions at x (x need not lie in the
  /// element; the polynomial is evaluated as is). `out` has dofs_on(e) slots.
  void basis_values(int e, const Vec2& x, std::span<double> out) const;
  void basis_gradients(int e, const Vec2& x, std::span<Vec2> out) const;
  void basis_values_and_gradients(int e, const Vec2& x, std::span<double> values,
                                  std::span<Vec2> gradients) const;

 private:
  void build_basis(int e);

  const Mesh* mesh_;
  std::vector<int> degrees_;
  std::vector<std::size_t> offsets_;
  std::size_t total_dofs_ = 0;
  int max_degree_ = 0;
  std::vector<Vec2> centers_;
  std::vector<double> scales_;
  // row i: monomial coefficients of basis function i (lower triangular)
  std::vector<std::vector<double>> transforms_;
};

/// One-sided traces on a face. On boundary faces the minus side is absent.
struct TracePair {
  double v_plus = 0.0;
  double v_minus = 0.0;
  Vec2 grad_plus;
  Vec2 grad_minus;
  bool has_minus = false;
};

using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

/// Coefficient vector over a BrokenSpace. The space must outlive it.
class DgFunction {
 public:
  explicit DgFunction(const BrokenSpace& space);
  DgFunction(const BrokenSpace& space, std::vector<double> coefficients);

  const BrokenSpace& space() const noexcept { return *space_; }
  std::vector<double>& coefficients() noexcept { return coefficients_; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }

  /// Element-local polynomial value and gradient; throws std::out_of_range
  /// for a bad element id.
  double eval(int element, const Vec2& x) const;
  Vec2 grad_eval(int element, const Vec2& x) const;

  /// Throws std::invalid_argument if x is not on the face segment.
  TracePair trace_pair(int face, const Vec2& x) const;
  /// nu_+ v_+ + nu_- v_- (interior); nu v (boundary).
  Vec2 jump(int face, const Vec2& x) const;
  /// (grad v_+ + grad v_-) / 2 (interior); grad v_+ (boundary).
  Vec2 average_grad(int face, const Vec2& x) const;
  /// (v_+ + v_-) / 2 (interior); v_+ (boundary).
  double average(int face, const Vec2& x) const;

 private:
  const BrokenSpace* space_;
  std::vector<double> coefficients_;
};

/// Element-wise L2 projection; exact for polynomials of degree <= k_e.
DgFunction project(const ScalarField& field, const BrokenSpace& space);

/// Coefficients uniform in [-1, 1] from a seeded 64-bit Mersenne twister.
DgFunction random_function(const BrokenSpace& space, std::uint64_t seed);

/// CSV with a `#` header naming the space parameters and provenance, then
/// `dof,element,coefficient` rows.
std::string write_dg_csv(const DgFunction& fn, std::string_view provenance);
/// Throws ParseError on malformed input or a dof count that does not match.
DgFunction read_dg_csv(std::string_view text, const BrokenSpace& space);

}  // namespace dgavg
