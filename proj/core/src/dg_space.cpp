#include <dgavg/dg_space.hpp>
#include <dgavg/errors.hpp>
#include <dgavg/quadrature.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dgavg {

namespace {

// Monomials xi^a eta^b ordered by total degree, then by increasing b.
void monomials(int k, const Vec2& xi, std::span<double> out) {
  double px[kMaxElementDegree + 1], py[kMaxElementDegree + 1];
  px[0] = py[0] = 1.0;
  for (int i = 1; i <= k; ++i) {
    px[i] = px[i - 1] * xi.x;
    py[i] = py[i - 1] * xi.y;
  }
  int idx = 0;
  for (int d = 0; d <= k; ++d) {
    for (int b = 0; b <= d; ++b) out[idx++] = px[d - b] * py[b];
  }
}

void monomial_gradients(int k, const Vec2& xi, std::span<Vec2> out) {
  double px[kMaxElementDegree + 1], py[kMaxElementDegree + 1];
  px[0] = py[0] = 1.0;
  for (int i = 1; i <= k; ++i) {
    px[i] = px[i - 1] * xi.x;
    py[i] = py[i - 1] * xi.y;
  }
  int idx = 0;
  for (int d = 0; d <= k; ++d) {
    for (int b = 0; b <= d; ++b) {
      const int a = d - b;
      out[idx++] = {a > 0 ? a * px[a - 1] * py[b] : 0.0, b > 0 ? b * px[a] * py[b - 1] : 0.0};
    }
  }
}

// In-place Cholesky G = L L^T, then returns L^{-1} (row-major, lower).
std::vector<double> inverse_cholesky(std::vector<long double> g, int n) {
  for (int j = 0; j < n; ++j) {
    long double d = g[j * n + j];
    for (int p = 0; p < j; ++p) d -= g[j * n + p] * g[j * n + p];
    if (d <= 0.0L) throw std::runtime_error("basis Gram matrix is not positive definite");
    g[j * n + j] = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      long double v = g[i * n + j];
      for (int p = 0; p < j; ++p) v -= g[i * n + p] * g[j * n + p];
      g[i * n + j] = v / g[j * n + j];
    }
  }
  std::vector<double> inv(static_cast<std::size_t>(n) * n, 0.0);
  for (int c = 0; c < n; ++c) {
    std::vector<long double> col(n, 0.0L);
    for (int i = c; i < n; ++i) {
      long double v = (i == c) ? 1.0L : 0.0L;
      for (int p = c; p < i; ++p) v -= g[i * n + p] * col[p];
      col[i] = v / g[i * n + i];
      inv[i * n + c] = static_cast<double>(col[i]);
    }
  }
  return inv;
}

}  // namespace

BrokenSpace::BrokenSpace(const Mesh& mesh, int degree)
    : BrokenSpace(mesh, std::vector<int>(mesh.num_elements(), degree)) {}

BrokenSpace::BrokenSpace(const Mesh& mesh, std::vector<int> degrees)
    : mesh_(&mesh), degrees_(std::move(degrees)) {
  if (degrees_.size() != mesh.num_elements()) {
    throw std::invalid_argument("one degree per element required");
  }
  offsets_.resize(degrees_.size());
  centers_.resize(degrees_.size());
  scales_.resize(degrees_.size());
  transforms_.resize(degrees_.size());
  for (std::size_t e = 0; e < degrees_.size(); ++e) {
    const int k = degrees_[e];
    if (k < 0 || k > kMaxElementDegree) {
      throw std::invalid_argument("element degree must lie in [0, " +
                                  std::to_string(kMaxElementDegree) + "]");
    }
    offsets_[e] = total_dofs_;
    total_dofs_ += dofs_for_degree(k);
    max_degree_ = std::max(max_degree_, k);
    build_basis(static_cast<int>(e));
  }
}

int BrokenSpace::element_of(std::size_t dof) const {
  if (dof >= total_dofs_) throw std::out_of_range("dof index out of range");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), dof);
  return static_cast<int>(it - offsets_.begin()) - 1;
}

void BrokenSpace::build_basis(int e) {
  const Triangle t = mesh_->triangle(e);
  const int k = degrees_[e];
  const int n = dofs_for_degree(k);
  centers_[e] = triangle_centroid(t);
  scales_[e] = std::max({distance(t[0], t[1]), distance(t[1], t[2]), distance(t[2], t[0])});
  const QuadratureRule& rule = triangle_rule(2 * k);
  const double jac = 2.0 * triangle_area(t);

  std::vector<double> m(n);
  std::vector<long double> gram(static_cast<std::size_t>(n) * n, 0.0L);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec2 x = map_to_triangle(t, rule.points[q]);
    monomials(k, (1.0 / scales_[e]) * (x - centers_[e]), m);
    const long double w = static_cast<long double>(rule.weights[q]) * jac;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) gram[i * n + j] += w * m[i] * m[j];
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) gram[j * n + i] = gram[i * n + j];
  }
  std::vector<double> tr = inverse_cholesky(gram, n);

  // second pass against the computed basis removes residual non-orthogonality
  std::vector<long double> g2(static_cast<std::size_t>(n) * n, 0.0L);
  std::vector<double> b(n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec2 x = map_to_triangle(t, rule.points[q]);
    monomials(k, (1.0 / scales_[e]) * (x - centers_[e]), m);
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      for (int j = 0; j <= i; ++j) v += tr[i * n + j] * m[j];
      b[i] = v;
    }
    const long double w = static_cast<long double>(rule.weights[q]) * jac;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) g2[i * n + j] += w * b[i] * b[j];
    }
  }
  const std::vector<double> tr2 = inverse_cholesky(g2, n);
  std::vector<double> combined(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      long double v = 0.0L;
      for (int p = j; p <= i; ++p) v += static_cast<long double>(tr2[i * n + p]) * tr[p * n + j];
      combined[i * n + j] = static_cast<double>(v);
    }
  }
  transforms_[e] = std::move(combined);
}

void BrokenSpace::basis_values(int e, const Vec2& x, std::span<double> out) const {
  const int k = degrees_.at(e);
  const int n = dofs_for_degree(k);
  double m[kMaxLocalDofs];
  monomials(k, (1.0 / scales_[e]) * (x - centers_[e]), std::span<double>(m, n));
  const double* tr = transforms_[e].data();
  for (int i = 0; i < n; ++i) {
    double v = 0.0;
    for (int j = 0; j <= i; ++j) v += tr[i * n + j] * m[j];
    out[i] = v;
  }
}

void BrokenSpace::basis_gradients(int e, const Vec2& x, std::span<Vec2> out) const {
  const int k = degrees_.at(e);
  const int n = dofs_for_degree(k);
  Vec2 dm[kMaxLocalDofs];
  const double inv = 1.0 / scales_[e];
  monomial_gradients(k, inv * (x - centers_[e]), std::span<Vec2>(dm, n));
  const double* tr = transforms_[e].data();
  for (int i = 0; i < n; ++i) {
    Vec2 v;
    for (int j = 0; j <= i; ++j) v += tr[i * n + j] * dm[j];
    out[i] = inv * v;
  }
}

void BrokenSpace::basis_values_and_gradients(int e, const Vec2& x, std::span<double> values,
                                             std::span<Vec2> gradients) const {
  basis_values(e, x, values);
  basis_gradients(e, x, gradients);
}

DgFunction::DgFunction(const BrokenSpace& space)
    : space_(&space), coefficients_(space.total_dofs(), 0.0) {}

DgFunction::DgFunction(const BrokenSpace& space, std::vector<double> coefficients)
    : space_(&space), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != space.total_dofs()) {
    throw std::invalid_argument("coefficient length does not match the space");
  }
}

double DgFunction::eval(int element, const Vec2& x) const {
  if (element < 0 || static_cast<std::size_t>(element) >= space_->mesh().num_elements()) {
    throw std::out_of_range("element id out of range");
  }
  double phi[kMaxLocalDofs];
  const int n = space_->dofs_on(element);
  space_->basis_values(element, x, std::span<double>(phi, n));
  const double* c = coefficients_.data() + space_->offset(element);
  double v = 0.0;
  for (int i = 0; i < n; ++i) v += c[i] * phi[i];
  return v;
}

Vec2 DgFunction::grad_eval(int element, const Vec2& x) const {
  if (element < 0 || static_cast<std::size_t>(element) >= space_->mesh().num_elements()) {
    throw std::out_of_range("element id out of range");
  }
  Vec2 g[kMaxLocalDofs];
  const int n = space_->dofs_on(element);
  space_->basis_gradients(element, x, std::span<Vec2>(g, n));
  const double* c = coefficients_.data() + space_->offset(element);
  Vec2 v;
  for (int i = 0; i < n; ++i) v += c[i] * g[i];
  return v;
}

TracePair DgFunction::trace_pair(int face, const Vec2& x) const {
  const Face& f = space_->mesh().faces().at(face);
  const auto& verts = space_->mesh().vertices();
  const Vec2 a = verts[f.vertices[0]], b = verts[f.vertices[1]];
  if (point_segment_distance(x, a, b) > 1e-12 * std::max(1.0, f.diameter)) {
    throw std::invalid_argument("point does not lie on face " + std::to_string(face));
  }
  TracePair t;
  t.v_plus = eval(f.plus_element, x);
  t.grad_plus = grad_eval(f.plus_element, x);
  if (!f.is_boundary()) {
    t.has_minus = true;
    t.v_minus = eval(f.minus_element, x);
    t.grad_minus = grad_eval(f.minus_element, x);
  }
  return t;
}

Vec2 DgFunction::jump(int face, const Vec2& x) const {
  const TracePair t = trace_pair(face, x);
  const Vec2 nu = space_->mesh().faces()[face].unit_normal;
  return t.has_minus ? (t.v_plus - t.v_minus) * nu : t.v_plus * nu;
}

Vec2 DgFunction::average_grad(int face, const Vec2& x) const {
  const TracePair t = trace_pair(face, x);
  return t.has_minus ? 0.5 * (t.grad_plus + t.grad_minus) : t.grad_plus;
}

double DgFunction::average(int face, const Vec2& x) const {
  const TracePair t = trace_pair(face, x);
  return t.has_minus ? 0.5 * (t.v_plus + t.v_minus) : t.v_plus;
}

DgFunction project(const ScalarField& field, const BrokenSpace& space) {
  DgFunction fn(space);
  const Mesh& mesh = space.mesh();
  double phi[kMaxLocalDofs];
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const int ei = static_cast<int>(e);
    const int n = space.dofs_on(ei);
    const Triangle t = mesh.triangle(ei);
    const QuadratureRule& rule = triangle_rule(std::min(kMaxRuleDegree, 2 * space.degree(ei) + 8));
    const double jac = 2.0 * triangle_area(t);
    double* c = fn.coefficients().data() + space.offset(ei);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 x = map_to_triangle(t, rule.points[q]);
      space.basis_values(ei, x, std::span<double>(phi, n));
      const double w = rule.weights[q] * jac * field(x);
      for (int i = 0; i < n; ++i) c[i] += w * phi[i];
    }
  }
  return fn;
}

DgFunction random_function(const BrokenSpace& space, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DgFunction fn(space);
  for (double& c : fn.coefficients()) c = dist(rng);
  return fn;
}

std::string write_dg_csv(const DgFunction& fn, std::string_view provenance) {
  const BrokenSpace& space = fn.space();
  std::ostringstream os;
  os.precision(17);
  os << "# elements=" << space.mesh().num_elements() << " max_degree=" << space.max_degree()
     << " total_dofs=" << space.total_dofs() << " provenance=" << provenance << '\n';
  os << "dof,element,coefficient\n";
  for (std::size_t i = 0; i < space.total_dofs(); ++i) {
    os << i << ',' << space.element_of(i) << ',' << fn.coefficients()[i] << '\n';
  }
  return os.str();
}

DgFunction read_dg_csv(std::string_view text, const BrokenSpace& space) {
  std::vector<double> coeffs;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#' || line.starts_with("dof,")) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) throw ParseError("expected dof,element,coefficient", line_no);
    std::size_t dof = 0;
    double value = 0.0;
    const auto r1 = std::from_chars(line.data(), line.data() + c1, dof);
    const auto r2 = std::from_chars(line.data() + c2 + 1, line.data() + line.size(), value);
    if (r1.ec != std::errc{} || r2.ec != std::errc{}) throw ParseError("malformed number", line_no);
    if (dof != coeffs.size()) throw ParseError("dof indices must be consecutive", line_no);
    coeffs.push_back(value);
  }
  if (coeffs.size() != space.total_dofs()) {
    throw ParseError("expected " + std::to_string(space.total_dofs()) + " coefficients, found " +
                         std::to_string(coeffs.size()),
                     line_no);
  }
  return DgFunction(space, std::move(coeffs));
}

}  // namespace dgavg
