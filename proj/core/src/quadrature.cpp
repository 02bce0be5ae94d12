#include <dgavg/quadrature.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace dgavg {

namespace {

QuadratureRule compute_gauss_legendre(int n) {
  QuadratureRule rule;
  rule.exactness_degree = 2 * n - 1;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[n - 1 - i] = {0.5 * (x + 1.0), 0.0};
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

struct RuleTables {
  std::vector<QuadratureRule> gl;
  std::vector<QuadratureRule> tri;
  std::vector<QuadratureRule> seg;

  RuleTables() {
    gl.resize(65);
    for (int n = 1; n <= 64; ++n) gl[n] = compute_gauss_legendre(n);
    for (int deg = 0; deg <= kMaxRuleDegree; ++deg) {
      const int nseg = std::max(1, (deg + 2) / 2);
      QuadratureRule s = gl[nseg];
      s.exactness_degree = deg;
      seg.push_back(s);

      // collapsed (Duffy) product rule: x = u, y = (1 - u) v, Jacobian 1 - u
      const int nu = std::max(1, (deg + 3) / 2);
      const int nv = std::max(1, (deg + 2) / 2);
      QuadratureRule t;
      t.exactness_degree = deg;
      for (int i = 0; i < nu; ++i) {
        const double u = gl[nu].points[i].x;
        for (int j = 0; j < nv; ++j) {
          const double v = gl[nv].points[j].x;
          t.points.emplace_back(u, (1.0 - u) * v);
          t.weights.push_back(gl[nu].weights[i] * gl[nv].weights[j] * (1.0 - u));
        }
      }
      tri.push_back(std::move(t));
    }
  }
};

const RuleTables& tables() {
  static const RuleTables t;
  return t;
}

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double a, b;
  std::vector<double> value;
  double error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

const QuadratureRule& gauss_legendre(int n) {
  if (n < 1 || n > 64) throw std::invalid_argument("gauss_legendre: n must be in [1, 64]");
  return tables().gl[n];
}

const QuadratureRule& triangle_rule(int degree) {
  if (degree < 0 || degree > kMaxRuleDegree) {
    throw std::invalid_argument("triangle_rule: unsupported degree " + std::to_string(degree));
  }
  return tables().tri[degree];
}

const QuadratureRule& segment_rule(int degree) {
  if (degree < 0 || degree > kMaxRuleDegree) {
    throw std::invalid_argument("segment_rule: unsupported degree " + std::to_string(degree));
  }
  return tables().seg[degree];
}

void graded_rule(double a, double b, int n, std::vector<std::pair<double, double>>& out) {
  out.clear();
  const auto& gl = gauss_legendre(n);
  const double len = b - a;
  for (std::size_t i = 0; i < gl.size(); ++i) {
    const double t = gl.points[i].x;
    const double s = std::sin(0.5 * pi * t);
    out.emplace_back(a + len * s * s, gl.weights[i] * len * 0.5 * pi * std::sin(pi * t));
  }
}

AdaptiveResult integrate_adaptive_1d(const Integrand1D& f, std::size_t dim, double a, double b,
                                     const AdaptiveOptions& opts,
                                     std::span<const double> breakpoints) {
  AdaptiveResult result;
  result.value.assign(dim, 0.0);
  if (!(b > a)) return result.converged = true, result;

  std::vector<double> fx(dim), fc(dim), f1(dim), f2(dim);
  auto gk = [&](double lo, double hi, Interval& iv) {
    const double c = 0.5 * (lo + hi), hl = 0.5 * (hi - lo);
    std::vector<double> kron(dim, 0.0), gauss(dim, 0.0);
    f(c, fc);
    for (std::size_t d = 0; d < dim; ++d) {
      kron[d] = kWgk[7] * fc[d];
      gauss[d] = kWg[3] * fc[d];
    }
    for (int j = 0; j < 7; ++j) {
      f(c - hl * kXgk[j], f1);
      f(c + hl * kXgk[j], f2);
      for (std::size_t d = 0; d < dim; ++d) {
        kron[d] += kWgk[j] * (f1[d] + f2[d]);
        if (j % 2 == 1) gauss[d] += kWg[j / 2] * (f1[d] + f2[d]);
      }
    }
    double err = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      kron[d] *= hl;
      gauss[d] *= hl;
      err = std::max(err, std::abs(kron[d] - gauss[d]));
    }
    iv.a = lo;
    iv.b = hi;
    iv.value = std::move(kron);
    iv.error = err;
    result.evaluations += 15;
  };

  std::vector<double> cuts{a};
  for (double p : breakpoints)
    if (p > a && p < b) cuts.push_back(p);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  std::priority_queue<Interval> heap;
  std::vector<double> total(dim, 0.0);
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    Interval iv;
    gk(cuts[i], cuts[i + 1], iv);
    for (std::size_t d = 0; d < dim; ++d) total[d] += iv.value[d];
    total_err += iv.error;
    heap.push(std::move(iv));
  }
  int cells = static_cast<int>(heap.size());
  while (!heap.empty()) {
    const double tol = std::max(opts.abs_tol, opts.rel_tol * max_abs(total));
    if (total_err <= tol) {
      result.converged = true;
      break;
    }
    if (cells >= opts.max_cells) break;
    Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // interval cannot be split further in floating point
      result.converged = false;
      heap.push(std::move(worst));
      break;
    }
    Interval left, right;
    gk(worst.a, mid, left);
    gk(mid, worst.b, right);
    for (std::size_t d = 0; d < dim; ++d) total[d] += left.value[d] + right.value[d] - worst.value[d];
    total_err += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
    ++cells;
  }
  // resum to limit drift from incremental updates
  std::fill(total.begin(), total.end(), 0.0);
  total_err = 0.0;
  while (!heap.empty()) {
    const Interval& iv = heap.top();
    for (std::size_t d = 0; d < dim; ++d) total[d] += iv.value[d];
    total_err += iv.error;
    heap.pop();
  }
  result.value = std::move(total);
  result.error_estimate = total_err;
  return result;
}

namespace {

struct Cell {
  Triangle tri;
  std::vector<double> value;  // sum of the four children
  double error;
  std::array<std::vector<double>, 4> child_values;
  bool operator<(const Cell& o) const { return error < o.error; }
};

std::array<Triangle, 4> split4(const Triangle& t) {
  const Vec2 m01 = 0.5 * (t[0] + t[1]);
  const Vec2 m12 = 0.5 * (t[1] + t[2]);
  const Vec2 m20 = 0.5 * (t[2] + t[0]);
  return {Triangle{t[0], m01, m20}, Triangle{m01, t[1], m12}, Triangle{m20, m12, t[2]},
          Triangle{m12, m20, m01}};
}

}  // namespace

AdaptiveResult integrate_adaptive_triangles(const Integrand2D& f, std::size_t dim,
                                            std::span<const Triangle> seeds,
                                            const AdaptiveOptions& opts, int rule_degree) {
  AdaptiveResult result;
  const QuadratureRule& rule = triangle_rule(rule_degree);
  std::vector<double> buf(dim);

  auto apply_rule = [&](const Triangle& t) {
    std::vector<double> v(dim, 0.0);
    const double jac = 2.0 * std::abs(triangle_area(t));
    for (std::size_t q = 0; q < rule.size(); ++q) {
      f(map_to_triangle(t, rule.points[q]), buf);
      const double w = rule.weights[q] * jac;
      for (std::size_t d = 0; d < dim; ++d) v[d] += w * buf[d];
    }
    result.evaluations += static_cast<long>(rule.size());
    return v;
  };
  auto make_cell = [&](const Triangle& t, std::vector<double> parent) {
    Cell c;
    c.tri = t;
    c.value.assign(dim, 0.0);
    const auto kids = split4(t);
    for (int k = 0; k < 4; ++k) {
      c.child_values[k] = apply_rule(kids[k]);
      for (std::size_t d = 0; d < dim; ++d) c.value[d] += c.child_values[k][d];
    }
    double err = 0.0;
    for (std::size_t d = 0; d < dim; ++d) err = std::max(err, std::abs(c.value[d] - parent[d]));
    c.error = err;
    return c;
  };

  std::priority_queue<Cell> heap;
  std::vector<double> total(dim, 0.0);
  double total_err = 0.0;
  for (const Triangle& t : seeds) {
    if (std::abs(triangle_area(t)) <= 0.0) continue;
    Cell c = make_cell(t, apply_rule(t));
    for (std::size_t d = 0; d < dim; ++d) total[d] += c.value[d];
    total_err += c.error;
    heap.push(std::move(c));
  }
  int cells = static_cast<int>(heap.size());
  while (!heap.empty()) {
    const double tol = std::max(opts.abs_tol, opts.rel_tol * max_abs(total));
    if (total_err <= tol) {
      result.converged = true;
      break;
    }
    if (cells + 3 > opts.max_cells) break;
    Cell worst = heap.top();
    heap.pop();
    const auto kids = split4(worst.tri);
    for (std::size_t d = 0; d < dim; ++d) total[d] -= worst.value[d];
    total_err -= worst.error;
    for (int k = 0; k < 4; ++k) {
      Cell c = make_cell(kids[k], std::move(worst.child_values[k]));
      for (std::size_t d = 0; d < dim; ++d) total[d] += c.value[d];
      total_err += c.error;
      heap.push(std::move(c));
    }
    cells += 3;
  }
  std::fill(total.begin(), total.end(), 0.0);
  total_err = 0.0;
  while (!heap.empty()) {
    const Cell& c = heap.top();
    for (std::size_t d = 0; d < dim; ++d) total[d] += c.value[d];
    total_err += c.error;
    heap.pop();
  }
  if (seeds.empty()) result.converged = true;
  result.value = std::move(total);
  result.error_estimate = total_err;
  return result;
}

}  // namespace dgavg
