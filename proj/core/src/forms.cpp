#include <dgavg/errors.hpp>
#include <dgavg/forms.hpp>
#include <dgavg/mollifier.hpp>
#include <dgavg/quadrature.hpp>
#include <dgavg/detail/parallel.hpp>

#include <cmath>
#include <stdexcept>

namespace dgavg {

namespace {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Local contributions are collected per task and summed in task order, so
// the result does not depend on the thread count.
void scatter(SymSparseMatrix& a, const std::vector<std::vector<Triplet>>& blocks) {
  for (const auto& block : blocks) {
    for (const Triplet& t : block) a.add(t.row, t.col, t.value);
  }
}

struct SideBasis {
  std::size_t dof;
  double value;
  double normal_derivative;  // grad phi · nu_face
  double sign;               // +1 plus side, -1 minus side
  double average_weight;     // 1/2 interior, 1 boundary
};

}  // namespace

double overpenalty_constant(int d) {
  if (d == 2) return 16.0 / (3.0 * pi * pi);
  if (d == 3) return 3.0 / 5.0;
  throw std::invalid_argument("overpenalized constant is defined for d = 2 and d = 3 only");
}

void validate(const PenaltySpec& spec) {
  if (spec.kind == PenaltyKind::classical && !(spec.sigma0 > 0.0)) {
    throw ConfigError("sigma0 must be positive", "sigma0");
  }
  if (spec.kind == PenaltyKind::overpenalized && !(spec.s > 1.5)) {
    throw ConfigError("s must exceed 1.5: the overpenalized form is coercive only for s > 3/2", "s");
  }
}

double penalty_coefficient(const PenaltySpec& spec, const Face& face, double h_global, int d) {
  if (d != 2 && d != 3) throw std::invalid_argument("penalty_coefficient: d must be 2 or 3");
  if (spec.kind == PenaltyKind::classical) {
    if (d == 3) throw std::invalid_argument("classical per-face penalty needs 3D geometry");
    return spec.sigma0 / face.diameter;
  }
  const double h = spec.h_choice == HChoice::global ? h_global : face.diameter;
  return overpenalty_constant(d) * std::pow(h, -spec.s);
}

SymSparseMatrix dg_pattern(const BrokenSpace& space) {
  const Mesh& mesh = space.mesh();
  std::vector<std::vector<std::size_t>> rows(space.total_dofs());
  auto couple = [&](int ea, int eb) {
    for (int i = 0; i < space.dofs_on(ea); ++i) {
      const std::size_t gi = space.offset(ea) + i;
      for (int j = 0; j < space.dofs_on(eb); ++j) {
        const std::size_t gj = space.offset(eb) + j;
        if (gj <= gi) rows[gi].push_back(gj);
      }
    }
  };
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) couple(static_cast<int>(e), static_cast<int>(e));
  for (const Face& f : mesh.faces()) {
    if (f.is_boundary()) continue;
    couple(f.plus_element, f.minus_element);
    couple(f.minus_element, f.plus_element);
  }
  return SymSparseMatrix(space.total_dofs(), rows);
}

SymSparseMatrix assemble_sipg(const BrokenSpace& space, const PenaltySpec& spec,
                              const AssemblyOptions& options) {
  validate(spec);
  const Mesh& mesh = space.mesh();
  SymSparseMatrix a = dg_pattern(space);

  std::vector<std::vector<Triplet>> volume(mesh.num_elements());
  detail::parallel_for(mesh.num_elements(), options.threads, [&](std::size_t idx) {
    const int e = static_cast<int>(idx);
    const int n = space.dofs_on(e);
    const Triangle t = mesh.triangle(e);
    const QuadratureRule& rule = triangle_rule(std::min(kMaxRuleDegree, 2 * space.degree(e) + 2));
    const double jac = 2.0 * triangle_area(t);
    std::vector<double> local(static_cast<std::size_t>(n) * n, 0.0);
    Vec2 grad[kMaxLocalDofs];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      space.basis_gradients(e, map_to_triangle(t, rule.points[q]), std::span<Vec2>(grad, n));
      const double w = rule.weights[q] * jac;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) local[i * n + j] += w * dot(grad[i], grad[j]);
      }
    }
    auto& out = volume[idx];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) out.push_back({space.offset(e) + i, space.offset(e) + j, local[i * n + j]});
    }
  });

  std::vector<std::vector<Triplet>> faces(mesh.num_faces());
  detail::parallel_for(mesh.num_faces(), options.threads, [&](std::size_t idx) {
    const Face& f = mesh.faces()[idx];
    const Vec2 pa = mesh.vertices()[f.vertices[0]];
    const Vec2 pb = mesh.vertices()[f.vertices[1]];
    const double sigma = penalty_coefficient(spec, f, mesh.h_global());
    int kmax = space.degree(f.plus_element);
    if (!f.is_boundary()) kmax = std::max(kmax, space.degree(f.minus_element));
    const QuadratureRule& rule = segment_rule(std::min(kMaxRuleDegree, 2 * kmax + 4));
    const double avg = f.is_boundary() ? 1.0 : 0.5;

    std::vector<SideBasis> sides;
    std::vector<double> local;
    std::size_t m = 0;
    double phi[kMaxLocalDofs];
    Vec2 grad[kMaxLocalDofs];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 y = pa + rule.points[q].x * (pb - pa);
      const double w = rule.weights[q] * f.diameter;
      sides.clear();
      auto collect = [&](int e, double sign) {
        const int n = space.dofs_on(e);
        space.basis_values(e, y, std::span<double>(phi, n));
        space.basis_gradients(e, y, std::span<Vec2>(grad, n));
        for (int i = 0; i < n; ++i) {
          sides.push_back({space.offset(e) + i, phi[i], dot(grad[i], f.unit_normal), sign, avg});
        }
      };
      collect(f.plus_element, 1.0);
      if (!f.is_boundary()) collect(f.minus_element, -1.0);
      if (local.empty()) {
        m = sides.size();
        local.assign(m * m, 0.0);
      }
      for (std::size_t i = 0; i < m; ++i) {
        const SideBasis& bi = sides[i];
        for (std::size_t j = 0; j < m; ++j) {
          const SideBasis& bj = sides[j];
          const double consistency = bj.average_weight * bj.normal_derivative * bi.sign * bi.value +
                                     bi.average_weight * bi.normal_derivative * bj.sign * bj.value;
          const double penalty = sigma * bi.sign * bj.sign * bi.value * bj.value;
          local[i * m + j] += w * (penalty - consistency);
        }
      }
    }
    auto& out = faces[idx];
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (sides[j].dof <= sides[i].dof) out.push_back({sides[i].dof, sides[j].dof, local[i * m + j]});
      }
    }
  });

  scatter(a, volume);
  scatter(a, faces);
  return a;
}

SymSparseMatrix assemble_oipg(const BrokenSpace& space, double s, const AssemblyOptions& options,
                              HChoice h_choice) {
  PenaltySpec spec;
  spec.kind = PenaltyKind::overpenalized;
  spec.s = s;
  spec.h_choice = h_choice;
  return assemble_sipg(space, spec, options);
}

std::vector<double> assemble_rhs(const BrokenSpace& space, const ScalarField& g, RhsMode mode,
                                 const Mollifier* mollifier, const AssemblyOptions& options) {
  if (mode == RhsMode::averaged && mollifier == nullptr) {
    throw std::invalid_argument("averaged right-hand side needs a mollifier");
  }
  const Mesh& mesh = space.mesh();
  std::vector<double> b(space.total_dofs(), 0.0);
  detail::parallel_for(mesh.num_elements(), options.threads, [&](std::size_t idx) {
    const int e = static_cast<int>(idx);
    const int n = space.dofs_on(e);
    const Triangle t = mesh.triangle(e);
    const int degree = mode == RhsMode::plain ? std::min(kMaxRuleDegree, space.degree(e) + 12)
                                              : space.degree(e) + 8;
    const QuadratureRule& rule = triangle_rule(degree);
    const double jac = 2.0 * triangle_area(t);
    double phi[kMaxLocalDofs];
    double* out = b.data() + space.offset(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 x = map_to_triangle(t, rule.points[q]);
      const double gx = mode == RhsMode::plain ? g(x) : average_field_at(*mollifier, mesh, g, x);
      space.basis_values(e, x, std::span<double>(phi, n));
      for (int i = 0; i < n; ++i) out[i] += rule.weights[q] * jac * gx * phi[i];
    }
  });
  return b;
}

}  // namespace dgavg
