#include <dgavg/a_eta.hpp>
#include <dgavg/clipping.hpp>
#include <dgavg/errors.hpp>
#include <dgavg/quadrature.hpp>
#include <dgavg/detail/parallel.hpp>
#include <dgavg/detail/seeds.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dgavg {

namespace {

using BasisField = std::function<void(const Vec2&, DofVectors&)>;
using detail::background_seeds;
using detail::elements_within;
using detail::segment_distance;
using detail::segment_triangle_distance;

void dofs_of(const BrokenSpace& space, const std::vector<int>& elements, std::vector<std::size_t>& out) {
  out.clear();
  for (int e : elements) {
    for (int i = 0; i < space.dofs_on(e); ++i) out.push_back(space.offset(e) + i);
  }
  std::sort(out.begin(), out.end());
}

std::size_t local_index(const std::vector<std::size_t>& dofs, std::size_t dof) {
  return static_cast<std::size_t>(std::lower_bound(dofs.begin(), dofs.end(), dof) - dofs.begin());
}

struct SeedResult {
  std::vector<std::size_t> dofs;
  std::vector<double> packed;  // lower triangle, row a: entries (a, 0..a)
  double error = 0.0;
  long evaluations = 0;
  bool converged = true;
};

// Gram matrix ∫ F_i · F_j of a sparse vector field over the background seeds;
// F_i must vanish farther than `support` from the element of dof i.
SymSparseMatrix field_gram(const BrokenSpace& space, const Mollifier& m, const BasisField& field,
                           double support, const AEtaOptions& options, AEtaReport* report) {
  const Mesh& mesh = space.mesh();
  SymSparseMatrix a = a_eta_pattern(space, m);
  const std::vector<Triangle> seeds = background_seeds(mesh, m.radius(), options.background_resolution);
  const QuadratureRule& rule = triangle_rule(6);

  std::vector<SeedResult> results(seeds.size());
  double max_local = 0.0;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    std::vector<int> near;
    elements_within(mesh, seeds[s], support, near);
    dofs_of(space, near, results[s].dofs);
    max_local = std::max(max_local, static_cast<double>(results[s].dofs.size()));
  }
  const double estimate = static_cast<double>(seeds.size()) * 5.0 * rule.size() * 40.0;
  if (estimate > options.max_evaluations) {
    std::ostringstream os;
    os << "averaged-form oracle refused: about " << estimate << " integrand evaluations on "
       << seeds.size() << " background cells exceed the budget of " << options.max_evaluations;
    throw BudgetError(os.str());
  }

  auto run = [&](std::size_t s, const AdaptiveOptions& opts) {
    SeedResult& r = results[s];
    const std::size_t n = r.dofs.size();
    const std::size_t dim = n * (n + 1) / 2;
    DofVectors values;
    std::vector<Vec2> local(n);
    Integrand2D f = [&](const Vec2& x, std::span<double> out) {
      field(x, values);
      std::fill(local.begin(), local.end(), Vec2{});
      for (std::size_t i = 0; i < values.dofs.size(); ++i) {
        const std::size_t li = local_index(r.dofs, values.dofs[i]);
        if (li < n && r.dofs[li] == values.dofs[i]) local[li] += values.values[i];
      }
      std::size_t k = 0;
      for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q <= p; ++q) out[k++] = dot(local[p], local[q]);
      }
    };
    const Triangle seed[1] = {seeds[s]};
    AdaptiveResult res = integrate_adaptive_triangles(f, dim, seed, opts, 6);
    r.packed = std::move(res.value);
    r.error = res.error_estimate;
    r.evaluations += res.evaluations;
    r.converged = res.converged;
  };

  // coarse pass: the largest diagonal entry bounds every entry
  AdaptiveOptions coarse;
  coarse.abs_tol = std::numeric_limits<double>::infinity();
  detail::parallel_for(seeds.size(), options.threads, [&](std::size_t s) { run(s, coarse); });
  std::vector<double> diag(space.total_dofs(), 0.0);
  double area = 0.0;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    area += triangle_area(seeds[s]);
    const auto& r = results[s];
    for (std::size_t p = 0; p < r.dofs.size(); ++p) diag[r.dofs[p]] += r.packed[p * (p + 1) / 2 + p];
  }
  const double scale = *std::max_element(diag.begin(), diag.end());

  detail::parallel_for(seeds.size(), options.threads, [&](std::size_t s) {
    AdaptiveOptions fine;
    fine.rel_tol = 0.0;
    fine.abs_tol = options.rel_tol * scale * triangle_area(seeds[s]) / area;
    fine.max_cells = options.max_cells_per_seed;
    run(s, fine);
  });

  AEtaReport local_report;
  local_report.seeds = seeds.size();
  for (const auto& r : results) {
    std::size_t k = 0;
    for (std::size_t p = 0; p < r.dofs.size(); ++p) {
      for (std::size_t q = 0; q <= p; ++q) {
        const double v = r.packed[k++];
        if (v != 0.0) a.add(r.dofs[p], r.dofs[q], v);
      }
    }
    local_report.error_estimate += r.error;
    local_report.evaluations += static_cast<double>(r.evaluations);
    local_report.converged = local_report.converged && r.converged;
    local_report.unconverged_runs += r.converged ? 0 : 1;
  }
  if (report) *report = local_report;
  return a;
}

struct SideDof {
  std::size_t dof;
  int element;
  int local;
  double sign;
};

std::vector<SideDof> side_dofs(const BrokenSpace& space, const Face& f) {
  std::vector<SideDof> out;
  auto add = [&](int e, double sign) {
    for (int i = 0; i < space.dofs_on(e); ++i) out.push_back({space.offset(e) + i, e, i, sign});
  };
  add(f.plus_element, 1.0);
  if (!f.is_boundary()) add(f.minus_element, -1.0);
  return out;
}

// Parameters t in (0, 1) where a + t d is at distance r from p.
void circle_crossings(const Vec2& a, const Vec2& d, const Vec2& p, double r, std::vector<double>& out) {
  const Vec2 f = a - p;
  const double A = dot(d, d), B = dot(f, d), C = dot(f, f) - r * r;
  const double disc = B * B - A * C;
  if (disc < 0.0) return;
  const double sq = std::sqrt(disc);
  for (double t : {(-B - sq) / A, (-B + sq) / A}) {
    if (t > 0.0 && t < 1.0) out.push_back(t);
  }
}

// Parameters t in (0, 1) where n · (a + t d) = c.
void line_crossing(const Vec2& a, const Vec2& d, const Vec2& n, double c, std::vector<double>& out) {
  const double nd = dot(n, d);
  if (std::abs(nd) <= 1e-14 * norm(d)) return;
  const double t = (c - dot(n, a)) / nd;
  if (t > 0.0 && t < 1.0) out.push_back(t);
}

AdaptiveOptions face_options(const AEtaOptions& options) {
  AdaptiveOptions o;
  o.abs_tol = 1e-300;
  o.rel_tol = options.rel_tol;
  o.max_cells = 20000;
  return o;
}

// -(eta*eta*grad_h u, ⟦v⟧)_F - (eta*eta*grad_h v, ⟦u⟧)_F
SymSparseMatrix cross_terms(const BrokenSpace& space, const Mollifier& m, const AEtaOptions& options,
                            AEtaReport& report) {
  const Mesh& mesh = space.mesh();
  const double reach = 2.0 * m.radius();
  struct FaceResult {
    std::vector<SideDof> sides;
    std::vector<std::size_t> near;
    std::vector<double> values;
    AdaptiveResult res;
  };
  std::vector<FaceResult> results(mesh.num_faces());
  detail::parallel_for(mesh.num_faces(), options.threads, [&](std::size_t fi) {
    const Face& f = mesh.faces()[fi];
    const Vec2 a = mesh.vertices()[f.vertices[0]];
    const Vec2 b = mesh.vertices()[f.vertices[1]];
    const Vec2 d = b - a;
    FaceResult& r = results[fi];
    r.sides = side_dofs(space, f);
    std::vector<int> elements;
    mesh.elements_near(0.5 * (a + b), 0.5 * f.diameter + reach, elements);
    std::erase_if(elements, [&](int e) { return segment_triangle_distance(a, b, mesh.triangle(e)) >= reach; });
    dofs_of(space, elements, r.near);

    std::vector<double> breaks;
    for (int e : elements) {
      const Triangle t = mesh.triangle(e);
      for (int k = 0; k < 3; ++k) {
        circle_crossings(a, d, t[k], reach, breaks);
        const Vec2 ed = t[(k + 1) % 3] - t[k];
        const Vec2 n = (1.0 / norm(ed)) * Vec2{ed.y, -ed.x};
        line_crossing(a, d, n, dot(n, t[k]) + reach, breaks);
        line_crossing(a, d, n, dot(n, t[k]) - reach, breaks);
      }
    }
    const std::size_t ns = r.sides.size(), nn = r.near.size();
    DofVectors conv;
    double phi[kMaxLocalDofs];
    Integrand1D integrand = [&](double t, std::span<double> out) {
      const Vec2 y = a + t * d;
      std::fill(out.begin(), out.end(), 0.0);
      double_convolved_grad_basis_at(m, space, y, conv);
      double jump[2 * kMaxLocalDofs];
      for (std::size_t p = 0; p < ns; ++p) {
        const SideDof& s = r.sides[p];
        if (s.local == 0) space.basis_values(s.element, y, std::span<double>(phi, space.dofs_on(s.element)));
        jump[p] = s.sign * phi[s.local] * f.diameter;
      }
      for (std::size_t i = 0; i < conv.dofs.size(); ++i) {
        const std::size_t q = local_index(r.near, conv.dofs[i]);
        if (q >= nn || r.near[q] != conv.dofs[i]) continue;
        const double g = dot(conv.values[i], f.unit_normal);
        for (std::size_t p = 0; p < ns; ++p) out[q * ns + p] += g * jump[p];
      }
    };
    r.res = integrate_adaptive_1d(integrand, ns * nn, 0.0, 1.0, face_options(options), breaks);
  });

  SymSparseMatrix c = a_eta_pattern(space, m);
  for (const auto& r : results) {
    const std::size_t ns = r.sides.size();
    for (std::size_t q = 0; q < r.near.size(); ++q) {
      for (std::size_t p = 0; p < ns; ++p) {
        const double v = r.res.value[q * ns + p];
        if (v == 0.0) continue;
        const std::size_t dp = r.sides[p].dof, dq = r.near[q];
        c.add(dp, dq, dp == dq ? -2.0 * v : -v);
      }
    }
    report.error_estimate += r.res.error_estimate;
    report.evaluations += static_cast<double>(r.res.evaluations);
    report.converged = report.converged && r.res.converged;
    report.unconverged_runs += r.res.converged ? 0 : 1;
  }
  return c;
}

// (eta * ⟦u⟧, eta * ⟦v⟧) = sum_{f,g} ∫_f ∫_g (eta*eta)(y - z) ⟦u⟧(y) · ⟦v⟧(z)
SymSparseMatrix jump_term_pairs(const BrokenSpace& space, const Mollifier& m,
                                const AEtaOptions& options, AEtaReport& report) {
  const Mesh& mesh = space.mesh();
  const double reach = 2.0 * m.radius();
  const auto& faces = mesh.faces();
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (std::size_t g = f; g < faces.size(); ++g) {
      const Vec2 a = mesh.vertices()[faces[f].vertices[0]], b = mesh.vertices()[faces[f].vertices[1]];
      const Vec2 c = mesh.vertices()[faces[g].vertices[0]], d = mesh.vertices()[faces[g].vertices[1]];
      if (segment_distance(a, b, c, d) < reach) pairs.emplace_back(static_cast<int>(f), static_cast<int>(g));
    }
  }
  struct PairResult {
    std::vector<SideDof> sf, sg;
    AdaptiveResult res;
  };
  std::vector<PairResult> results(pairs.size());
  const AdaptiveOptions outer_opts = face_options(options);
  AdaptiveOptions inner_opts = outer_opts;
  inner_opts.rel_tol = 0.1 * outer_opts.rel_tol;

  detail::parallel_for(pairs.size(), options.threads, [&](std::size_t pi) {
    const Face& f = faces[pairs[pi].first];
    const Face& g = faces[pairs[pi].second];
    PairResult& r = results[pi];
    r.sf = side_dofs(space, f);
    r.sg = side_dofs(space, g);
    const Vec2 fa = mesh.vertices()[f.vertices[0]], fd = mesh.vertices()[f.vertices[1]] - fa;
    const Vec2 ga = mesh.vertices()[g.vertices[0]], gd = mesh.vertices()[g.vertices[1]] - ga;
    const double nfg = dot(f.unit_normal, g.unit_normal);
    const std::size_t nf = r.sf.size(), ng = r.sg.size();

    std::vector<double> outer_breaks;
    circle_crossings(fa, fd, ga, reach, outer_breaks);
    circle_crossings(fa, fd, ga + gd, reach, outer_breaks);
    const double gc = dot(g.unit_normal, ga);
    line_crossing(fa, fd, g.unit_normal, gc, outer_breaks);
    line_crossing(fa, fd, g.unit_normal, gc + reach, outer_breaks);
    line_crossing(fa, fd, g.unit_normal, gc - reach, outer_breaks);
    const Vec2 gt = (1.0 / g.diameter) * gd;
    line_crossing(fa, fd, gt, dot(gt, ga), outer_breaks);
    line_crossing(fa, fd, gt, dot(gt, ga + gd), outer_breaks);

    Integrand1D outer = [&](double t, std::span<double> out) {
      const Vec2 y = fa + t * fd;
      std::vector<double> inner_breaks;
      circle_crossings(ga, gd, y, reach, inner_breaks);
      const double foot = dot(y - ga, gd) / dot(gd, gd);
      if (foot > 0.0 && foot < 1.0) inner_breaks.push_back(foot);
      Integrand1D inner = [&](double u, std::span<double> iv) {
        const Vec2 z = ga + u * gd;
        const double w = m.eta2_radial(distance(y, z)) * g.diameter;
        if (w == 0.0) {
          std::fill(iv.begin(), iv.end(), 0.0);
          return;
        }
        double phi[kMaxLocalDofs];
        for (std::size_t q = 0; q < ng; ++q) {
          const SideDof& s = r.sg[q];
          if (s.local == 0) space.basis_values(s.element, z, std::span<double>(phi, space.dofs_on(s.element)));
          iv[q] = w * s.sign * phi[s.local];
        }
      };
      const AdaptiveResult in = integrate_adaptive_1d(inner, ng, 0.0, 1.0, inner_opts, inner_breaks);
      double phi[kMaxLocalDofs];
      for (std::size_t p = 0; p < nf; ++p) {
        const SideDof& s = r.sf[p];
        if (s.local == 0) space.basis_values(s.element, y, std::span<double>(phi, space.dofs_on(s.element)));
        const double jp = s.sign * phi[s.local] * f.diameter * nfg;
        for (std::size_t q = 0; q < ng; ++q) out[p * ng + q] = jp * in.value[q];
      }
    };
    r.res = integrate_adaptive_1d(outer, nf * ng, 0.0, 1.0, outer_opts, outer_breaks);
  });

  SymSparseMatrix j = a_eta_pattern(space, m);
  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    const PairResult& r = results[pi];
    const bool same = pairs[pi].first == pairs[pi].second;
    const std::size_t ng = r.sg.size();
    for (std::size_t p = 0; p < r.sf.size(); ++p) {
      for (std::size_t q = 0; q < ng; ++q) {
        const double v = r.res.value[p * ng + q];
        if (v == 0.0) continue;
        const std::size_t dp = r.sf[p].dof, dq = r.sg[q].dof;
        if (same) {
          if (dp >= dq) j.add(dp, dq, v);
        } else {
          j.add(dp, dq, dp == dq ? 2.0 * v : v);
        }
      }
    }
    report.error_estimate += r.res.error_estimate;
    report.evaluations += static_cast<double>(r.res.evaluations);
    report.converged = report.converged && r.res.converged;
    report.unconverged_runs += r.res.converged ? 0 : 1;
  }
  return j;
}

// (eta * grad_h u, eta * grad_h v) = sum_T ∫_T grad_h u · (eta*eta*grad_h v), by
// kernel symmetry. Each element is cut along the lines at distance 2 h^s
// from nearby edge lines, where eta*eta*grad_h has its weakest smoothness.
// Both orderings of every pair are integrated; the mismatch is reported as
// the asymmetry before averaging.
SymSparseMatrix volume_term(const BrokenSpace& space, const Mollifier& m, const AEtaOptions& options,
                            AEtaReport& report) {
  const Mesh& mesh = space.mesh();
  const double reach = 2.0 * m.radius();
  struct ElementResult {
    std::vector<std::size_t> near;
    AdaptiveResult res;
  };
  std::vector<ElementResult> results(mesh.num_elements());
  detail::parallel_for(mesh.num_elements(), options.threads, [&](std::size_t idx) {
    const int e = static_cast<int>(idx);
    ElementResult& r = results[idx];
    const int ne = space.dofs_on(e);
    if (space.degree(e) == 0) {
      r.res.converged = true;
      return;
    }
    const Triangle tri = mesh.triangle(e);
    std::vector<int> elements;
    elements_within(mesh, tri, reach, elements);
    std::erase_if(elements, [&](int o) { return space.degree(o) == 0; });
    dofs_of(space, elements, r.near);

    const std::vector<Triangle> seeds = detail::element_seeds(mesh, e, reach);
    const std::size_t nn = r.near.size();
    DofVectors conv;
    Vec2 grad[kMaxLocalDofs];
    Integrand2D f = [&](const Vec2& y, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
      space.basis_gradients(e, y, std::span<Vec2>(grad, ne));
      double_convolved_grad_basis_at(m, space, y, conv);
      for (std::size_t i = 0; i < conv.dofs.size(); ++i) {
        const std::size_t q = local_index(r.near, conv.dofs[i]);
        if (q >= nn || r.near[q] != conv.dofs[i]) continue;
        for (int p = 0; p < ne; ++p) out[q * ne + p] += dot(grad[p], conv.values[i]);
      }
    };
    AdaptiveOptions opts;
    opts.abs_tol = 1e-300;
    opts.rel_tol = options.rel_tol;
    opts.max_cells = 20000;
    r.res = integrate_adaptive_triangles(f, static_cast<std::size_t>(ne) * nn, seeds, opts, 6);
  });

  // full (unsymmetrized) entries, keyed by pattern position and orientation
  SymSparseMatrix lower = a_eta_pattern(space, m);
  SymSparseMatrix upper = lower;
  for (std::size_t idx = 0; idx < results.size(); ++idx) {
    const int e = static_cast<int>(idx);
    const ElementResult& r = results[idx];
    const int ne = space.dofs_on(e);
    for (std::size_t q = 0; q < r.near.size(); ++q) {
      for (int p = 0; p < ne; ++p) {
        const std::size_t dp = space.offset(e) + p, dq = r.near[q];
        const double v = r.res.value.empty() ? 0.0 : r.res.value[q * ne + p];
        (dp >= dq ? lower : upper).add(dp, dq, v);
      }
    }
    report.error_estimate += r.res.error_estimate;
    report.evaluations += static_cast<double>(r.res.evaluations);
    report.converged = report.converged && r.res.converged;
    report.unconverged_runs += r.res.converged ? 0 : 1;
  }
  double scale = 0.0, asym = 0.0;
  for (std::size_t k = 0; k < lower.values().size(); ++k) {
    scale = std::max(scale, std::abs(lower.values()[k]));
  }
  const auto& rows = lower.row_offsets();
  for (std::size_t i = 0; i < lower.dim(); ++i) {
    for (std::size_t k = rows[i]; k < rows[i + 1]; ++k) {
      if (lower.columns()[k] == i) {
        upper.values()[k] = lower.values()[k];
      } else {
        asym = std::max(asym, std::abs(lower.values()[k] - upper.values()[k]));
      }
      lower.values()[k] = 0.5 * (lower.values()[k] + upper.values()[k]);
    }
  }
  report.max_asymmetry = std::max(report.max_asymmetry, scale > 0.0 ? asym / scale : 0.0);
  return lower;
}

}  // namespace

SymSparseMatrix a_eta_pattern(const BrokenSpace& space, const Mollifier& m) {
  const Mesh& mesh = space.mesh();
  const double reach = 2.0 * m.radius();
  std::vector<std::vector<std::size_t>> rows(space.total_dofs());
  std::vector<int> near;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const int ei = static_cast<int>(e);
    elements_within(mesh, mesh.triangle(ei), reach, near);
    for (int o : near) {
      for (int i = 0; i < space.dofs_on(ei); ++i) {
        const std::size_t gi = space.offset(ei) + i;
        for (int j = 0; j < space.dofs_on(o); ++j) {
          const std::size_t gj = space.offset(o) + j;
          if (gj <= gi) rows[gi].push_back(gj);
        }
      }
    }
  }
  return SymSparseMatrix(space.total_dofs(), rows);
}

SymSparseMatrix AEtaTerms::sum() const {
  SymSparseMatrix s = volume;
  for (std::size_t k = 0; k < s.values().size(); ++k) {
    s.values()[k] += cross.values()[k] + jump.values()[k];
  }
  return s;
}

SymSparseMatrix assemble_a_eta_direct(const BrokenSpace& space, const Mollifier& m,
                                      const AEtaOptions& options, AEtaReport* report) {
  BasisField field = [&](const Vec2& x, DofVectors& out) { grad_average_basis_at(m, space, x, out); };
  return field_gram(space, m, field, m.radius(), options, report);
}

AEtaTerms assemble_a_eta_terms(const BrokenSpace& space, const Mollifier& m,
                               const AEtaOptions& options, AEtaReport* report) {
  AEtaReport total;
  AEtaTerms terms;
  terms.volume = volume_term(space, m, options, total);
  terms.cross = cross_terms(space, m, options, total);
  terms.jump = jump_term_pairs(space, m, options, total);
  if (report) *report = total;
  return terms;
}

SymSparseMatrix assemble_a_eta_expanded(const BrokenSpace& space, const Mollifier& m,
                                        const AEtaOptions& options, AEtaReport* report) {
  return assemble_a_eta_terms(space, m, options, report).sum();
}

SymSparseMatrix assemble_jump_term_tube(const BrokenSpace& space, const Mollifier& m,
                                        const AEtaOptions& options, AEtaReport* report) {
  const Mesh& mesh = space.mesh();
  BasisField field = [&](const Vec2& x, DofVectors& out) {
    out.clear();
    thread_local std::vector<int> faces;
    thread_local DofVectors part;
    mesh.faces_near(x, m.radius(), faces);
    for (int f : faces) {
      face_convolution_basis_at(m, space, f, x, part);
      for (std::size_t i = 0; i < part.dofs.size(); ++i) out.add(part.dofs[i], part.values[i]);
    }
  };
  return field_gram(space, m, field, m.radius(), options, report);
}

SymSparseMatrix assemble_volume_term_background(const BrokenSpace& space, const Mollifier& m,
                                               const AEtaOptions& options, AEtaReport* report) {
  BasisField field = [&](const Vec2& x, DofVectors& out) {
    convolved_broken_grad_basis_at(m, space, x, out);
  };
  return field_gram(space, m, field, m.radius(), options, report);
}

double a_eta_value_direct(const Mollifier& m, const DgFunction& u, const DgFunction& v,
                          const AEtaOptions& options, AEtaReport* report) {
  const BrokenSpace& space = u.space();
  const std::vector<Triangle> seeds =
      background_seeds(space.mesh(), m.radius(), options.background_resolution);
  struct Part {
    AdaptiveResult res;
  };
  std::vector<Part> parts(seeds.size());
  Integrand2D f = [&](const Vec2& x, std::span<double> out) {
    const Vec2 gu = grad_average_at(m, u, x);
    const Vec2 gv = grad_average_at(m, v, x);
    out[0] = dot(gu, gv);
    out[1] = dot(gu, gu);
    out[2] = dot(gv, gv);
  };
  AdaptiveOptions coarse;
  coarse.abs_tol = std::numeric_limits<double>::infinity();
  detail::parallel_for(seeds.size(), options.threads, [&](std::size_t s) {
    const Triangle seed[1] = {seeds[s]};
    parts[s].res = integrate_adaptive_triangles(f, 3, seed, coarse, 6);
  });
  double nu = 0.0, nv = 0.0, area = 0.0;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    nu += parts[s].res.value[1];
    nv += parts[s].res.value[2];
    area += triangle_area(seeds[s]);
  }
  const double scale = std::max(std::sqrt(nu * nv), 1e-300);
  detail::parallel_for(seeds.size(), options.threads, [&](std::size_t s) {
    AdaptiveOptions fine;
    fine.rel_tol = 0.0;
    fine.abs_tol = options.rel_tol * scale * triangle_area(seeds[s]) / area;
    fine.max_cells = options.max_cells_per_seed;
    const Triangle seed[1] = {seeds[s]};
    parts[s].res = integrate_adaptive_triangles(f, 3, seed, fine, 6);
  });
  AEtaReport rep;
  rep.seeds = seeds.size();
  double value = 0.0;
  for (const auto& p : parts) {
    value += p.res.value[0];
    rep.error_estimate += p.res.error_estimate;
    rep.evaluations += static_cast<double>(p.res.evaluations);
    rep.converged = rep.converged && p.res.converged;
    rep.unconverged_runs += p.res.converged ? 0 : 1;
  }
  if (report) *report = rep;
  return value;
}

SymSparseMatrix assemble_jump_penalty(const BrokenSpace& space, double sigma) {
  const Mesh& mesh = space.mesh();
  std::vector<std::vector<std::size_t>> rows(space.total_dofs());
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const int ei = static_cast<int>(e);
    for (int i = 0; i < space.dofs_on(ei); ++i) {
      for (int j = 0; j <= i; ++j) rows[space.offset(ei) + i].push_back(space.offset(ei) + j);
    }
  }
  for (const Face& f : mesh.faces()) {
    if (f.is_boundary()) continue;
    for (const SideDof& p : side_dofs(space, f)) {
      for (const SideDof& q : side_dofs(space, f)) {
        if (q.dof <= p.dof) rows[p.dof].push_back(q.dof);
      }
    }
  }
  SymSparseMatrix a(space.total_dofs(), rows);
  for (const Face& f : mesh.faces()) {
    const Vec2 pa = mesh.vertices()[f.vertices[0]], pb = mesh.vertices()[f.vertices[1]];
    const auto sides = side_dofs(space, f);
    const QuadratureRule& rule = segment_rule(std::min(kMaxRuleDegree, 2 * space.max_degree()));
    std::vector<double> vals(sides.size());
    double phi[kMaxLocalDofs];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 y = pa + rule.points[q].x * (pb - pa);
      for (std::size_t p = 0; p < sides.size(); ++p) {
        if (sides[p].local == 0) {
          space.basis_values(sides[p].element, y, std::span<double>(phi, space.dofs_on(sides[p].element)));
        }
        vals[p] = sides[p].sign * phi[sides[p].local];
      }
      const double w = sigma * rule.weights[q] * f.diameter;
      for (std::size_t p = 0; p < sides.size(); ++p) {
        for (std::size_t r = 0; r < sides.size(); ++r) {
          if (sides[r].dof <= sides[p].dof) a.add(sides[p].dof, sides[r].dof, w * vals[p] * vals[r]);
        }
      }
    }
  }
  return a;
}

}  // namespace dgavg
