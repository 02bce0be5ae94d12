#include <dgavg/detail/seeds.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dgavg::detail {

namespace {

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double o1 = orient2d(a, b, c), o2 = orient2d(a, b, d);
  const double o3 = orient2d(c, d, a), o4 = orient2d(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

}  // namespace

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

double segment_triangle_distance(const Vec2& a, const Vec2& b, const Triangle& t) {
  if (point_in_triangle(a, t) || point_in_triangle(b, t)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (int e = 0; e < 3; ++e) d = std::min(d, segment_distance(a, b, t[e], t[(e + 1) % 3]));
  return d;
}

double triangle_distance(const Triangle& s, const Triangle& t) {
  double d = std::numeric_limits<double>::infinity();
  for (int e = 0; e < 3; ++e) d = std::min(d, segment_triangle_distance(s[e], s[(e + 1) % 3], t));
  return d;
}

void elements_within(const Mesh& mesh, const Triangle& region, double reach, std::vector<int>& out) {
  const Vec2 c = triangle_centroid(region);
  double rad = 0.0;
  for (const Vec2& v : region) rad = std::max(rad, distance(c, v));
  mesh.elements_near(c, rad + reach, out);
  std::erase_if(out, [&](int e) { return triangle_distance(region, mesh.triangle(e)) >= reach; });
}



// Splits every convex polygon crossed by the line into its two halves.
void cut_polygons(std::vector<std::vector<Vec2>>& polys, const Line& line, double eps) {
  std::vector<std::vector<Vec2>> next;
  next.reserve(polys.size());
  for (auto& poly : polys) {
    double lo = 0.0, hi = 0.0;
    for (const Vec2& v : poly) {
      const double s = dot(line.normal, v) - line.offset;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    if (lo >= -eps || hi <= eps) {
      next.push_back(std::move(poly));
      continue;
    }
    std::vector<Vec2> neg, pos;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2& p = poly[i];
      const Vec2& q = poly[(i + 1) % poly.size()];
      const double sp = dot(line.normal, p) - line.offset;
      const double sq = dot(line.normal, q) - line.offset;
      if (sp <= 0.0) neg.push_back(p);
      if (sp >= 0.0) pos.push_back(p);
      if ((sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0)) {
        const Vec2 x = p + (sp / (sp - sq)) * (q - p);
        neg.push_back(x);
        pos.push_back(x);
      }
    }
    if (neg.size() >= 3) next.push_back(std::move(neg));
    if (pos.size() >= 3) next.push_back(std::move(pos));
  }
  polys.swap(next);
}

// Background cells covering Ω_h = {d(x, Ω) < h^s}: a grid over the enlarged
// bounding box, cut along all lines at distance h^s from a face line, where
// the averaged basis gradients have square-root singularities.
std::vector<Triangle> background_seeds(const Mesh& mesh, double radius, int resolution) {
  const auto [lo, hi] = mesh.bounding_box();
  const Vec2 box_lo = lo - Vec2{radius, radius};
  const Vec2 box_hi = hi + Vec2{radius, radius};
  const double span = std::max(box_hi.x - box_lo.x, box_hi.y - box_lo.y);

  std::vector<Line> lines;
  auto add = [&](Vec2 n, double c) {
    if (n.x < -1e-14 || (std::abs(n.x) <= 1e-14 && n.y < 0.0)) {
      n = -n;
      c = -c;
    }
    lines.push_back({n, c});
  };
  for (const Face& f : mesh.faces()) {
    const double c = dot(f.unit_normal, mesh.vertices()[f.vertices[0]]);
    add(f.unit_normal, c + radius);
    add(f.unit_normal, c - radius);
  }
  const double spacing = std::min(mesh.h_global(), 2.0 * radius) / std::max(resolution, 4);
  const int nx = std::min(256, static_cast<int>(std::ceil((box_hi.x - box_lo.x) / spacing)));
  const int ny = std::min(256, static_cast<int>(std::ceil((box_hi.y - box_lo.y) / spacing)));
  for (int i = 1; i < nx; ++i) add({1.0, 0.0}, box_lo.x + i * (box_hi.x - box_lo.x) / nx);
  for (int j = 1; j < ny; ++j) add({0.0, 1.0}, box_lo.y + j * (box_hi.y - box_lo.y) / ny);

  const double eps = 1e-12 * span;
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    if (a.normal.x != b.normal.x) return a.normal.x < b.normal.x;
    if (a.normal.y != b.normal.y) return a.normal.y < b.normal.y;
    return a.offset < b.offset;
  });
  std::vector<Line> unique;
  for (const Line& l : lines) {
    if (!unique.empty() && distance(unique.back().normal, l.normal) <= 1e-12 &&
        std::abs(unique.back().offset - l.offset) <= eps) {
      continue;
    }
    unique.push_back(l);
  }

  std::vector<std::vector<Vec2>> polys{
      {box_lo, Vec2{box_hi.x, box_lo.y}, box_hi, Vec2{box_lo.x, box_hi.y}}};
  for (const Line& l : unique) cut_polygons(polys, l, eps);

  std::vector<Triangle> seeds = triangulate(polys, 1e-14 * span * span);
  std::vector<int> near;
  std::erase_if(seeds, [&](const Triangle& t) {
    elements_within(mesh, t, radius, near);
    return near.empty();
  });
  return seeds;
}

std::vector<Triangle> triangulate(const std::vector<std::vector<Vec2>>& polys, double min_area) {
  std::vector<Triangle> out;
  for (const auto& poly : polys) {
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
      const Triangle t{poly[0], poly[i], poly[i + 1]};
      if (triangle_area(t) > min_area) out.push_back(t);
    }
  }
  return out;
}

namespace {

void refine_uniform(const Triangle& t, int r, std::vector<Triangle>& out) {
  auto p = [&](int i, int j) {
    return t[0] + (static_cast<double>(i) / r) * (t[1] - t[0]) + (static_cast<double>(j) / r) * (t[2] - t[0]);
  };
  for (int j = 0; j < r; ++j) {
    for (int i = 0; i + j < r; ++i) {
      out.push_back({p(i, j), p(i + 1, j), p(i, j + 1)});
      if (i + j + 1 < r) out.push_back({p(i + 1, j), p(i + 1, j + 1), p(i, j + 1)});
    }
  }
}

}  // namespace

std::vector<Triangle> element_seeds(const Mesh& mesh, int e, double offset, int refinement) {
  const Triangle tri = mesh.triangle(e);
  std::vector<int> near;
  elements_within(mesh, tri, offset, near);
  std::vector<Line> lines;
  for (int o : near) {
    const Triangle t = mesh.triangle(o);
    for (int k = 0; k < 3; ++k) {
      const Vec2 ed = t[(k + 1) % 3] - t[k];
      const Vec2 n = (1.0 / norm(ed)) * Vec2{ed.y, -ed.x};
      lines.push_back({n, dot(n, t[k]) + offset});
      lines.push_back({n, dot(n, t[k]) - offset});
    }
  }
  std::vector<std::vector<Vec2>> polys{{tri[0], tri[1], tri[2]}};
  const double eps = 1e-12 * mesh.h_global();
  for (const Line& l : lines) cut_polygons(polys, l, eps);
  std::vector<Triangle> pieces = triangulate(polys);
  if (refinement <= 1) return pieces;
  std::vector<Triangle> out;
  for (const Triangle& t : pieces) {
    bool touches = false;
    for (const Line& l : lines) {
      for (const Vec2& v : t) touches = touches || std::abs(dot(l.normal, v) - l.offset) <= eps;
    }
    if (touches) {
      refine_uniform(t, refinement, out);
    } else {
      out.push_back(t);
    }
  }
  return out;
}

}  // namespace dgavg::detail
