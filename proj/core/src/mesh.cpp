#include <dgavg/errors.hpp>
#include <dgavg/mesh.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

namespace dgavg {

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> elements)
    : vertices_(std::move(vertices)), elements_(std::move(elements)) {
  if (vertices_.empty() || elements_.empty()) throw TopologyError("mesh has no elements");
  const int nv = static_cast<int>(vertices_.size());
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    auto& el = elements_[e];
    for (int v : el) {
      if (v < 0 || v >= nv) {
        throw TopologyError("element " + std::to_string(e) + " references vertex " +
                            std::to_string(v) + " outside [0, " + std::to_string(nv) + ")");
      }
    }
    if (el[0] == el[1] || el[1] == el[2] || el[0] == el[2]) {
      throw TopologyError("element " + std::to_string(e) + " repeats a vertex");
    }
    const double o = orient2d(vertices_[el[0]], vertices_[el[1]], vertices_[el[2]]);
    if (o < 0.0) std::swap(el[1], el[2]);
    if (std::abs(o) <= 1e-14) throw TopologyError("element " + std::to_string(e) + " is degenerate");
  }

  bbox_ = {vertices_.front(), vertices_.front()};
  for (const Vec2& v : vertices_) {
    bbox_[0] = {std::min(bbox_[0].x, v.x), std::min(bbox_[0].y, v.y)};
    bbox_[1] = {std::max(bbox_[1].x, v.x), std::max(bbox_[1].y, v.y)};
  }

  build_faces();

  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const Triangle t = triangle(static_cast<int>(e));
    const double a = distance(t[1], t[2]);
    const double b = distance(t[2], t[0]);
    const double c = distance(t[0], t[1]);
    const double area = triangle_area(t);
    const double circumradius = a * b * c / (4.0 * area);
    const double inradius = area / (0.5 * (a + b + c));
    shape_regularity_ = std::max(shape_regularity_, circumradius / inradius);
  }

  build_grid();
}

void Mesh::build_faces() {
  std::map<std::pair<int, int>, int> lookup;
  element_to_faces_.assign(elements_.size(), {-1, -1, -1});
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const auto& el = elements_[e];
    for (int local = 0; local < 3; ++local) {
      const int a = el[local];
      const int b = el[(local + 1) % 3];
      const auto key = std::minmax(a, b);
      auto it = lookup.find(key);
      if (it == lookup.end()) {
        Face f;
        f.vertices = {a, b};
        f.plus_element = static_cast<int>(e);
        const Vec2 pa = vertices_[a];
        const Vec2 pb = vertices_[b];
        f.diameter = distance(pa, pb);
        // edge a->b is traversed counterclockwise, so the outward normal is on the right
        const Vec2 d = pb - pa;
        f.unit_normal = Vec2{d.y, -d.x} * (1.0 / f.diameter);
        lookup.emplace(key, static_cast<int>(faces_.size()));
        element_to_faces_[e][local] = static_cast<int>(faces_.size());
        faces_.push_back(f);
      } else {
        Face& f = faces_[it->second];
        if (f.minus_element != kBoundary) {
          throw TopologyError("face (" + std::to_string(key.first) + ", " +
                              std::to_string(key.second) + ") is shared by more than 2 elements");
        }
        f.minus_element = static_cast<int>(e);
        element_to_faces_[e][local] = it->second;
      }
    }
  }
  for (const Face& f : faces_) h_global_ = std::max(h_global_, f.diameter);
  for (const Face& f : faces_) {
    if (f.diameter < 0.25 * h_global_) {
      throw TopologyError("face (" + std::to_string(f.vertices[0]) + ", " +
                          std::to_string(f.vertices[1]) +
                          ") violates quasi-uniformity: diameter below h_global/4");
    }
  }
}

void Mesh::build_grid() {
  const double wx = std::max(bbox_[1].x - bbox_[0].x, 1e-12);
  const double wy = std::max(bbox_[1].y - bbox_[0].y, 1e-12);
  const int per_side = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(elements_.size()) / 2.0)));
  grid_nx_ = per_side;
  grid_ny_ = per_side;
  cell_w_ = wx / grid_nx_;
  cell_h_ = wy / grid_ny_;
  cell_elements_.assign(static_cast<std::size_t>(grid_nx_) * grid_ny_, {});
  cell_faces_.assign(cell_elements_.size(), {});

  auto cell_range = [&](double lo, double hi, double origin, double w, int n) {
    int a = static_cast<int>(std::floor((lo - origin) / w));
    int b = static_cast<int>(std::floor((hi - origin) / w));
    return std::pair{std::clamp(a, 0, n - 1), std::clamp(b, 0, n - 1)};
  };
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const Triangle t = triangle(static_cast<int>(e));
    const double x0 = std::min({t[0].x, t[1].x, t[2].x}), x1 = std::max({t[0].x, t[1].x, t[2].x});
    const double y0 = std::min({t[0].y, t[1].y, t[2].y}), y1 = std::max({t[0].y, t[1].y, t[2].y});
    auto [ia, ib] = cell_range(x0, x1, bbox_[0].x, cell_w_, grid_nx_);
    auto [ja, jb] = cell_range(y0, y1, bbox_[0].y, cell_h_, grid_ny_);
    for (int j = ja; j <= jb; ++j)
      for (int i = ia; i <= ib; ++i) cell_elements_[j * grid_nx_ + i].push_back(static_cast<int>(e));
  }
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Vec2 a = vertices_[faces_[f].vertices[0]];
    const Vec2 b = vertices_[faces_[f].vertices[1]];
    auto [ia, ib] = cell_range(std::min(a.x, b.x), std::max(a.x, b.x), bbox_[0].x, cell_w_, grid_nx_);
    auto [ja, jb] = cell_range(std::min(a.y, b.y), std::max(a.y, b.y), bbox_[0].y, cell_h_, grid_ny_);
    for (int j = ja; j <= jb; ++j)
      for (int i = ia; i <= ib; ++i) cell_faces_[j * grid_nx_ + i].push_back(static_cast<int>(f));
  }
}

template <class Fn>
void Mesh::visit_cells(const Vec2& p, double radius, Fn&& fn) const {
  if (p.x + radius < bbox_[0].x || p.x - radius > bbox_[1].x || p.y + radius < bbox_[0].y ||
      p.y - radius > bbox_[1].y) {
    return;
  }
  const int ia = std::clamp(static_cast<int>(std::floor((p.x - radius - bbox_[0].x) / cell_w_)), 0, grid_nx_ - 1);
  const int ib = std::clamp(static_cast<int>(std::floor((p.x + radius - bbox_[0].x) / cell_w_)), 0, grid_nx_ - 1);
  const int ja = std::clamp(static_cast<int>(std::floor((p.y - radius - bbox_[0].y) / cell_h_)), 0, grid_ny_ - 1);
  const int jb = std::clamp(static_cast<int>(std::floor((p.y + radius - bbox_[0].y) / cell_h_)), 0, grid_ny_ - 1);
  for (int j = ja; j <= jb; ++j)
    for (int i = ia; i <= ib; ++i) fn(j * grid_nx_ + i);
}

void Mesh::elements_near(const Vec2& p, double radius, std::vector<int>& out) const {
  out.clear();
  visit_cells(p, radius, [&](int c) {
    for (int e : cell_elements_[c]) out.push_back(e);
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::erase_if(out, [&](int e) { return point_triangle_distance(p, triangle(e)) > radius; });
}

void Mesh::faces_near(const Vec2& p, double radius, std::vector<int>& out) const {
  out.clear();
  visit_cells(p, radius, [&](int c) {
    for (int f : cell_faces_[c]) out.push_back(f);
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::erase_if(out, [&](int f) {
    return point_segment_distance(p, vertices_[faces_[f].vertices[0]],
                                  vertices_[faces_[f].vertices[1]]) > radius;
  });
}

int Mesh::locate(const Vec2& p) const {
  int found = -1;
  visit_cells(p, 0.0, [&](int c) {
    for (int e : cell_elements_[c]) {
      if (found < 0 && point_in_triangle(p, triangle(e))) found = e;
    }
  });
  return found;
}

Triangle Mesh::triangle(int e) const {
  const auto& el = elements_.at(e);
  return {vertices_[el[0]], vertices_[el[1]], vertices_[el[2]]};
}

double Mesh::element_area(int e) const { return triangle_area(triangle(e)); }

Mesh build_structured_unit_square(int n) {
  if (n < 1) throw std::invalid_argument("build_structured_unit_square: n must be >= 1");
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
  std::vector<std::array<int, 3>> elements;
  elements.reserve(2 * static_cast<std::size_t>(n) * n);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      elements.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return Mesh(std::move(vertices), std::move(elements));
}

namespace {

double parse_double(std::string_view tok, int line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("expected a number, got '" + std::string(tok) + "'", line);
  }
  return v;
}

long parse_int(std::string_view tok, int line) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("expected an integer, got '" + std::string(tok) + "'", line);
  }
  return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

Mesh load_mesh(std::string_view text) {
  // collect non-comment, non-blank lines with their 1-based numbers
  std::vector<std::pair<int, std::vector<std::string_view>>> lines;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++lineno;
    std::string_view line = text.substr(pos, end - pos);
    auto toks = split_ws(line);
    if (!toks.empty() && toks.front().front() != '#') lines.emplace_back(lineno, std::move(toks));
    pos = end + 1;
  }

  std::size_t cursor = 0;
  auto header = [&](std::string_view keyword) -> long {
    if (cursor >= lines.size()) throw ParseError("missing '" + std::string(keyword) + "' header", lineno);
    const auto& [ln, toks] = lines[cursor++];
    if (toks.size() != 2 || toks[0] != keyword) {
      throw ParseError("expected '" + std::string(keyword) + " <count>'", ln);
    }
    const long count = parse_int(toks[1], ln);
    if (count < 0) throw ParseError("negative count", ln);
    return count;
  };

  const long nv = header("vertices");
  std::vector<Vec2> vertices;
  for (long i = 0; i < nv; ++i) {
    if (cursor >= lines.size()) throw ParseError("unexpected end of file in vertex block", lineno);
    const auto& [ln, toks] = lines[cursor++];
    if (toks.size() != 2) throw ParseError("vertex line needs 2 coordinates", ln);
    vertices.emplace_back(parse_double(toks[0], ln), parse_double(toks[1], ln));
  }
  const long ne = header("elements");
  std::vector<std::array<int, 3>> elements;
  for (long i = 0; i < ne; ++i) {
    if (cursor >= lines.size()) throw ParseError("unexpected end of file in element block", lineno);
    const auto& [ln, toks] = lines[cursor++];
    if (toks.size() != 3) throw ParseError("element line needs 3 vertex indices", ln);
    std::array<int, 3> el{};
    for (int k = 0; k < 3; ++k) {
      const long v = parse_int(toks[k], ln);
      if (v < 0 || v >= nv) {
        throw ParseError("vertex index " + std::to_string(v) + " out of range", ln);
      }
      el[k] = static_cast<int>(v);
    }
    elements.push_back(el);
  }
  if (cursor != lines.size()) throw ParseError("trailing content after element block", lines[cursor].first);
  return Mesh(std::move(vertices), std::move(elements));
}

Mesh load_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_mesh(ss.str());
}

std::string write_mesh(const Mesh& mesh) {
  std::ostringstream out;
  out.precision(17);
  out << "vertices " << mesh.vertices().size() << '\n';
  for (const Vec2& v : mesh.vertices()) out << v.x << ' ' << v.y << '\n';
  out << "elements " << mesh.elements().size() << '\n';
  for (const auto& el : mesh.elements()) out << el[0] << ' ' << el[1] << ' ' << el[2] << '\n';
  return out.str();
}

MeshMetrics mesh_metrics(const Mesh& mesh) {
  MeshMetrics m;
  m.h_global = mesh.h_global();
  m.min_face_diameter = mesh.faces().front().diameter;
  for (const Face& f : mesh.faces()) {
    m.min_face_diameter = std::min(m.min_face_diameter, f.diameter);
    if (f.is_boundary()) ++m.num_boundary_faces; else ++m.num_interior_faces;
  }
  m.shape_regularity = mesh.shape_regularity();
  m.num_vertices = mesh.vertices().size();
  m.num_elements = mesh.num_elements();
  m.num_faces = mesh.num_faces();
  return m;
}

}  // namespace dgavg
