#pragma once

#include <dgavg/geometry.hpp>

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dgavg {

inline constexpr int kBoundary = -1;

struct Face {
  std::array<int, 2> vertices{};
  int plus_element = -1;
  int minus_element = kBoundary;
  Vec2 unit_normal;  // outward from plus_element
  double diameter = 0.0;

  bool is_boundary() const noexcept { return minus_element == kBoundary; }
};

struct MeshMetrics {
  double h_global = 0.0;
  double min_face_diameter = 0.0;
  double shape_regularity = 0.0;  // max circumradius / inradius
  std::size_t num_vertices = 0;
  std::size_t num_elements = 0;
  std::size_t num_faces = 0;
  std::size_t num_boundary_faces = 0;
  std::size_t num_interior_faces = 0;
};

/// Conforming 2D triangulation with reconstructed face topology. Immutable
/// after construction.
class Mesh {
 public:
  /// Builds faces and adjacency; clockwise triangles are reoriented.
  /// Throws TopologyError on degenerate elements, non-manifold faces, or a
  /// mesh that is not quasi-uniform (a face shorter than h_global / 4).
  Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> elements);

  const std::vector<Vec2>& vertices() const noexcept { return vertices_; }
  const std::vector<std::array<int, 3>>& elements() const noexcept { return elements_; }
  const std::vector<Face>& faces() const noexcept { return faces_; }
  const std::array<int, 3>& element_faces(int e) const { return element_to_faces_.at(e); }

  std::size_t num_elements() const noexcept { return elements_.size(); }
  std::size_t num_faces() const noexcept { return faces_.size(); }

  Triangle triangle(int e) const;
  double element_area(int e) const;
  double h_global() const noexcept { return h_global_; }
  double shape_regularity() const noexcept { return shape_regularity_; }

  /// Axis-aligned bounding box of all vertices, as (min, max).
  std::array<Vec2, 2> bounding_box() const noexcept { return bbox_; }

  /// Elements whose closure lies within `radius` of `p`. Uses a bucket grid.
  void elements_near(const Vec2& p, double radius, std::vector<int>& out) const;
  /// Faces whose closed segment lies within `radius` of `p`.
  void faces_near(const Vec2& p, double radius, std::vector<int>& out) const;
  /// Element containing p (closure), or -1.
  int locate(const Vec2& p) const;

 private:
  void build_faces();
  void build_grid();
  template <class Fn>
  void visit_cells(const Vec2& p, double radius, Fn&& fn) const;

  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> elements_;
  std::vector<Face> faces_;
  std::vector<std::array<int, 3>> element_to_faces_;
  double h_global_ = 0.0;
  double shape_regularity_ = 0.0;
  std::array<Vec2, 2> bbox_{};

  // bucket grid over the bounding box; each cell lists overlapping elements
  int grid_nx_ = 1;
  int grid_ny_ = 1;
  double cell_w_ = 1.0;
  double cell_h_ = 1.0;
  std::vector<std::vector<int>> cell_elements_;
  std::vector<std::vector<int>> cell_faces_;
};

/// Unit square split into n x n cells, each cut along the lower-left to
/// upper-right diagonal.
Mesh build_structured_unit_square(int n);

/// Parses the plain-text mesh format (`vertices V`, V coordinate lines,
/// `elements T`, T index triples; `#` comments).
Mesh load_mesh(std::string_view text);
Mesh load_mesh_file(const std::string& path);
std::string write_mesh(const Mesh& mesh);

MeshMetrics mesh_metrics(const Mesh& mesh);

}  // namespace dgavg
