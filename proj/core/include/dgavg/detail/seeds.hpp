#pragma once

// Geometric helpers shared by the adaptive integrators of averaged
// quantities: distances between simplices and cut-cell seed generation.

#include <dgavg/geometry.hpp>
#include <dgavg/mesh.hpp>

#include <vector>

namespace dgavg::detail {

struct Line {
  Vec2 normal;    // unit
  double offset;  // points x with normal · x = offset
};

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);
double segment_triangle_distance(const Vec2& a, const Vec2& b, const Triangle& t);
double triangle_distance(const Triangle& s, const Triangle& t);

/// Elements whose distance to `region` is below `reach`.
void elements_within(const Mesh& mesh, const Triangle& region, double reach, std::vector<int>& out);

/// Splits every convex polygon crossed by the line into its two halves.
void cut_polygons(std::vector<std::vector<Vec2>>& polys, const Line& line, double eps);

/// Fan triangulation of convex polygons, dropping slivers below min_area.
std::vector<Triangle> triangulate(const std::vector<std::vector<Vec2>>& polys, double min_area = 0.0);

/// Background cells covering Ω_h = {d(x, Ω) < radius}: a grid over the
/// enlarged bounding box cut along all lines at distance `radius` from a
/// face line. Cells farther than `radius` from the mesh are dropped.
std::vector<Triangle> background_seeds(const Mesh& mesh, double radius, int resolution);

/// Element e cut along the lines at distance `offset` from the edge lines of
/// all elements within `offset`. Pieces meeting such a line are further split
/// uniformly into refinement^2 triangles.
std::vector<Triangle> element_seeds(const Mesh& mesh, int e, double offset, int refinement = 1);

}  // namespace dgavg::detail
