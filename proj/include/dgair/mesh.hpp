#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace dgair {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool operator==(const Rect&) const = default;
};

/// Row-major 2x2 matrix.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  Point apply(Point p) const { return {a11 * p.x + a12 * p.y, a21 * p.x + a22 * p.y}; }
  Mat2 transposed() const { return {a11, a21, a12, a22}; }
  double det() const { return a11 * a22 - a12 * a21; }
};

/// Triangle with its affine map F(r) = v0 + J r from the reference triangle
/// {(0,0), (1,0), (0,1)}. Vertices are counter-clockwise so det(J) > 0.
struct Triangle {
  std::array<int, 3> v{};
  double area = 0.0;
  Mat2 jacobian;
  Mat2 inv_jacobian_t;
  double det = 0.0;
};

enum class EdgeKind { interior, boundary };

inline constexpr int kNoElement = -1;

/// Edge shared by element_1 and element_2 (kNoElement on the boundary). The
/// unit normal points from element_1 into element_2, or outward on the boundary.
struct Edge {
  std::array<int, 2> v{};
  int element_1 = kNoElement;
  int element_2 = kNoElement;
  Point normal;
  double length = 0.0;
  EdgeKind kind = EdgeKind::boundary;

  bool is_boundary() const { return kind == EdgeKind::boundary; }
};

/// Conforming triangulation of a rectangle. Immutable after construction.
class Mesh {
 public:
  /// Builds triangles' affine data and the edge list. Triangles with
  /// clockwise vertex order are reoriented; degenerate ones are rejected.
  Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles, Rect domain);

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// Edge indices of each triangle, in the order (v0v1, v1v2, v2v0).
  const std::array<int, 3>& triangle_edges(std::size_t t) const { return triangle_edges_[t]; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_interior_edges() const;
  std::size_t num_boundary_edges() const { return num_edges() - num_interior_edges(); }

  double h_max() const { return h_max_; }
  double h_min() const { return h_min_; }
  const Rect& domain() const { return domain_; }

  /// Copy of this mesh with the listed interior edges re-oriented: element
  /// roles swapped and normal negated. Boundary edges in the list are ignored.
  Mesh with_flipped_edges(std::span<const std::size_t> edge_ids) const;

 private:
  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  Rect domain_;
  double h_max_ = 0.0;
  double h_min_ = 0.0;
};

/// nx-by-ny grid of cells, each split into two triangles along the
/// lower-left to upper-right diagonal.
Mesh build_uniform_mesh(int nx, int ny, const Rect& domain = {});

/// Red refinement: every triangle split into four through its edge midpoints.
Mesh refine_uniform(const Mesh& mesh);

/// A point on an edge seen from both adjacent elements. For boundary edges
/// ref_2 equals ref_1 and has no meaning.
struct EdgeTracePoint {
  double s = 0.0;  ///< arclength fraction along v[0] -> v[1]
  Point physical;
  Point ref_1;
  Point ref_2;
};

/// Common parameterization of an edge: s in [0, 1] maps to the same physical
/// point from both sides.
std::vector<EdgeTracePoint> edge_trace_frames(const Mesh& mesh, const Edge& edge,
                                              std::span<const double> params);

Point map_to_physical(const Mesh& mesh, std::size_t element, Point ref);
Point map_to_reference(const Mesh& mesh, std::size_t element, Point physical);
/// Physical gradient from a reference gradient: J^{-T} g.
Point pull_back_gradient(const Mesh& mesh, std::size_t element, Point ref_grad);

}  // namespace dgair
