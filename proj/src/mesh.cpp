#include "dgair/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "dgair/error.hpp"

namespace dgair {

namespace {

Triangle make_triangle(const std::vector<Point>& vertices, std::array<int, 3> idx) {
  Point p0 = vertices[idx[0]];
  Point p1 = vertices[idx[1]];
  Point p2 = vertices[idx[2]];
  Triangle tri;
  tri.v = idx;
  tri.jacobian = {p1.x - p0.x, p2.x - p0.x, p1.y - p0.y, p2.y - p0.y};
  tri.det = tri.jacobian.det();
  if (tri.det < 0.0) {
    std::swap(tri.v[1], tri.v[2]);
    std::swap(p1, p2);
    tri.jacobian = {p1.x - p0.x, p2.x - p0.x, p1.y - p0.y, p2.y - p0.y};
    tri.det = tri.jacobian.det();
  }
  if (!(tri.det > 0.0)) throw InvalidArgument("degenerate triangle");
  const Mat2& j = tri.jacobian;
  // J^{-T} = (1/det) [[a22, -a21], [-a12, a11]]
  tri.inv_jacobian_t = {j.a22 / tri.det, -j.a21 / tri.det, -j.a12 / tri.det, j.a11 / tri.det};
  tri.area = 0.5 * tri.det;
  return tri;
}

}  // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles, Rect domain)
    : vertices_(std::move(vertices)), domain_(domain) {
  if (triangles.empty()) throw InvalidArgument("mesh has no triangles");
  triangles_.reserve(triangles.size());
  for (const auto& t : triangles) {
    for (int v : t) {
      if (v < 0 || static_cast<std::size_t>(v) >= vertices_.size())
        throw InvalidArgument("triangle references a missing vertex");
    }
    triangles_.push_back(make_triangle(vertices_, t));
  }

  // Sorted vertex pair -> edge index. Triangles are visited in index order,
  // so the first owner of an edge is the smaller-index element.
  std::map<std::pair<int, int>, int> lookup;
  triangle_edges_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int j = 0; j < 3; ++j) {
      const int a = tri.v[j];
      const int b = tri.v[(j + 1) % 3];
      const auto key = std::minmax(a, b);
      auto it = lookup.find(key);
      if (it == lookup.end()) {
        Edge e;
        e.v = {a, b};
        e.element_1 = static_cast<int>(t);
        const Point d = vertices_[b] - vertices_[a];
        e.length = std::hypot(d.x, d.y);
        if (!(e.length > 0.0)) throw InvalidArgument("zero-length edge");
        // Counter-clockwise traversal of element_1: outward normal is (dy, -dx).
        e.normal = {d.y / e.length, -d.x / e.length};
        lookup.emplace(key, static_cast<int>(edges_.size()));
        triangle_edges_[t][j] = static_cast<int>(edges_.size());
        edges_.push_back(e);
      } else {
        Edge& e = edges_[it->second];
        if (e.element_2 != kNoElement) throw InvalidArgument("edge shared by more than two triangles");
        e.element_2 = static_cast<int>(t);
        e.kind = EdgeKind::interior;
        triangle_edges_[t][j] = it->second;
      }
    }
  }

  h_max_ = 0.0;
  h_min_ = std::numeric_limits<double>::infinity();
  for (const auto& e : edges_) {
    h_max_ = std::max(h_max_, e.length);
    h_min_ = std::min(h_min_, e.length);
  }
}

std::size_t Mesh::num_interior_edges() const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return !e.is_boundary(); }));
}

Mesh Mesh::with_flipped_edges(std::span<const std::size_t> edge_ids) const {
  Mesh copy = *this;
  for (std::size_t id : edge_ids) {
    if (id >= copy.edges_.size()) throw InvalidArgument("edge index out of range");
    Edge& e = copy.edges_[id];
    if (e.is_boundary()) continue;
    std::swap(e.element_1, e.element_2);
    e.normal = -1.0 * e.normal;
  }
  return copy;
}

Mesh build_uniform_mesh(int nx, int ny, const Rect& domain) {
  if (nx < 1 || ny < 1) throw InvalidArgument("cell counts must be positive");
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
    throw InvalidArgument("domain rectangle must have positive width and height");

  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    const double y = (j == ny) ? domain.y1 : domain.y0 + domain.height() * j / ny;
    for (int i = 0; i <= nx; ++i) {
      const double x = (i == nx) ? domain.x1 : domain.x0 + domain.width() * i / nx;
      vertices.push_back({x, y});
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };

  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return Mesh(std::move(vertices), std::move(triangles), domain);
}

Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Point> vertices = mesh.vertices();
  // One midpoint vertex per parent edge.
  std::vector<int> midpoint(mesh.num_edges());
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const auto& edge = mesh.edges()[e];
    const Point a = mesh.vertices()[edge.v[0]];
    const Point b = mesh.vertices()[edge.v[1]];
    midpoint[e] = static_cast<int>(vertices.size());
    vertices.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
  }

  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(4 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangles()[t].v;
    const auto& te = mesh.triangle_edges(t);
    const int m01 = midpoint[te[0]];
    const int m12 = midpoint[te[1]];
    const int m20 = midpoint[te[2]];
    triangles.push_back({v[0], m01, m20});
    triangles.push_back({m01, v[1], m12});
    triangles.push_back({m20, m12, v[2]});
    triangles.push_back({m01, m12, m20});
  }
  return Mesh(std::move(vertices), std::move(triangles), mesh.domain());
}

Point map_to_physical(const Mesh& mesh, std::size_t element, Point ref) {
  const auto& tri = mesh.triangles().at(element);
  return mesh.vertices()[tri.v[0]] + tri.jacobian.apply(ref);
}

Point map_to_reference(const Mesh& mesh, std::size_t element, Point physical) {
  const auto& tri = mesh.triangles().at(element);
  // J^{-1} = (J^{-T})^T
  return tri.inv_jacobian_t.transposed().apply(physical - mesh.vertices()[tri.v[0]]);
}

Point pull_back_gradient(const Mesh& mesh, std::size_t element, Point ref_grad) {
  return mesh.triangles().at(element).inv_jacobian_t.apply(ref_grad);
}

std::vector<EdgeTracePoint> edge_trace_frames(const Mesh& mesh, const Edge& edge,
                                              std::span<const double> params) {
  const Point a = mesh.vertices()[edge.v[0]];
  const Point b = mesh.vertices()[edge.v[1]];
  std::vector<EdgeTracePoint> out;
  out.reserve(params.size());
  for (double s : params) {
    EdgeTracePoint p;
    p.s = s;
    p.physical = a + s * (b - a);
    p.ref_1 = map_to_reference(mesh, static_cast<std::size_t>(edge.element_1), p.physical);
    p.ref_2 = edge.is_boundary()
                  ? p.ref_1
                  : map_to_reference(mesh, static_cast<std::size_t>(edge.element_2), p.physical);
    out.push_back(p);
  }
  return out;
}

}  // namespace dgair
