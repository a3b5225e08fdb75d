#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dgair/assembly.hpp"
#include "dgair/error.hpp"
#include "dgair/mesh.hpp"
#include "dgair/model.hpp"
#include "dgair/quadrature.hpp"
#include "dgair/space.hpp"

using namespace dgair;

namespace {

void check_invariants(const Mesh& mesh) {
  for (const auto& tri : mesh.triangles()) CHECK(tri.area > 0.0);
  for (const auto& e : mesh.edges()) {
    CHECK(std::abs(std::hypot(e.normal.x, e.normal.y) - 1.0) <= 1e-14);
    const Point d = mesh.vertices()[e.v[1]] - mesh.vertices()[e.v[0]];
    CHECK(e.length == doctest::Approx(std::hypot(d.x, d.y)).epsilon(1e-15));
    CHECK(e.length > 0.0);
    CHECK(e.element_1 != kNoElement);
    if (e.is_boundary()) {
      CHECK(e.element_2 == kNoElement);
    } else {
      CHECK(e.element_2 != kNoElement);
      CHECK(e.element_1 < e.element_2);
    }
    // Normal points away from element_1.
    const auto& t1 = mesh.triangles()[static_cast<std::size_t>(e.element_1)];
    Point centroid{0.0, 0.0};
    for (int v : t1.v) centroid = centroid + (1.0 / 3.0) * mesh.vertices()[static_cast<std::size_t>(v)];
    const Point mid = 0.5 * (mesh.vertices()[e.v[0]] + mesh.vertices()[e.v[1]]);
    CHECK(dot(e.normal, mid - centroid) > 0.0);
  }
  const long euler = static_cast<long>(mesh.num_vertices()) - static_cast<long>(mesh.num_edges()) +
                     static_cast<long>(mesh.num_triangles()) + 1;
  CHECK(euler == 2);
  double area = 0.0;
  for (const auto& tri : mesh.triangles()) area += tri.area;
  CHECK(std::abs(area - mesh.domain().area()) <= 1e-12 * mesh.domain().area());
}

}  // namespace

TEST_CASE("uniform mesh counts") {
  const Mesh one = build_uniform_mesh(1, 1);
  CHECK(one.num_triangles() == 2);
  CHECK(one.num_vertices() == 4);
  CHECK(one.num_edges() == 5);
  CHECK(one.num_interior_edges() == 1);

  const Mesh two = build_uniform_mesh(2, 2);
  CHECK(two.num_triangles() == 8);
  CHECK(two.num_vertices() == 9);
  CHECK(two.num_edges() == 16);
  CHECK(two.num_interior_edges() == 8);

  for (int n : {1, 3, 8, 13}) {
    const Mesh m = build_uniform_mesh(n, n);
    CHECK(m.h_max() == doctest::Approx(std::sqrt(2.0) / n).epsilon(1e-15));
    check_invariants(m);
  }
  check_invariants(build_uniform_mesh(3, 5, {-1.0, 2.0, 0.5, 1.25}));
}

TEST_CASE("uniform mesh rejects bad input") {
  CHECK_THROWS_AS(build_uniform_mesh(0, 1), InvalidArgument);
  CHECK_THROWS_AS(build_uniform_mesh(2, -1), InvalidArgument);
  CHECK_THROWS_AS(build_uniform_mesh(2, 2, {0.0, 0.0, 0.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(build_uniform_mesh(2, 2, {0.0, 1.0, 1.0, 0.5}), InvalidArgument);
}

TEST_CASE("mesh constructor") {
  // Clockwise input is reoriented.
  const Mesh m({{0, 0}, {1, 0}, {0, 1}}, {{0, 2, 1}}, {});
  CHECK(m.triangles()[0].det > 0.0);
  CHECK_THROWS_AS(Mesh({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}, {}), InvalidArgument);
  CHECK_THROWS_AS(Mesh({{0, 0}, {1, 0}}, {{0, 1, 2}}, {}), InvalidArgument);
}

TEST_CASE("refine_uniform") {
  const Mesh coarse = build_uniform_mesh(1, 1);
  const Mesh fine = refine_uniform(coarse);
  CHECK(fine.num_triangles() == 8);
  check_invariants(fine);

  const Mesh m4 = build_uniform_mesh(4, 4);
  CHECK(m4.h_max() == doctest::Approx(std::sqrt(2.0) / 4));
  const Mesh r4 = refine_uniform(m4);
  CHECK(r4.h_max() == doctest::Approx(0.5 * m4.h_max()).epsilon(1e-15));

  // Interior edges under two refinements: each parent edge splits in two and
  // each triangle adds three interior edges.
  const Mesh r1 = refine_uniform(coarse);
  const Mesh r2 = refine_uniform(r1);
  for (const Mesh* m : {&r1, &r2}) check_invariants(*m);
  CHECK(r1.num_interior_edges() == 2 * coarse.num_interior_edges() + 3 * coarse.num_triangles());
  CHECK(r2.num_interior_edges() == 2 * r1.num_interior_edges() + 3 * r1.num_triangles());

  // Children lie in the closure of their parent: every child centroid and
  // vertex has nonnegative barycentric coordinates in some parent.
  for (const auto& child : r1.triangles()) {
    bool inside = false;
    for (std::size_t p = 0; p < coarse.num_triangles() && !inside; ++p) {
      bool all = true;
      for (int v : child.v) {
        const Point r = map_to_reference(coarse, p, r1.vertices()[static_cast<std::size_t>(v)]);
        all = all && r.x >= -1e-14 && r.y >= -1e-14 && r.x + r.y <= 1.0 + 1e-14;
      }
      inside = all;
    }
    CHECK(inside);
  }
  // Congruent children: equal areas.
  for (const auto& child : r1.triangles()) CHECK(child.area == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("edge trace frames") {
  const Mesh mesh = build_uniform_mesh(3, 2, {0.0, 1.5, -0.5, 0.5});
  const std::vector<double> mid{0.5};
  auto space = std::make_shared<const DGSpace>(std::make_shared<const Mesh>(mesh), 1);
  const auto rule = edge_quadrature(7);

  // Continuous affine function 2x - 3y + 1, projected exactly.
  const DGField affine = l2_project([](double x, double y) { return 2 * x - 3 * y + 1; }, space);
  for (const auto& e : mesh.edges()) {
    const auto frame = edge_trace_frames(mesh, e, mid)[0];
    const Point p1 = map_to_physical(mesh, static_cast<std::size_t>(e.element_1), frame.ref_1);
    CHECK(std::abs(p1.x - frame.physical.x) <= 1e-14);
    CHECK(std::abs(p1.y - frame.physical.y) <= 1e-14);
    if (e.is_boundary()) continue;
    const Point p2 = map_to_physical(mesh, static_cast<std::size_t>(e.element_2), frame.ref_2);
    CHECK(std::abs(p2.x - frame.physical.x) <= 1e-14);
    CHECK(std::abs(p2.y - frame.physical.y) <= 1e-14);

    for (const auto& tp : edge_trace_frames(mesh, e, rule.points)) {
      const double jump = eval_field(affine, static_cast<std::size_t>(e.element_1), tp.ref_1) -
                          eval_field(affine, static_cast<std::size_t>(e.element_2), tp.ref_2);
      CHECK(std::abs(jump) <= 1e-13);
    }

    // Indicator of element_1 jumps by exactly 1.
    DGField indicator(space);
    indicator.local(static_cast<std::size_t>(e.element_1))(0) = 1.0;
    for (const auto& tp : edge_trace_frames(mesh, e, rule.points)) {
      const double jump = eval_field(indicator, static_cast<std::size_t>(e.element_1), tp.ref_1) -
                          eval_field(indicator, static_cast<std::size_t>(e.element_2), tp.ref_2);
      CHECK(jump == 1.0);
    }
  }
}

TEST_CASE("edge re-orientation leaves operators unchanged") {
  auto mesh = std::make_shared<const Mesh>(build_uniform_mesh(3, 3));
  std::mt19937_64 rng(7);
  std::vector<std::size_t> flip;
  for (std::size_t e = 0; e < mesh->num_edges(); ++e)
    if (!mesh->edges()[e].is_boundary() && rng() % 2 == 0) flip.push_back(e);
  REQUIRE(!flip.empty());
  auto flipped = std::make_shared<const Mesh>(mesh->with_flipped_edges(flip));
  for (std::size_t e : flip) {
    CHECK(flipped->edges()[e].element_1 == mesh->edges()[e].element_2);
    CHECK(flipped->edges()[e].normal.x == -mesh->edges()[e].normal.x);
  }

  ProblemSpec spec = make_preset("smooth-mms");
  spec.kx = expr::parse("1 + x*y");
  spec.c = expr::parse("1 + 0.5*y");
  for (int k : {0, 1, 2}) {
    const DGSpace a(mesh, k), b(flipped, k);
    for (Scheme s : {Scheme::sipg, Scheme::iipg, Scheme::nipg}) {
      const auto pen = PenaltyConfig::for_scheme(s, k);
      const Eigen::MatrixXd da = assemble_diffusion(a, spec, pen).to_dense();
      const Eigen::MatrixXd db = assemble_diffusion(b, spec, pen).to_dense();
      CHECK((da - db).cwiseAbs().maxCoeff() <= 1e-13 * da.cwiseAbs().maxCoeff());
    }
    const Eigen::MatrixXd ca = assemble_convection(a, spec).to_dense();
    const Eigen::MatrixXd cb = assemble_convection(b, spec).to_dense();
    CHECK((ca - cb).cwiseAbs().maxCoeff() <= 1e-13 * ca.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("affine maps") {
  const Mesh mesh = build_uniform_mesh(2, 2);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const Point p0 = map_to_physical(mesh, t, {0.0, 0.0});
    CHECK(p0.x == mesh.vertices()[static_cast<std::size_t>(tri.v[0])].x);
    CHECK(p0.y == mesh.vertices()[static_cast<std::size_t>(tri.v[0])].y);
    const Point r = map_to_reference(mesh, t, map_to_physical(mesh, t, {0.3, 0.2}));
    CHECK(r.x == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(r.y == doctest::Approx(0.2).epsilon(1e-14));
  }
  const Mesh ref({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, {});
  const Point g = pull_back_gradient(ref, 0, {1.0, 0.0});
  CHECK(g.x == 1.0);
  CHECK(g.y == 0.0);
  const Mesh scaled({{0, 0}, {2, 0}, {0, 2}}, {{0, 1, 2}}, {0, 2, 0, 2});
  const Point h = pull_back_gradient(scaled, 0, {0.6, -0.8});
  CHECK(h.x == doctest::Approx(0.3));
  CHECK(h.y == doctest::Approx(-0.4));
}
