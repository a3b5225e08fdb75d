#include "dgair/norms.hpp"

#include <cmath>

#include "dgair/error.hpp"

namespace dgair {

namespace {

// Sum over edges of sigma_e / |e|^beta0 ||[U]||^2 using the edge rule.
double jump_energy(const DGField& field, const PenaltyConfig& penalty, EdgeSet edges) {
  const auto& space = *field.space;
  const auto& mesh = space.mesh();
  const auto& rule = space.edge_rule();
  double sum = 0.0;
  for (std::size_t ei = 0; ei < mesh.num_edges(); ++ei) {
    const Edge& edge = mesh.edges()[ei];
    if (edges == EdgeSet::interior && edge.is_boundary()) continue;
    const auto frames = edge_trace_frames(mesh, edge, rule.points);
    double integral = 0.0;
    for (std::size_t q = 0; q < frames.size(); ++q) {
      double jump = eval_field(field, static_cast<std::size_t>(edge.element_1), frames[q].ref_1);
      if (!edge.is_boundary()) jump -= eval_field(field, static_cast<std::size_t>(edge.element_2), frames[q].ref_2);
      integral += rule.weights[q] * edge.length * jump * jump;
    }
    sum += penalty.sigma(ei) / std::pow(edge.length, penalty.beta0) * integral;
  }
  return sum;
}

}  // namespace

double l2_norm(const DGField& field) {
  const auto& space = *field.space;
  const auto& rule = space.volume_rule();
  double sum = 0.0;
  for (std::size_t el = 0; el < space.num_elements(); ++el) {
    const Eigen::VectorXd uq = space.basis_values() * field.local(el);
    const double det = space.mesh().triangles()[el].det;
    for (std::size_t q = 0; q < rule.points.size(); ++q) sum += rule.weights[q] * det * uq[static_cast<Eigen::Index>(q)] * uq[static_cast<Eigen::Index>(q)];
  }
  return std::sqrt(sum);
}

double total_mass(const DGField& field) {
  const auto& space = *field.space;
  const auto& rule = space.volume_rule();
  double sum = 0.0;
  for (std::size_t el = 0; el < space.num_elements(); ++el) {
    const Eigen::VectorXd uq = space.basis_values() * field.local(el);
    const double det = space.mesh().triangles()[el].det;
    for (std::size_t q = 0; q < rule.points.size(); ++q) sum += rule.weights[q] * det * uq[static_cast<Eigen::Index>(q)];
  }
  return sum;
}

double l2_error(const DGField& field, const expr::ExprPtr& exact, double t) {
  const auto& space = *field.space;
  const auto& rule = space.volume_rule();
  const expr::CompiledExpr u(exact);
  double sum = 0.0;
  for (std::size_t el = 0; el < space.num_elements(); ++el) {
    const Eigen::VectorXd uq = space.basis_values() * field.local(el);
    const double det = space.mesh().triangles()[el].det;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point p = map_to_physical(space.mesh(), el, rule.points[q]);
      const double d = uq[static_cast<Eigen::Index>(q)] - u(p.x, p.y, t, 0.0);
      sum += rule.weights[q] * det * d * d;
    }
  }
  return std::sqrt(sum);
}

double energy_seminorm(const DGField& field, const ProblemSpec& spec, const PenaltyConfig& penalty, EdgeSet edges) {
  const auto& space = *field.space;
  const auto& rule = space.volume_rule();
  const expr::CompiledExpr kx(spec.kx), ky(spec.ky);
  double sum = 0.0;
  for (std::size_t el = 0; el < space.num_elements(); ++el) {
    const Mat2& g = space.mesh().triangles()[el].inv_jacobian_t;
    const Eigen::VectorXd rx = space.basis_ref_dx() * field.local(el);
    const Eigen::VectorXd ry = space.basis_ref_dy() * field.local(el);
    const double det = space.mesh().triangles()[el].det;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto qi = static_cast<Eigen::Index>(q);
      const Point grad = g.apply({rx[qi], ry[qi]});
      const Point p = map_to_physical(space.mesh(), el, rule.points[q]);
      sum += rule.weights[q] * det * (kx(p.x, p.y, 0.0, 0.0) * grad.x * grad.x + ky(p.x, p.y, 0.0, 0.0) * grad.y * grad.y);
    }
  }
  return std::sqrt(sum + jump_energy(field, penalty, edges));
}

double energy_error(const DGField& field, const ExactSolution& exact, double t, const ProblemSpec& spec,
                    const PenaltyConfig& penalty, EdgeSet edges) {
  const auto& space = *field.space;
  const auto& rule = space.volume_rule();
  const expr::CompiledExpr kx(spec.kx), ky(spec.ky), ux(exact.u_x), uy(exact.u_y);
  double sum = 0.0;
  for (std::size_t el = 0; el < space.num_elements(); ++el) {
    const Mat2& g = space.mesh().triangles()[el].inv_jacobian_t;
    const Eigen::VectorXd rx = space.basis_ref_dx() * field.local(el);
    const Eigen::VectorXd ry = space.basis_ref_dy() * field.local(el);
    const double det = space.mesh().triangles()[el].det;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto qi = static_cast<Eigen::Index>(q);
      const Point grad = g.apply({rx[qi], ry[qi]});
      const Point p = map_to_physical(space.mesh(), el, rule.points[q]);
      const double dx = grad.x - ux(p.x, p.y, t, 0.0);
      const double dy = grad.y - uy(p.x, p.y, t, 0.0);
      sum += rule.weights[q] * det * (kx(p.x, p.y, 0.0, 0.0) * dx * dx + ky(p.x, p.y, 0.0, 0.0) * dy * dy);
    }
  }
  return std::sqrt(sum + jump_energy(field, penalty, edges));
}

}  // namespace dgair
