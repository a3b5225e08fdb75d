#include "dgair/assembly.hpp"

#include <cmath>

#include "dgair/error.hpp"

namespace dgair {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Basis values and physical gradients of one element at a set of points,
/// one row per point.
struct Trace {
  MatrixXd values, dx, dy;
};

Trace volume_trace(const DGSpace& space, std::size_t element) {
  const Mat2& g = space.mesh().triangles()[element].inv_jacobian_t;
  Trace t;
  t.values = space.basis_values();
  t.dx = g.a11 * space.basis_ref_dx() + g.a12 * space.basis_ref_dy();
  t.dy = g.a21 * space.basis_ref_dx() + g.a22 * space.basis_ref_dy();
  return t;
}

struct EdgeGeometry {
  std::vector<EdgeTracePoint> points;
  std::vector<double> weights;  // already scaled by |e|
  Trace side[2];
};

EdgeGeometry edge_geometry(const DGSpace& space, const Edge& edge) {
  const auto& rule = space.edge_rule();
  EdgeGeometry g;
  g.points = edge_trace_frames(space.mesh(), edge, rule.points);
  g.weights.resize(rule.weights.size());
  for (std::size_t q = 0; q < rule.weights.size(); ++q) g.weights[q] = rule.weights[q] * edge.length;

  const int n = space.n_loc();
  const auto nq = static_cast<Eigen::Index>(rule.points.size());
  const int sides = edge.is_boundary() ? 1 : 2;
  VectorXd v(n), rx(n), ry(n);
  for (int s = 0; s < sides; ++s) {
    const auto element = static_cast<std::size_t>(s == 0 ? edge.element_1 : edge.element_2);
    const Mat2& jt = space.mesh().triangles()[element].inv_jacobian_t;
    Trace& t = g.side[s];
    t.values.resize(nq, n);
    t.dx.resize(nq, n);
    t.dy.resize(nq, n);
    for (Eigen::Index q = 0; q < nq; ++q) {
      const Point ref = s == 0 ? g.points[q].ref_1 : g.points[q].ref_2;
      space.eval_basis(ref, v, rx, ry);
      t.values.row(q) = v.transpose();
      t.dx.row(q) = (jt.a11 * rx + jt.a12 * ry).transpose();
      t.dy.row(q) = (jt.a21 * rx + jt.a22 * ry).transpose();
    }
  }
  return g;
}

int edge_element(const Edge& e, int side) { return side == 0 ? e.element_1 : e.element_2; }

void push_block(std::vector<Triplet>& trips, std::size_t row0, std::size_t col0, const MatrixXd& block) {
  for (Eigen::Index i = 0; i < block.rows(); ++i)
    for (Eigen::Index j = 0; j < block.cols(); ++j)
      trips.push_back({static_cast<int>(row0 + i), static_cast<int>(col0 + j), block(i, j)});
}

double coefficient_at(const expr::CompiledExpr& c, Point p) { return c(p.x, p.y, 0.0, 0.0); }

void require_steady(const ProblemSpec& spec) {
  for (const auto* e : {&spec.kx, &spec.ky, &spec.c, &spec.e}) {
    if (!*e) throw InvalidArgument("problem is missing a transport coefficient");
    if (expr::depends_on(**e, expr::Var::t) || expr::depends_on(**e, expr::Var::u))
      throw InvalidArgument("transport and diffusion coefficients must depend on (x, y) only");
  }
}

}  // namespace

int scheme_epsilon(Scheme s) {
  switch (s) {
    case Scheme::sipg: return -1;
    case Scheme::iipg: return 0;
    case Scheme::nipg: return 1;
  }
  return -1;
}

Scheme scheme_from_epsilon(int epsilon) {
  switch (epsilon) {
    case -1: return Scheme::sipg;
    case 0: return Scheme::iipg;
    case 1: return Scheme::nipg;
    default: throw InvalidArgument("epsilon must be -1, 0 or 1");
  }
}

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::sipg: return "sipg";
    case Scheme::iipg: return "iipg";
    case Scheme::nipg: return "nipg";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  if (name == "sipg") return Scheme::sipg;
  if (name == "iipg") return Scheme::iipg;
  if (name == "nipg") return Scheme::nipg;
  return std::nullopt;
}

PenaltyConfig PenaltyConfig::for_scheme(Scheme s, int k) {
  PenaltyConfig cfg;
  cfg.epsilon = scheme_epsilon(s);
  cfg.sigma0 = k == 0 ? 10.0 : 10.0 * k * k;
  cfg.beta0 = 1.0;
  return cfg;
}

void validate_penalty(const PenaltyConfig& cfg, bool require_sufficient_penalty) {
  if (cfg.epsilon < -1 || cfg.epsilon > 1) throw InvalidArgument("epsilon must be -1, 0 or 1");
  if (!(cfg.sigma0 >= 0.0)) throw InvalidArgument("sigma0 must be nonnegative");
  if (!(cfg.beta0 >= 1.0)) throw InvalidArgument("beta0 must be at least 1");
  for (double s : cfg.edge_sigma)
    if (!(s >= 0.0)) throw InvalidArgument("edge penalty must be nonnegative");
  if (require_sufficient_penalty && cfg.epsilon != 1 && !(cfg.sigma0 > 0.0))
    throw InvalidArgument("SIPG and IIPG need a positive penalty sigma0");
}

SparseMatrix assemble_mass(const DGSpace& space) {
  std::vector<Triplet> trips;
  const auto n = static_cast<std::size_t>(space.n_loc());
  trips.reserve(space.num_elements() * n * n);
  for (std::size_t el = 0; el < space.num_elements(); ++el) {
    const double det = space.mesh().triangles()[el].det;
    push_block(trips, space.offset(el), space.offset(el), det * space.reference_mass());
  }
  return SparseMatrix::from_triplets(space.num_dofs(), space.num_dofs(), std::move(trips));
}

SparseMatrix assemble_broken_gradient(const DGSpace& space, const ProblemSpec& spec) {
  require_steady(spec);
  const expr::CompiledExpr kx(spec.kx), ky(spec.ky);
  const auto& mesh = space.mesh();
  const auto& rule = space.volume_rule();
  const int n = space.n_loc();
  std::vector<Triplet> trips;
  for (std::size_t el = 0; el < space.num_elements(); ++el) {
    const Trace tr = volume_trace(space, el);
    const double det = mesh.triangles()[el].det;
    MatrixXd block = MatrixXd::Zero(n, n);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point p = map_to_physical(mesh, el, rule.points[q]);
      const double w = rule.weights[q] * det;
      const auto qi = static_cast<Eigen::Index>(q);
      block += w * coefficient_at(kx, p) * tr.dx.row(qi).transpose() * tr.dx.row(qi);
      block += w * coefficient_at(ky, p) * tr.dy.row(qi).transpose() * tr.dy.row(qi);
    }
    push_block(trips, space.offset(el), space.offset(el), block);
  }
  return SparseMatrix::from_triplets(space.num_dofs(), space.num_dofs(), std::move(trips));
}

SparseMatrix assemble_diffusion(const DGSpace& space, const ProblemSpec& spec, const PenaltyConfig& penalty) {
  validate_penalty(penalty, false);
  require_steady(spec);
  const expr::CompiledExpr kx(spec.kx), ky(spec.ky);
  const auto& mesh = space.mesh();
  const int n = space.n_loc();
  const double eps = penalty.epsilon;

  SparseMatrix volume = assemble_broken_gradient(space, spec);
  std::vector<Triplet> trips;
  trips.reserve(volume.nnz() + mesh.num_edges() * 4 * static_cast<std::size_t>(n * n));
  for (std::size_t r = 0; r < volume.rows(); ++r)
    for (int k = volume.row_offsets()[r]; k < volume.row_offsets()[r + 1]; ++k)
      trips.push_back({static_cast<int>(r), volume.col_indices()[k], volume.values()[k]});

  for (std::size_t ei = 0; ei < mesh.num_edges(); ++ei) {
    const Edge& edge = mesh.edges()[ei];
    const EdgeGeometry g = edge_geometry(space, edge);
    const int sides = edge.is_boundary() ? 1 : 2;
    const double avg = edge.is_boundary() ? 1.0 : 0.5;
    const double pen = penalty.sigma(ei) / std::pow(edge.length, penalty.beta0);
    const double sign[2] = {1.0, -1.0};
    MatrixXd blocks[2][2];
    for (auto& row : blocks)
      for (auto& b : row) b = MatrixXd::Zero(n, n);

    for (std::size_t q = 0; q < g.points.size(); ++q) {
      const auto qi = static_cast<Eigen::Index>(q);
      const Point p = g.points[q].physical;
      const double kxv = coefficient_at(kx, p);
      const double kyv = coefficient_at(ky, p);
      VectorXd val[2], flux[2];
      for (int s = 0; s < sides; ++s) {
        val[s] = g.side[s].values.row(qi).transpose();
        flux[s] = kxv * edge.normal.x * g.side[s].dx.row(qi).transpose() +
                  kyv * edge.normal.y * g.side[s].dy.row(qi).transpose();
      }
      const double w = g.weights[q];
      // Row side b holds the test function, column side a the trial function.
      for (int b = 0; b < sides; ++b) {
        for (int a = 0; a < sides; ++a) {
          blocks[b][a] += w * (-avg * sign[b] * val[b] * flux[a].transpose() +
                               eps * avg * sign[a] * flux[b] * val[a].transpose() +
                               pen * sign[a] * sign[b] * val[b] * val[a].transpose());
        }
      }
    }
    for (int b = 0; b < sides; ++b)
      for (int a = 0; a < sides; ++a)
        push_block(trips, space.offset(static_cast<std::size_t>(edge_element(edge, b))),
                   space.offset(static_cast<std::size_t>(edge_element(edge, a))), blocks[b][a]);
  }
  return SparseMatrix::from_triplets(space.num_dofs(), space.num_dofs(), std::move(trips));
}

SparseMatrix assemble_jump_penalty(const DGSpace& space, const PenaltyConfig& penalty, EdgeSet edges) {
  const auto& mesh = space.mesh();
  const int n = space.n_loc();
  std::vector<Triplet> trips;
  for (std::size_t ei = 0; ei < mesh.num_edges(); ++ei) {
    const Edge& edge = mesh.edges()[ei];
    if (edges == EdgeSet::interior && edge.is_boundary()) continue;
    const EdgeGeometry g = edge_geometry(space, edge);
    const int sides = edge.is_boundary() ? 1 : 2;
    const double pen = penalty.sigma(ei) / std::pow(edge.length, penalty.beta0);
    const double sign[2] = {1.0, -1.0};
    for (int b = 0; b < sides; ++b) {
      for (int a = 0; a < sides; ++a) {
        MatrixXd block = MatrixXd::Zero(n, n);
        for (std::size_t q = 0; q < g.points.size(); ++q) {
          const auto qi = static_cast<Eigen::Index>(q);
          block += g.weights[q] * pen * sign[a] * sign[b] * g.side[b].values.row(qi).transpose() *
                   g.side[a].values.row(qi);
        }
        push_block(trips, space.offset(static_cast<std::size_t>(edge_element(edge, b))),
                   space.offset(static_cast<std::size_t>(edge_element(edge, a))), block);
      }
    }
  }
  return SparseMatrix::from_triplets(space.num_dofs(), space.num_dofs(), std::move(trips));
}

UpwindSide upwind_side(const Edge& edge, double c_n) {
  if (c_n >= 0.0) return UpwindSide::element_1;
  return edge.is_boundary() ? UpwindSide::exterior_zero : UpwindSide::element_2;
}

SparseMatrix assemble_convection(const DGSpace& space, const ProblemSpec& spec) {
  require_steady(spec);
  const expr::CompiledExpr cx(spec.c), cy(spec.e);
  const auto& mesh = space.mesh();
  const auto& rule = space.volume_rule();
  const int n = space.n_loc();
  std::vector<Triplet> trips;

  for (std::size_t el = 0; el < space.num_elements(); ++el) {
    const Trace tr = volume_trace(space, el);
    const double det = mesh.triangles()[el].det;
    MatrixXd block = MatrixXd::Zero(n, n);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point p = map_to_physical(mesh, el, rule.points[q]);
      const double w = rule.weights[q] * det;
      const auto qi = static_cast<Eigen::Index>(q);
      const VectorXd adv = coefficient_at(cx, p) * tr.dx.row(qi).transpose() + coefficient_at(cy, p) * tr.dy.row(qi).transpose();
      block -= w * adv * tr.values.row(qi);
    }
    push_block(trips, space.offset(el), space.offset(el), block);
  }

  for (const Edge& edge : mesh.edges()) {
    const EdgeGeometry g = edge_geometry(space, edge);
    const int sides = edge.is_boundary() ? 1 : 2;
    const double sign[2] = {1.0, -1.0};
    MatrixXd blocks[2][2];
    for (auto& row : blocks)
      for (auto& b : row) b = MatrixXd::Zero(n, n);
    for (std::size_t q = 0; q < g.points.size(); ++q) {
      const auto qi = static_cast<Eigen::Index>(q);
      const Point p = g.points[q].physical;
      const double c_n = coefficient_at(cx, p) * edge.normal.x + coefficient_at(cy, p) * edge.normal.y;
      const UpwindSide up = upwind_side(edge, c_n);
      if (up == UpwindSide::exterior_zero) continue;
      const int a = up == UpwindSide::element_1 ? 0 : 1;
      for (int b = 0; b < sides; ++b)
        blocks[b][a] += g.weights[q] * c_n * sign[b] * g.side[b].values.row(qi).transpose() * g.side[a].values.row(qi);
    }
    for (int b = 0; b < sides; ++b)
      for (int a = 0; a < sides; ++a)
        push_block(trips, space.offset(static_cast<std::size_t>(edge_element(edge, b))),
                   space.offset(static_cast<std::size_t>(edge_element(edge, a))), blocks[b][a]);
  }
  return SparseMatrix::from_triplets(space.num_dofs(), space.num_dofs(), std::move(trips));
}

Eigen::VectorXd assemble_source(const DGSpace& space, const CompiledProblem& problem, const Eigen::VectorXd& coeffs,
                                double t) {
  if (static_cast<std::size_t>(coeffs.size()) != space.num_dofs()) throw InvalidArgument("field size mismatch");
  const auto& mesh = space.mesh();
  const auto& rule = space.volume_rule();
  const auto& phi = space.basis_values();
  const int n = space.n_loc();
  VectorXd g = VectorXd::Zero(coeffs.size());
  VectorXd fq(static_cast<Eigen::Index>(rule.points.size()));
  for (std::size_t el = 0; el < space.num_elements(); ++el) {
    const auto off = static_cast<Eigen::Index>(space.offset(el));
    const VectorXd uq = phi * coeffs.segment(off, n);
    const double det = mesh.triangles()[el].det;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point p = map_to_physical(mesh, el, rule.points[q]);
      const auto qi = static_cast<Eigen::Index>(q);
      fq[qi] = rule.weights[q] * det * problem.f(uq[qi], p.x, p.y, t);
    }
    g.segment(off, n) = phi.transpose() * fq;
  }
  return g;
}

Eigen::VectorXd assemble_source(const DGSpace& space, const ProblemSpec& spec, const DGField& field, double t) {
  return assemble_source(space, CompiledProblem(spec), field.coeffs, t);
}

}  // namespace dgair
