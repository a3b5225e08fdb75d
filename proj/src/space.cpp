#include "dgair/space.hpp"

#include <algorithm>
#include <cmath>

#include "dgair/error.hpp"

namespace dgair {

namespace {

double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

std::array<int, 2> monomial_exponents(int i) {
  if (i < 0) throw InvalidArgument("basis index must be nonnegative");
  int d = 0;
  while (n_loc(d) <= i) ++d;
  const int within = i - (d == 0 ? 0 : n_loc(d - 1));
  return {d - within, within};
}

BasisValue reference_basis_eval(int k, int i, Point ref) {
  if (k < 0 || k > kMaxDegree) throw InvalidArgument("unsupported degree " + std::to_string(k));
  if (i < 0 || i >= n_loc(k)) throw InvalidArgument("basis index out of range");
  const auto [px, py] = monomial_exponents(i);
  BasisValue b;
  b.value = ipow(ref.x, px) * ipow(ref.y, py);
  b.grad.x = px == 0 ? 0.0 : px * ipow(ref.x, px - 1) * ipow(ref.y, py);
  b.grad.y = py == 0 ? 0.0 : py * ipow(ref.x, px) * ipow(ref.y, py - 1);
  return b;
}

DGSpace::DGSpace(std::shared_ptr<const Mesh> mesh, int k)
    : mesh_(std::move(mesh)), k_(k), n_loc_(dgair::n_loc(k)) {
  if (!mesh_) throw InvalidArgument("space needs a mesh");
  if (k < 0 || k > kMaxDegree)
    throw InvalidArgument("unsupported degree " + std::to_string(k) + " (0 <= k <= 4)");
  volume_rule_ = triangle_quadrature(2 * k + 3);
  edge_rule_ = edge_quadrature(2 * k + 3);

  const auto nq = static_cast<Eigen::Index>(volume_rule_.points.size());
  values_.resize(nq, n_loc_);
  ref_dx_.resize(nq, n_loc_);
  ref_dy_.resize(nq, n_loc_);
  for (Eigen::Index q = 0; q < nq; ++q) {
    for (int i = 0; i < n_loc_; ++i) {
      const auto b = reference_basis_eval(k, i, volume_rule_.points[q]);
      values_(q, i) = b.value;
      ref_dx_(q, i) = b.grad.x;
      ref_dy_(q, i) = b.grad.y;
    }
  }
  const Eigen::Map<const Eigen::VectorXd> w(volume_rule_.weights.data(), nq);
  reference_mass_ = values_.transpose() * w.asDiagonal() * values_;
  reference_mass_ = reference_mass_.triangularView<Eigen::Upper>();
  reference_mass_.triangularView<Eigen::StrictlyLower>() = reference_mass_.transpose();
}

void DGSpace::eval_basis(Point ref, Eigen::Ref<Eigen::VectorXd> values, Eigen::Ref<Eigen::VectorXd> dx,
                         Eigen::Ref<Eigen::VectorXd> dy) const {
  for (int i = 0; i < n_loc_; ++i) {
    const auto b = reference_basis_eval(k_, i, ref);
    values[i] = b.value;
    dx[i] = b.grad.x;
    dy[i] = b.grad.y;
  }
}

DGField::DGField(std::shared_ptr<const DGSpace> s, Eigen::VectorXd c, double time)
    : space(std::move(s)), coeffs(std::move(c)), t(time) {
  if (static_cast<std::size_t>(coeffs.size()) != space->num_dofs())
    throw InvalidArgument("coefficient vector length does not match the space");
}

DGField l2_project(const ScalarFunction& fn, std::shared_ptr<const DGSpace> space) {
  DGField field(space);
  const auto& mesh = space->mesh();
  const auto& rule = space->volume_rule();
  const Eigen::LLT<Eigen::MatrixXd> ref_llt(space->reference_mass());
  if (ref_llt.info() != Eigen::Success) throw NumericalError("reference mass matrix is not SPD");
  Eigen::VectorXd rhs(space->n_loc());
  for (std::size_t el = 0; el < space->num_elements(); ++el) {
    rhs.setZero();
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point p = map_to_physical(mesh, el, rule.points[q]);
      rhs += rule.weights[q] * fn(p.x, p.y) * space->basis_values().row(static_cast<Eigen::Index>(q)).transpose();
    }
    // Both sides carry the factor |det J|, which cancels.
    field.local(el) = ref_llt.solve(rhs);
  }
  return field;
}

double projection_orthogonality_residual(const ScalarFunction& fn, const DGField& field) {
  const auto& space = *field.space;
  const auto& mesh = space.mesh();
  const auto& rule = space.volume_rule();
  double worst = 0.0;
  double scale = 0.0;
  Eigen::VectorXd residual(space.n_loc()), load(space.n_loc());
  for (std::size_t el = 0; el < space.num_elements(); ++el) {
    const double det = mesh.triangles()[el].det;
    residual.setZero();
    load.setZero();
    const Eigen::VectorXd local = field.local(el);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point p = map_to_physical(mesh, el, rule.points[q]);
      const auto row = space.basis_values().row(static_cast<Eigen::Index>(q));
      const double f = fn(p.x, p.y);
      const double u = row.dot(local);
      load += rule.weights[q] * det * f * row.transpose();
      residual += rule.weights[q] * det * (f - u) * row.transpose();
    }
    worst = std::max(worst, residual.cwiseAbs().maxCoeff());
    scale = std::max(scale, load.cwiseAbs().maxCoeff());
  }
  return scale > 0.0 ? worst / scale : worst;
}

double eval_field(const DGField& field, std::size_t element, Point ref) {
  const auto& space = *field.space;
  if (element >= space.num_elements()) throw InvalidArgument("element index out of range");
  double sum = 0.0;
  const auto local = field.local(element);
  for (int i = 0; i < space.n_loc(); ++i)
    sum += local[i] * reference_basis_eval(space.degree(), i, ref).value;
  return sum;
}

Point eval_field_gradient(const DGField& field, std::size_t element, Point ref) {
  const auto& space = *field.space;
  if (element >= space.num_elements()) throw InvalidArgument("element index out of range");
  Point g;
  const auto local = field.local(element);
  for (int i = 0; i < space.n_loc(); ++i) {
    const auto b = reference_basis_eval(space.degree(), i, ref);
    g = g + local[i] * b.grad;
  }
  return pull_back_gradient(space.mesh(), element, g);
}

}  // namespace dgair
