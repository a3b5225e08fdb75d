#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "dgair/mesh.hpp"
#include "dgair/quadrature.hpp"

namespace dgair {

/// Highest supported polynomial degree.
inline constexpr int kMaxDegree = 4;

/// Local dimension of total-degree-k polynomials on a triangle: (k+1)(k+2)/2.
constexpr int n_loc(int k) { return (k + 1) * (k + 2) / 2; }

/// Exponents (I, J) of the i-th monomial x^I y^J. Ordering is graded: degree
/// d = 0, 1, ...; within a degree, I runs from d down to 0.
std::array<int, 2> monomial_exponents(int i);

struct BasisValue {
  double value = 0.0;
  Point grad;
};

/// i-th reference monomial of D_k and its gradient at a reference point.
BasisValue reference_basis_eval(int k, int i, Point ref);

/// Broken polynomial space of total degree k over a mesh, with the quadrature
/// rules and reference basis tables every operator uses.
class DGSpace {
 public:
  DGSpace(std::shared_ptr<const Mesh> mesh, int k);

  int degree() const { return k_; }
  int n_loc() const { return n_loc_; }
  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  std::size_t num_elements() const { return mesh_->num_triangles(); }
  std::size_t num_dofs() const { return num_elements() * static_cast<std::size_t>(n_loc_); }
  std::size_t offset(std::size_t element) const { return element * static_cast<std::size_t>(n_loc_); }

  /// Volume and edge rules of exactness 2k+3.
  const TriangleQuadrature& volume_rule() const { return volume_rule_; }
  const EdgeQuadrature& edge_rule() const { return edge_rule_; }

  /// basis_values()(q, i): value of basis i at volume point q.
  const Eigen::MatrixXd& basis_values() const { return values_; }
  const Eigen::MatrixXd& basis_ref_dx() const { return ref_dx_; }
  const Eigen::MatrixXd& basis_ref_dy() const { return ref_dy_; }

  /// Mass matrix on the reference triangle; the block of element E is |det J_E| times it.
  const Eigen::MatrixXd& reference_mass() const { return reference_mass_; }

  /// All basis values and gradients at an arbitrary reference point.
  void eval_basis(Point ref, Eigen::Ref<Eigen::VectorXd> values, Eigen::Ref<Eigen::VectorXd> dx,
                  Eigen::Ref<Eigen::VectorXd> dy) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  int k_;
  int n_loc_;
  TriangleQuadrature volume_rule_;
  EdgeQuadrature edge_rule_;
  Eigen::MatrixXd values_, ref_dx_, ref_dy_;
  Eigen::MatrixXd reference_mass_;
};

/// Coefficient vector of a DG function at time t.
struct DGField {
  std::shared_ptr<const DGSpace> space;
  Eigen::VectorXd coeffs;
  double t = 0.0;

  DGField() = default;
  explicit DGField(std::shared_ptr<const DGSpace> s, double time = 0.0)
      : space(std::move(s)), coeffs(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space->num_dofs()))), t(time) {}
  DGField(std::shared_ptr<const DGSpace> s, Eigen::VectorXd c, double time);

  auto local(std::size_t element) const {
    return coeffs.segment(static_cast<Eigen::Index>(space->offset(element)), space->n_loc());
  }
  auto local(std::size_t element) {
    return coeffs.segment(static_cast<Eigen::Index>(space->offset(element)), space->n_loc());
  }
};

using ScalarFunction = std::function<double(double x, double y)>;

/// Elementwise L2 projection onto the space.
DGField l2_project(const ScalarFunction& fn, std::shared_ptr<const DGSpace> space);

/// Largest |(fn - U, phi_i)_E| over all basis functions, relative to the largest |(fn, phi_i)_E|.
double projection_orthogonality_residual(const ScalarFunction& fn, const DGField& field);

/// U_h on `element` at a reference point.
double eval_field(const DGField& field, std::size_t element, Point ref);

/// Physical gradient of U_h on `element` at a reference point.
Point eval_field_gradient(const DGField& field, std::size_t element, Point ref);

}  // namespace dgair
