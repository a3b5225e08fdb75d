#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dgair/model.hpp"
#include "dgair/space.hpp"
#include "dgair/sparse.hpp"

namespace dgair {

enum class Scheme { sipg, iipg, nipg };

/// sipg -> -1, iipg -> 0, nipg -> +1.
int scheme_epsilon(Scheme s);
Scheme scheme_from_epsilon(int epsilon);
std::string_view scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

/// Interior penalty parameters. The edge weight is sigma_e / |e|^beta0 with
/// sigma_e = edge_sigma[e] when overridden, sigma0 otherwise.
struct PenaltyConfig {
  int epsilon = -1;
  double sigma0 = 10.0;
  double beta0 = 1.0;
  std::vector<double> edge_sigma;

  /// Default penalty sigma0 = 10 k^2 (10 for k = 0), beta0 = 1.
  static PenaltyConfig for_scheme(Scheme s, int k);
  double sigma(std::size_t edge) const { return edge_sigma.empty() ? sigma0 : edge_sigma[edge]; }
};

/// Structural checks: epsilon in {-1, 0, 1}, sigma0 >= 0, beta0 >= 1.
/// With `require_sufficient_penalty`, SIPG and IIPG also need sigma0 > 0.
void validate_penalty(const PenaltyConfig& cfg, bool require_sufficient_penalty);

/// Block-diagonal mass matrix.
SparseMatrix assemble_mass(const DGSpace& space);

/// Matrix of the interior-penalty diffusion form a_eps, edge sums over interior
/// and boundary edges:
///   sum_E int_E K grad w . grad v
///   - sum_e int_e {K grad w . n}[v] + eps sum_e int_e {K grad v . n}[w]
///   + sum_e sigma_e / |e|^beta0 int_e [w][v].
SparseMatrix assemble_diffusion(const DGSpace& space, const ProblemSpec& spec, const PenaltyConfig& penalty);

/// Upwind convection form
///   -sum_E int_E w (c, e) . grad v + sum_e int_e (c n1 + e n2) w_up [v].
/// Outflow boundary edges take the interior trace, inflow boundary edges the exterior value 0.
SparseMatrix assemble_convection(const DGSpace& space, const ProblemSpec& spec);

/// Broken gradient energy sum_E int_E K grad w . grad v (no edge terms).
SparseMatrix assemble_broken_gradient(const DGSpace& space, const ProblemSpec& spec);

enum class EdgeSet { interior, all };

/// Jump penalty sum_e sigma_e / |e|^beta0 int_e [w][v] over the chosen edges.
SparseMatrix assemble_jump_penalty(const DGSpace& space, const PenaltyConfig& penalty, EdgeSet edges);

enum class UpwindSide { element_1, element_2, exterior_zero };

/// Side supplying w_up at a point where the normal wind is c_n = c n1 + e n2.
/// Ties (c_n = 0) go to element_1; their flux weight is zero.
UpwindSide upwind_side(const Edge& edge, double c_n);

/// G_i = int f(U_h) phi_i with f evaluated pointwise at the quadrature nodes.
Eigen::VectorXd assemble_source(const DGSpace& space, const CompiledProblem& problem, const Eigen::VectorXd& coeffs,
                                double t);
Eigen::VectorXd assemble_source(const DGSpace& space, const ProblemSpec& spec, const DGField& field, double t);

}  // namespace dgair
