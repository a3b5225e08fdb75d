#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dgair/expr.hpp"
#include "dgair/mesh.hpp"

namespace dgair {

/// Declared constants k_*, k^*, c_*, c^* bounding |kx|, |ky| and |c|, |e|.
struct CoefficientBounds {
  double k_lower = 0.0;
  double k_upper = 0.0;
  double c_lower = 0.0;
  double c_upper = 0.0;
};

/// Exact solution u(x, y, t) with the derivatives the forcing and error norms need.
struct ExactSolution {
  expr::ExprPtr u, u_t, u_x, u_y, u_xx, u_yy;

  static ExactSolution from(expr::ExprPtr u);
};

/// Advection-diffusion-reaction problem
///   u_t + (c u)_x + (e u)_y - (kx u_x)_x - (ky u_y)_y = -(k1 + k2) u + E + Q(u)
/// on a rectangle with u = 0 on the boundary and u(., 0) = u0.
struct ProblemSpec {
  std::string name = "custom";
  Rect domain;
  expr::ExprPtr kx, ky;        ///< diffusion, functions of (x, y)
  expr::ExprPtr c, e;          ///< wind, functions of (x, y)
  double k1 = 0.0, k2 = 0.0;   ///< deposition rates
  expr::ExprPtr emission;      ///< E(x, y, t)
  expr::ExprPtr chemistry;     ///< Q(u)
  expr::ExprPtr u0;            ///< initial condition (x, y)
  double final_time = 1.0;
  CoefficientBounds bounds;
  double lipschitz_bound = 0.0;  ///< declared L_Q
  double u_min = -1.0, u_max = 1.0;
  std::optional<ExactSolution> exact;
};

/// f(u) = -(k1 + k2) u + E(x, y, t) + Q(u).
double f_eval(const ProblemSpec& spec, double u, double x, double y, double t);

/// Compiled coefficient set used in quadrature loops.
struct CompiledProblem {
  explicit CompiledProblem(const ProblemSpec& spec);

  double f(double u, double x, double y, double t) const {
    return -deposition * u + emission(x, y, t, u) + chemistry(x, y, t, u);
  }

  expr::CompiledExpr kx, ky, c, e, emission, chemistry, u0;
  double deposition = 0.0;
};

/// Emission field making `exact.u` solve the PDE:
///   u_t + c u_x + e u_y - kx u_xx - ky u_yy + (k1 + k2) u - Q(u).
/// kx, ky, c, e must be constants; InvalidArgument otherwise.
expr::ExprPtr mms_forcing(const ProblemSpec& spec, const ExactSolution& exact);

/// Pointwise residual of the PDE for `exact` with the problem's own emission.
double pde_residual(const ProblemSpec& spec, const ExactSolution& exact, double x, double y, double t);

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;  ///< witness point or the measured extreme
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
  const CheckResult* find(std::string_view name) const;
};

/// Samples the coefficient bounds, the Lipschitz bound of Q on [u_min, u_max]
/// (1000 points), sign conditions, variable dependencies, and, when an exact
/// solution is attached, its boundary values. Failures are report entries.
ValidationReport validate(const ProblemSpec& spec);

/// Built-in problems: smooth-mms, polynomial-mms, decay-test, conservation-test.
ProblemSpec make_preset(std::string_view name);
const std::vector<std::string>& preset_names();

}  // namespace dgair
