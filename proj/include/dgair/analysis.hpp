#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dgair/assembly.hpp"
#include "dgair/model.hpp"
#include "dgair/norms.hpp"
#include "dgair/solver.hpp"

namespace dgair {

/// log2(e_coarse / e_fine) for a halving of h.
double observed_order(double error_coarse, double error_fine);

/// Coefficients drawn uniformly from [-1, 1].
Eigen::VectorXd random_coefficients(std::size_t size, std::mt19937_64& rng);

struct ConvergenceLevel {
  int n = 0;  ///< mesh divisions per side
  double h = 0.0;
  std::size_t dofs = 0;
  double dt = 0.0;
  std::size_t steps = 0;
  double l2_error = 0.0;                ///< at T
  double linf_l2_error = 0.0;           ///< max over sampled times
  double energy_error = 0.0;            ///< at T
  double energy_error_integrated = 0.0; ///< sqrt(sum dt ||e||_eps^2)
};

struct ConvergenceReport {
  std::string problem;
  int k = 1;
  Scheme scheme = Scheme::sipg;
  Integrator integrator = Integrator::crank_nicolson;
  std::vector<ConvergenceLevel> levels;
  /// Orders between level i-1 and i; empty for the first level.
  std::vector<std::optional<double>> l2_orders, linf_l2_orders, energy_orders;

  /// min(k+1, s) - 1 with s unbounded: k.
  int reference_order() const { return k; }
};

struct ConvergenceOptions {
  std::vector<int> levels{8, 16, 32, 64};
  int k = 1;
  Scheme scheme = Scheme::sipg;
  std::optional<double> sigma0;  ///< default 10 k^2
  double beta0 = 1.0;
  Integrator integrator = Integrator::crank_nicolson;
  /// Implicit: dt = dt_scale h^((k+1)/p) with p the integrator order.
  /// Explicit: dt = cfl_dt with safety cfl_safety.
  double dt_scale = 0.25;
  double cfl_safety = 0.5;
  int startup_steps = 2;  ///< Crank-Nicolson damping steps
  std::size_t stride = 1;
  double linear_tolerance = 1e-10;
};

/// Solves the problem on each level and collects errors. The problem must carry an
/// exact solution and levels must double.
ConvergenceReport convergence_study(const ProblemSpec& spec, const ConvergenceOptions& options);

struct CoercivityEntry {
  double sigma0 = 0.0;
  double min_ratio = 0.0;
};

struct CoercivityReport {
  Scheme scheme = Scheme::sipg;
  int k = 1;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  /// Denominator: energy norm with boundary jumps at the reference penalty.
  double reference_sigma0 = 0.0;
  std::string denominator = "energy seminorm + boundary jumps";
  std::vector<CoercivityEntry> entries;
  /// Smallest grid value from which every larger grid value has a positive minimum.
  std::optional<double> threshold;
  /// Minimum ratio at the reference penalty.
  double kappa = 0.0;
};

/// For each sigma0, min over random unit fields of v^T A v / ||v||^2, where
/// ||v||^2 = sum_E ||D^{1/2} grad v||^2 + sum_{all e} sigma_ref/|e|^beta0 ||[v]||^2
/// with sigma_ref the scheme default. The samples are shared across the grid.
CoercivityReport coercivity_scan(std::shared_ptr<const DGSpace> space, const ProblemSpec& spec, Scheme scheme,
                                 const std::vector<double>& sigma_grid, std::size_t samples, std::uint64_t seed,
                                 double beta0 = 1.0);

/// min over random fields of v^T B v / v^T M v.
double upwind_min_ratio(const DGSpace& space, const ProblemSpec& spec, std::size_t samples, std::uint64_t seed);

/// max over random fields of |v^T A v - (broken gradient + all-edge jump energy)| / that energy, for NIPG.
double nipg_identity_defect(const DGSpace& space, const ProblemSpec& spec, double sigma0, double beta0,
                            std::size_t samples, std::uint64_t seed);

/// max |M xi_t + (A + B) xi - G(xi, t)| for the exact coefficients xi of the
/// problem's exact solution. Requires a polynomial exact solution of degree <= k.
double consistency_residual(const SemidiscreteSystem& system, double t);

struct ConservationReport {
  double max_violation = 0.0;
  std::size_t worst_element = 0;
  std::size_t worst_step = 0;
  std::vector<double> element_violation;  ///< max over steps per element
};

/// Tests every recorded step with element indicators: the change of mass in E
/// must equal the time-weighted boundary fluxes plus the source, computed from
/// traces of the stored states independently of the assembled matrices.
/// Crank-Nicolson traces must come from runs without startup steps.
ConservationReport local_conservation_check(const SemidiscreteSystem& system, const SolveResult& trace,
                                            Integrator integrator);

}  // namespace dgair
