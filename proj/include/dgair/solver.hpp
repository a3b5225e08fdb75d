#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dgair/assembly.hpp"
#include "dgair/error.hpp"
#include "dgair/linsolve.hpp"
#include "dgair/model.hpp"
#include "dgair/space.hpp"
#include "dgair/sparse.hpp"

namespace dgair {

/// M xi' + (A + B) xi = G(xi, t).
class SemidiscreteSystem {
 public:
  /// Rejects SIPG/IIPG with sigma0 = 0 (validate_penalty with the sufficiency check).
  SemidiscreteSystem(std::shared_ptr<const DGSpace> space, ProblemSpec spec, PenaltyConfig penalty);

  const DGSpace& space() const { return *space_; }
  std::shared_ptr<const DGSpace> space_ptr() const { return space_; }
  const ProblemSpec& spec() const { return spec_; }
  const PenaltyConfig& penalty() const { return penalty_; }
  const CompiledProblem& problem() const { return problem_; }

  const SparseMatrix& mass() const { return mass_; }
  const SparseMatrix& diffusion() const { return diffusion_; }
  const SparseMatrix& convection() const { return convection_; }
  /// A + B
  const SparseMatrix& stiffness() const { return stiffness_; }
  const BlockFactorization& mass_factorization() const { return mass_factor_; }

  std::size_t num_dofs() const { return space_->num_dofs(); }

  /// G(xi, t)
  Eigen::VectorXd source(const Eigen::VectorXd& xi, double t) const;
  /// M^{-1} (G(xi, t) - (A + B) xi)
  Eigen::VectorXd rate(const Eigen::VectorXd& xi, double t) const;

  /// Slope l of Q when Q is affine in u with a constant slope, 0 otherwise.
  double chemistry_slope() const { return chemistry_slope_; }
  bool chemistry_is_affine() const { return chemistry_affine_; }

 private:
  std::shared_ptr<const DGSpace> space_;
  ProblemSpec spec_;
  PenaltyConfig penalty_;
  CompiledProblem problem_;
  SparseMatrix mass_, diffusion_, convection_, stiffness_;
  BlockFactorization mass_factor_;
  double chemistry_slope_ = 0.0;
  bool chemistry_affine_ = false;
};

enum class Integrator { forward_euler, ssprk3, backward_euler, crank_nicolson };

std::string_view integrator_name(Integrator i);
std::optional<Integrator> parse_integrator(std::string_view name);
bool is_explicit(Integrator i);
/// Nominal order of accuracy in time.
int integrator_order(Integrator i);

struct TimeConfig {
  Integrator integrator = Integrator::ssprk3;
  std::optional<double> dt;  ///< empty selects cfl_dt
  double final_time = 1.0;
  double cfl_safety = 0.5;
  double picard_tolerance = 1e-12;
  int picard_max_iterations = 50;
  double linear_tolerance = 1e-10;
  /// Implicit runs shrink dt to keep dt L_Q <= 0.5 when Q is not affine.
  bool limit_picard_step = true;
  /// Crank-Nicolson only: the first startup_steps steps are each replaced by
  /// two backward Euler half steps, damping stiff modes of the initial data.
  int startup_steps = 0;
};

/// Throws InvalidArgument for non-positive tolerances, dt or safety, or negative T.
void validate_time_config(const TimeConfig& cfg);

/// L2 projection of u0 at t = 0.
DGField initial_state(const SemidiscreteSystem& system);

/// Largest |c|, |e| and kx, ky over all volume quadrature nodes.
struct CoefficientMaxima {
  double c_max = 0.0;
  double k_max = 0.0;
};
CoefficientMaxima sample_coefficient_maxima(const SemidiscreteSystem& system);

/// dt = safety / (c_max (2k+1)/h + k_max (2k+1)^2/h^2 + 2 (k+1)(k+2) sigma0 / h^(beta0+1)),
/// h = h_min. The last term bounds the stiffness of the jump penalty, which
/// does not scale with the diffusion coefficient. Throws InvalidArgument when
/// c_max = k_max = 0 (no transport dynamics to resolve).
double cfl_dt(const SemidiscreteSystem& system, int k, double safety);
double cfl_dt(const SemidiscreteSystem& system, double safety);

/// Steps return a field stamped t + dt; a non-finite result raises NumericalError.
DGField step_forward_euler(const SemidiscreteSystem& system, const DGField& state, double dt);
DGField step_ssprk3(const SemidiscreteSystem& system, const DGField& state, double dt);

struct PicardStats {
  int iterations = 0;
  std::size_t linear_iterations = 0;
  std::vector<double> history;  ///< successive-iterate differences
};

/// theta-scheme (M + theta dt (A + B + lambda M)) xi^{m+1} = rhs(xi^n, G~(xi^m)),
/// with the affine part -lambda u of f moved into the matrix and Picard
/// iteration on the remainder G~. The matrix and preconditioner are cached per dt.
class ImplicitStepper {
 public:
  ImplicitStepper(const SemidiscreteSystem& system, double theta, const TimeConfig& cfg);

  /// `guess` seeds the Picard iteration (xi^n when absent).
  DGField step(const DGField& state, double dt, PicardStats* stats = nullptr, const Eigen::VectorXd* guess = nullptr);
  double theta() const { return theta_; }
  /// lambda = k1 + k2 - slope of Q (when affine).
  double implicit_reaction() const { return lambda_; }

 private:
  void prepare(double dt);
  Eigen::VectorXd explicit_source(const Eigen::VectorXd& xi, double t) const;

  const SemidiscreteSystem& system_;
  double theta_;
  TimeConfig cfg_;
  double lambda_ = 0.0;
  double cached_dt_ = -1.0;
  SparseMatrix shifted_, iteration_;
  BlockJacobi preconditioner_;
  KrylovMethod method_ = KrylovMethod::automatic;
};

DGField step_backward_euler(const SemidiscreteSystem& system, const DGField& state, double dt,
                            const TimeConfig& cfg = {});
DGField step_crank_nicolson(const SemidiscreteSystem& system, const DGField& state, double dt,
                            const TimeConfig& cfg = {});

struct ObserverSample {
  std::size_t step = 0;
  double t = 0.0;
  double l2_norm = 0.0;
  double mass = 0.0;
  std::optional<double> l2_error;
  std::optional<double> energy_error;  ///< interior-edge seminorm of U_h - u
};

struct ObserverConfig {
  std::size_t stride = 1;       ///< sample every stride steps; t = 0 and T always
  bool record_trace = false;    ///< keep every state and step size
  bool errors = true;           ///< error columns when the problem carries an exact solution
};

struct SolveResult {
  DGField final_state;
  std::size_t steps = 0;
  std::vector<ObserverSample> samples;
  std::vector<DGField> states;        ///< trace: states[0] is the initial state
  std::vector<double> step_sizes;     ///< trace: step_sizes[n] advances states[n]
  int max_picard_iterations = 0;
};

using StepCallback = std::function<void(std::size_t step, const DGField& state)>;

/// Steps from t = 0 to T; the last step is clipped to land on T.
SolveResult solve(const SemidiscreteSystem& system, const TimeConfig& cfg, const ObserverConfig& observers = {},
                  const StepCallback& on_step = nullptr);

/// Step size solve() uses before clipping.
double resolve_dt(const SemidiscreteSystem& system, const TimeConfig& cfg);

}  // namespace dgair
