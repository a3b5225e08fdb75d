#include "dgair/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dgair/norms.hpp"

namespace dgair {

using Eigen::VectorXd;

namespace {

bool all_finite(const VectorXd& v) { return v.allFinite(); }

DGField checked(const DGField& state, VectorXd xi, double dt, const char* scheme) {
  if (!all_finite(xi))
    throw NumericalError(std::string(scheme) + " step from t=" + std::to_string(state.t) +
                         " produced a non-finite state");
  return DGField(state.space, std::move(xi), state.t + dt);
}

// Constant slope of Q in u, when Q is affine in u with a slope free of x, y, t.
std::optional<double> affine_slope(const ProblemSpec& spec) {
  const auto d = expr::differentiate(spec.chemistry, expr::Var::u);
  for (auto v : {expr::Var::x, expr::Var::y, expr::Var::t, expr::Var::u})
    if (expr::depends_on(*d, v)) return std::nullopt;
  return expr::eval(*d, {});
}

}  // namespace

SemidiscreteSystem::SemidiscreteSystem(std::shared_ptr<const DGSpace> space, ProblemSpec spec, PenaltyConfig penalty)
    : space_(std::move(space)), spec_(std::move(spec)), penalty_(std::move(penalty)), problem_(spec_) {
  if (!space_) throw InvalidArgument("semidiscrete system needs a space");
  validate_penalty(penalty_, true);
  if (!penalty_.edge_sigma.empty() && penalty_.edge_sigma.size() != space_->mesh().num_edges())
    throw InvalidArgument("per-edge penalty list does not match the edge count");
  mass_ = assemble_mass(*space_);
  diffusion_ = assemble_diffusion(*space_, spec_, penalty_);
  convection_ = assemble_convection(*space_, spec_);
  stiffness_ = linear_combination(1.0, diffusion_, 1.0, convection_);
  mass_factor_ = BlockFactorization(mass_, static_cast<std::size_t>(space_->n_loc()));
  const auto slope = affine_slope(spec_);
  chemistry_affine_ = slope.has_value();
  chemistry_slope_ = slope.value_or(0.0);
}

VectorXd SemidiscreteSystem::source(const VectorXd& xi, double t) const {
  return assemble_source(*space_, problem_, xi, t);
}

VectorXd SemidiscreteSystem::rate(const VectorXd& xi, double t) const {
  return mass_factor_.solve(source(xi, t) - stiffness_ * xi);
}

std::string_view integrator_name(Integrator i) {
  switch (i) {
    case Integrator::forward_euler: return "forward-euler";
    case Integrator::ssprk3: return "ssprk3";
    case Integrator::backward_euler: return "backward-euler";
    case Integrator::crank_nicolson: return "crank-nicolson";
  }
  return "";
}

std::optional<Integrator> parse_integrator(std::string_view name) {
  for (auto i : {Integrator::forward_euler, Integrator::ssprk3, Integrator::backward_euler, Integrator::crank_nicolson})
    if (integrator_name(i) == name) return i;
  return std::nullopt;
}

bool is_explicit(Integrator i) { return i == Integrator::forward_euler || i == Integrator::ssprk3; }

int integrator_order(Integrator i) {
  switch (i) {
    case Integrator::forward_euler:
    case Integrator::backward_euler: return 1;
    case Integrator::crank_nicolson: return 2;
    case Integrator::ssprk3: return 3;
  }
  return 0;
}

void validate_time_config(const TimeConfig& cfg) {
  if (cfg.dt && !(*cfg.dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(cfg.final_time >= 0.0) || !std::isfinite(cfg.final_time)) throw InvalidArgument("final time must be >= 0");
  if (!(cfg.cfl_safety > 0.0)) throw InvalidArgument("CFL safety factor must be positive");
  if (!(cfg.picard_tolerance > 0.0)) throw InvalidArgument("Picard tolerance must be positive");
  if (cfg.startup_steps < 0) throw InvalidArgument("startup step count must be >= 0");
  if (cfg.picard_max_iterations < 1) throw InvalidArgument("Picard iteration limit must be >= 1");
  if (!(cfg.linear_tolerance > 0.0)) throw InvalidArgument("linear tolerance must be positive");
}

DGField initial_state(const SemidiscreteSystem& system) {
  const auto& u0 = system.problem().u0;
  DGField field = l2_project([&](double x, double y) { return u0(x, y, 0.0, 0.0); }, system.space_ptr());
  field.t = 0.0;
  return field;
}

CoefficientMaxima sample_coefficient_maxima(const SemidiscreteSystem& system) {
  const auto& space = system.space();
  const auto& p = system.problem();
  CoefficientMaxima m;
  for (std::size_t el = 0; el < space.num_elements(); ++el) {
    for (const Point& r : space.volume_rule().points) {
      const Point x = map_to_physical(space.mesh(), el, r);
      m.c_max = std::max({m.c_max, std::abs(p.c(x.x, x.y, 0.0, 0.0)), std::abs(p.e(x.x, x.y, 0.0, 0.0))});
      m.k_max = std::max({m.k_max, p.kx(x.x, x.y, 0.0, 0.0), p.ky(x.x, x.y, 0.0, 0.0)});
    }
  }
  return m;
}

double cfl_dt(const SemidiscreteSystem& system, int k, double safety) {
  if (!(safety > 0.0)) throw InvalidArgument("CFL safety factor must be positive");
  const CoefficientMaxima m = sample_coefficient_maxima(system);
  if (m.c_max == 0.0 && m.k_max == 0.0) throw InvalidArgument("CFL step undefined: no wind and no diffusion");
  const double h = system.space().mesh().h_min();
  const double p = 2.0 * k + 1.0;
  const auto& pen = system.penalty();
  double sigma_max = pen.sigma0;
  for (double s : pen.edge_sigma) sigma_max = std::max(sigma_max, s);
  const double penalty_term = 2.0 * (k + 1) * (k + 2) * sigma_max / std::pow(h, pen.beta0 + 1.0);
  return safety / (m.c_max * p / h + m.k_max * p * p / (h * h) + penalty_term);
}

double cfl_dt(const SemidiscreteSystem& system, double safety) {
  return cfl_dt(system, system.space().degree(), safety);
}

DGField step_forward_euler(const SemidiscreteSystem& system, const DGField& state, double dt) {
  VectorXd xi = state.coeffs + dt * system.rate(state.coeffs, state.t);
  return checked(state, std::move(xi), dt, "forward Euler");
}

DGField step_ssprk3(const SemidiscreteSystem& system, const DGField& state, double dt) {
  const VectorXd& u = state.coeffs;
  const double t = state.t;
  // Increment form of the Shu-Osher stages: a zero rate leaves u bitwise unchanged.
  const VectorXd k1 = system.rate(u, t);
  const VectorXd k2 = system.rate(u + dt * k1, t + dt);
  const VectorXd k3 = system.rate(u + (0.25 * dt) * (k1 + k2), t + 0.5 * dt);
  VectorXd xi = u + (dt / 6.0) * (k1 + k2 + 4.0 * k3);
  return checked(state, std::move(xi), dt, "SSP-RK3");
}

ImplicitStepper::ImplicitStepper(const SemidiscreteSystem& system, double theta, const TimeConfig& cfg)
    : system_(system), theta_(theta), cfg_(cfg) {
  if (!(theta > 0.0 && theta <= 1.0)) throw InvalidArgument("theta must lie in (0, 1]");
  validate_time_config(cfg);
  lambda_ = system.spec().k1 + system.spec().k2 - system.chemistry_slope();
}

void ImplicitStepper::prepare(double dt) {
  if (dt == cached_dt_) return;
  // M + theta dt (A + B + lambda M)
  if (shifted_.rows() == 0) shifted_ = linear_combination(1.0, system_.stiffness(), lambda_, system_.mass());
  iteration_ = linear_combination(1.0, system_.mass(), theta_ * dt, shifted_);
  preconditioner_ = BlockJacobi(iteration_, static_cast<std::size_t>(system_.space().n_loc()));
  method_ = max_asymmetry(iteration_) <= 1e-12 * iteration_.max_abs() ? KrylovMethod::cg : KrylovMethod::bicgstab;
  cached_dt_ = dt;
}

// G~(xi) = G(xi) + lambda M xi; exact because the volume rule integrates
// products of basis functions exactly.
VectorXd ImplicitStepper::explicit_source(const VectorXd& xi, double t) const {
  return system_.source(xi, t) + lambda_ * (system_.mass() * xi);
}

DGField ImplicitStepper::step(const DGField& state, double dt, PicardStats* stats, const VectorXd* guess) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  prepare(dt);
  const VectorXd& xn = state.coeffs;
  const double t1 = state.t + dt;

  VectorXd fixed = system_.mass() * xn;
  if (theta_ < 1.0) {
    fixed += (1.0 - theta_) * dt * (explicit_source(xn, state.t) - shifted_ * xn);
  }

  KrylovOptions opts;
  opts.tolerance = cfg_.linear_tolerance;
  opts.method = method_;

  const bool affine = system_.chemistry_is_affine();
  PicardStats local;
  VectorXd xi = guess ? *guess : xn;
  VectorXd g = explicit_source(xi, t1);
  // The residual of the correction system is updated incrementally, so its
  // rounding error scales with the corrections rather than with the state.
  const VectorXd rhs = fixed + theta_ * dt * g;
  VectorXd residual = rhs - iteration_ * xi;
  opts.reference_norm = rhs.norm();
  for (int m = 1;; ++m) {
    const KrylovResult lin = krylov_solve(iteration_, residual, preconditioner_, opts);
    local.linear_iterations += lin.iterations;
    xi += lin.x;
    if (!all_finite(xi))
      throw NumericalError("implicit step from t=" + std::to_string(state.t) + " produced a non-finite state");
    const double diff = lin.x.lpNorm<Eigen::Infinity>();
    local.history.push_back(diff);
    local.iterations = m;
    if (affine || diff <= cfg_.picard_tolerance * (1.0 + xi.lpNorm<Eigen::Infinity>())) break;
    if (m >= cfg_.picard_max_iterations) {
      if (stats) *stats = local;
      throw PicardError("Picard iteration did not converge in " + std::to_string(m) + " iterations at t=" +
                            std::to_string(t1),
                        local.history);
    }
    residual -= iteration_ * lin.x;
    VectorXd g_next = explicit_source(xi, t1);
    residual += theta_ * dt * (g_next - g);
    g = std::move(g_next);
  }
  if (stats) *stats = std::move(local);
  return DGField(state.space, std::move(xi), t1);
}

DGField step_backward_euler(const SemidiscreteSystem& system, const DGField& state, double dt, const TimeConfig& cfg) {
  ImplicitStepper stepper(system, 1.0, cfg);
  return stepper.step(state, dt);
}

DGField step_crank_nicolson(const SemidiscreteSystem& system, const DGField& state, double dt, const TimeConfig& cfg) {
  ImplicitStepper stepper(system, 0.5, cfg);
  return stepper.step(state, dt);
}

double resolve_dt(const SemidiscreteSystem& system, const TimeConfig& cfg) {
  double dt = cfg.dt ? *cfg.dt : cfl_dt(system, cfg.cfl_safety);
  const double lq = system.spec().lipschitz_bound;
  if (!is_explicit(cfg.integrator) && cfg.limit_picard_step && lq > 0.0 && !system.chemistry_is_affine())
    dt = std::min(dt, 0.5 / lq);
  return dt;
}

SolveResult solve(const SemidiscreteSystem& system, const TimeConfig& cfg, const ObserverConfig& observers,
                  const StepCallback& on_step) {
  validate_time_config(cfg);
  if (observers.stride == 0) throw InvalidArgument("observer stride must be >= 1");
  const double T = cfg.final_time;
  const auto& spec = system.spec();
  const bool with_errors = observers.errors && spec.exact.has_value();

  SolveResult result;
  DGField state = initial_state(system);

  auto sample = [&](std::size_t step, const DGField& s) {
    ObserverSample o;
    o.step = step;
    o.t = s.t;
    o.l2_norm = l2_norm(s);
    o.mass = total_mass(s);
    if (with_errors) {
      o.l2_error = l2_error(s, spec.exact->u, s.t);
      o.energy_error = energy_error(s, *spec.exact, s.t, spec, system.penalty());
    }
    result.samples.push_back(o);
  };

  sample(0, state);
  if (on_step) on_step(0, state);
  if (observers.record_trace) result.states.push_back(state);
  if (T == 0.0) {
    result.final_state = std::move(state);
    return result;
  }

  const double dt = resolve_dt(system, cfg);
  const auto n_steps = static_cast<std::size_t>(std::max(1.0, std::ceil(T / dt * (1.0 - 1e-12))));

  std::optional<ImplicitStepper> implicit, startup;
  if (cfg.integrator == Integrator::backward_euler) implicit.emplace(system, 1.0, cfg);
  if (cfg.integrator == Integrator::crank_nicolson) implicit.emplace(system, 0.5, cfg);
  if (cfg.integrator == Integrator::crank_nicolson && cfg.startup_steps > 0) startup.emplace(system, 1.0, cfg);

  std::optional<VectorXd> previous;
  double previous_dt = 0.0;
  for (std::size_t n = 1; n <= n_steps; ++n) {
    const double t_next = n == n_steps ? T : static_cast<double>(n) * dt;
    const double h = t_next - state.t;
    try {
      switch (cfg.integrator) {
        case Integrator::forward_euler: state = step_forward_euler(system, state, h); break;
        case Integrator::ssprk3: state = step_ssprk3(system, state, h); break;
        default: {
          PicardStats stats;
          if (startup && n <= static_cast<std::size_t>(cfg.startup_steps)) {
            state = startup->step(state, 0.5 * h, &stats);
            result.max_picard_iterations = std::max(result.max_picard_iterations, stats.iterations);
            state = startup->step(state, h - 0.5 * h, &stats);
          } else if (previous && previous_dt > 0.0) {
            // Linear extrapolation from the last two states.
            const VectorXd guess = state.coeffs + (h / previous_dt) * (state.coeffs - *previous);
            *previous = state.coeffs;
            state = implicit->step(state, h, &stats, &guess);
          } else {
            previous = state.coeffs;
            state = implicit->step(state, h, &stats);
          }
          previous_dt = h;
          result.max_picard_iterations = std::max(result.max_picard_iterations, stats.iterations);
        }
      }
    } catch (const PicardError& e) {
      throw PicardError("step " + std::to_string(n) + ": " + e.what(), e.history());
    } catch (const NumericalError& e) {
      throw NumericalError("step " + std::to_string(n) + ": " + e.what());
    }
    state.t = t_next;
    if (observers.record_trace) {
      result.states.push_back(state);
      result.step_sizes.push_back(h);
    }
    if (n % observers.stride == 0 || n == n_steps) sample(n, state);
    if (on_step) on_step(n, state);
  }
  result.steps = n_steps;
  result.final_state = std::move(state);
  return result;
}

}  // namespace dgair
