#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "dgair/error.hpp"
#include "dgair/norms.hpp"
#include "dgair/solver.hpp"

using namespace dgair;
using expr::parse;

namespace {

std::shared_ptr<const DGSpace> uniform_space(int n, int k) {
  return std::make_shared<const DGSpace>(std::make_shared<const Mesh>(build_uniform_mesh(n, n)), k);
}

std::shared_ptr<const DGSpace> single_element(int k) {
  auto mesh = std::make_shared<const Mesh>(Mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, {}));
  return std::make_shared<const DGSpace>(mesh, k);
}

PenaltyConfig no_penalty() {
  PenaltyConfig p = PenaltyConfig::for_scheme(Scheme::nipg, 0);
  p.sigma0 = 0.0;
  return p;
}

// u' = -lambda u on one constant element, no transport.
ProblemSpec scalar_decay(double lambda, const char* chemistry = "0") {
  ProblemSpec spec = make_preset("conservation-test");
  spec.k1 = lambda;
  spec.chemistry = parse(chemistry);
  spec.u0 = parse("1");
  spec.lipschitz_bound = 1.0;
  return spec;
}

}  // namespace

TEST_CASE("semidiscrete system") {
  auto space = uniform_space(2, 1);
  const ProblemSpec spec = make_preset("smooth-mms");
  PenaltyConfig bad = PenaltyConfig::for_scheme(Scheme::sipg, 1);
  bad.sigma0 = 0.0;
  CHECK_THROWS_AS(SemidiscreteSystem(space, spec, bad), InvalidArgument);
  bad.epsilon = 0;
  CHECK_THROWS_AS(SemidiscreteSystem(space, spec, bad), InvalidArgument);

  const SemidiscreteSystem sys(space, spec, PenaltyConfig::for_scheme(Scheme::sipg, 1));
  CHECK(sys.num_dofs() == 24);
  CHECK(sys.mass_factorization().max_reconstruction_error() <= 1e-12);
  CHECK(std::isfinite(sys.mass_factorization().max_condition_number()));
  CHECK_FALSE(sys.chemistry_is_affine());

  const SemidiscreteSystem affine(space, scalar_decay(0.5, "2*u + 1"), no_penalty());
  CHECK(affine.chemistry_is_affine());
  CHECK(affine.chemistry_slope() == 2.0);
}

TEST_CASE("initial state") {
  auto space = uniform_space(4, 2);
  ProblemSpec spec = make_preset("decay-test");
  spec.u0 = parse("0");
  const DGField zero = initial_state(SemidiscreteSystem(space, spec, PenaltyConfig::for_scheme(Scheme::sipg, 2)));
  CHECK(zero.coeffs.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.t == 0.0);
  spec.u0 = parse("1");
  const DGField one = initial_state(SemidiscreteSystem(space, spec, PenaltyConfig::for_scheme(Scheme::sipg, 2)));
  CHECK(eval_field(one, 7, {0.3, 0.3}) == doctest::Approx(1.0).epsilon(1e-13));

  // ||P sin sin|| -> 1/2.
  double previous = 1.0;
  for (int n : {2, 4, 8, 16}) {
    const SemidiscreteSystem sys(uniform_space(n, 1), make_preset("decay-test"),
                                 PenaltyConfig::for_scheme(Scheme::sipg, 1));
    const double gap = std::abs(l2_norm(initial_state(sys)) - 0.5);
    CHECK(gap < previous);
    previous = gap;
  }
  CHECK(previous < 1e-3);
}

TEST_CASE("cfl step") {
  ProblemSpec spec = make_preset("conservation-test");
  spec.c = parse("1");
  const SemidiscreteSystem sys(uniform_space(10, 1), spec, no_penalty());
  CHECK(sys.space().mesh().h_min() == doctest::Approx(0.1));
  CHECK(cfl_dt(sys, 1, 0.5) == doctest::Approx(0.5 / (3.0 / 0.1)).epsilon(1e-12));

  const SemidiscreteSystem fine(uniform_space(20, 1), spec, no_penalty());
  CHECK(cfl_dt(fine, 0.5) <= 0.5 * cfl_dt(sys, 0.5) * (1 + 1e-12));
  const SemidiscreteSystem penalized(uniform_space(10, 1), make_preset("smooth-mms"),
                                     PenaltyConfig::for_scheme(Scheme::sipg, 1));
  const SemidiscreteSystem penalized_fine(uniform_space(20, 1), make_preset("smooth-mms"),
                                          PenaltyConfig::for_scheme(Scheme::sipg, 1));
  CHECK(cfl_dt(penalized_fine, 0.5) <= 0.5 * cfl_dt(penalized, 0.5));

  const SemidiscreteSystem still(uniform_space(4, 1), make_preset("conservation-test"), no_penalty());
  CHECK_THROWS_AS(cfl_dt(still, 0.5), InvalidArgument);
  CHECK_THROWS_AS(cfl_dt(sys, 0.0), InvalidArgument);

  const CoefficientMaxima m = sample_coefficient_maxima(penalized);
  CHECK(m.c_max == 1.0);
  CHECK(m.k_max == 0.05);
}

TEST_CASE("explicit steps") {
  // Zero right-hand side leaves the state unchanged.
  const SemidiscreteSystem still(uniform_space(3, 2), make_preset("conservation-test"), no_penalty());
  const DGField s0 = initial_state(still);
  CHECK((step_forward_euler(still, s0, 0.1).coeffs - s0.coeffs).cwiseAbs().maxCoeff() == 0.0);
  CHECK((step_ssprk3(still, s0, 0.1).coeffs - s0.coeffs).cwiseAbs().maxCoeff() == 0.0);
  CHECK(step_ssprk3(still, s0, 0.1).t == doctest::Approx(0.1));

  const double lambda = 2.0, dt = 0.05;
  const SemidiscreteSystem decay(single_element(0), scalar_decay(lambda), no_penalty());
  DGField u = initial_state(decay);
  for (int n = 1; n <= 20; ++n) {
    u = step_forward_euler(decay, u, dt);
    CHECK(u.coeffs(0) == doctest::Approx(std::pow(1.0 - lambda * dt, n)).epsilon(1e-14));
  }

  // SSP-RK3 error shrinks by about 8 per halving.
  auto rk3_error = [&](int steps) {
    DGField v = initial_state(decay);
    const double h = 1.0 / steps;
    for (int n = 0; n < steps; ++n) v = step_ssprk3(decay, v, h);
    return std::abs(v.coeffs(0) - std::exp(-lambda));
  };
  const double ratio = rk3_error(20) / rk3_error(40);
  CHECK(std::log2(ratio) == doctest::Approx(3.0).epsilon(0.1));

  // Blow-up.
  const SemidiscreteSystem stiff(single_element(0), scalar_decay(1e300), no_penalty());
  CHECK_THROWS_AS(step_forward_euler(stiff, step_forward_euler(stiff, initial_state(stiff), 1e10), 1e10),
                  NumericalError);
}

TEST_CASE("implicit steps") {
  const double lambda = 3.0, dt = 0.1;
  const SemidiscreteSystem decay(single_element(0), scalar_decay(lambda), no_penalty());
  DGField u = initial_state(decay);
  for (int n = 1; n <= 10; ++n) {
    u = step_backward_euler(decay, u, dt);
    CHECK(u.coeffs(0) == doctest::Approx(std::pow(1.0 + lambda * dt, -n)).epsilon(1e-13));
  }
  DGField c = initial_state(decay);
  for (int n = 1; n <= 10; ++n) {
    c = step_crank_nicolson(decay, c, dt);
    CHECK(c.coeffs(0) == doctest::Approx(std::pow((1 - 0.5 * lambda * dt) / (1 + 0.5 * lambda * dt), n)).epsilon(1e-13));
  }

  // Affine Q: the fixed point is reached by one solve.
  const SemidiscreteSystem affine(uniform_space(4, 1), make_preset("decay-test"),
                                  PenaltyConfig::for_scheme(Scheme::sipg, 1));
  ImplicitStepper be(affine, 1.0, {});
  PicardStats stats;
  be.step(initial_state(affine), 0.01, &stats);
  CHECK(stats.iterations <= 2);

  // Q = sin(u), L_Q = 1.
  ProblemSpec nonlinear = make_preset("decay-test");
  nonlinear.chemistry = parse("sin(u)");
  nonlinear.lipschitz_bound = 1.0;
  const SemidiscreteSystem sys(uniform_space(4, 1), nonlinear, PenaltyConfig::for_scheme(Scheme::sipg, 1));
  ImplicitStepper stepper(sys, 1.0, {});
  PicardStats ns;
  const DGField next = stepper.step(initial_state(sys), 0.5, &ns);
  CHECK(ns.iterations > 2);
  CHECK(ns.iterations < 50);
  CHECK(ns.history.size() == static_cast<std::size_t>(ns.iterations));
  CHECK(ns.history.back() <= 1e-12 * (1.0 + next.coeffs.cwiseAbs().maxCoeff()));
  for (std::size_t i = 1; i < ns.history.size(); ++i) CHECK(ns.history[i] < ns.history[i - 1]);
  TimeConfig cfg;
  cfg.integrator = Integrator::backward_euler;
  cfg.dt = 2.0;
  cfg.final_time = 2.0;
  CHECK(resolve_dt(sys, cfg) == doctest::Approx(0.5));
  cfg.limit_picard_step = false;
  CHECK(resolve_dt(sys, cfg) == 2.0);

  TimeConfig strict;
  strict.picard_max_iterations = 2;
  ImplicitStepper limited(sys, 1.0, strict);
  try {
    limited.step(initial_state(sys), 0.5);
    FAIL("expected a Picard failure");
  } catch (const PicardError& e) {
    CHECK(e.history().size() == 2);
  }
}

TEST_CASE("time loop") {
  const ProblemSpec decay = make_preset("decay-test");
  const SemidiscreteSystem sys(uniform_space(16, 1), decay, PenaltyConfig::for_scheme(Scheme::sipg, 1));

  TimeConfig zero;
  zero.final_time = 0.0;
  const SolveResult r0 = solve(sys, zero);
  CHECK(r0.steps == 0);
  CHECK((r0.final_state.coeffs - initial_state(sys).coeffs).cwiseAbs().maxCoeff() == 0.0);

  // Backward Euler, 100 steps, no source: the L2 norm never grows.
  TimeConfig be;
  be.integrator = Integrator::backward_euler;
  be.dt = 0.001;
  be.final_time = 0.1;
  const SolveResult r = solve(sys, be);
  CHECK(r.steps == 100);
  CHECK(r.samples.size() == 101);
  for (std::size_t i = 1; i < r.samples.size(); ++i)
    CHECK(r.samples[i].l2_norm <= r.samples[i - 1].l2_norm * (1.0 + 1e-12));
  CHECK(r.final_state.t == doctest::Approx(0.1).epsilon(1e-15));

  // Clipped last step and stride.
  TimeConfig clip = be;
  clip.dt = 0.03;
  ObserverConfig obs;
  obs.stride = 2;
  obs.record_trace = true;
  std::size_t calls = 0;
  const SolveResult rc = solve(sys, clip, obs, [&](std::size_t, const DGField&) { ++calls; });
  CHECK(rc.steps == 4);
  CHECK(calls == 5);
  CHECK(rc.step_sizes.size() == 4);
  CHECK(rc.step_sizes.back() == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(rc.states.size() == 5);
  CHECK(rc.final_state.t == 0.1);
  REQUIRE(rc.samples.size() == 3);
  CHECK(rc.samples[0].step == 0);
  CHECK(rc.samples[1].step == 2);
  CHECK(rc.samples[2].step == 4);

  // Zero dynamics keep the mass.
  const SemidiscreteSystem still(uniform_space(8, 1), make_preset("conservation-test"), no_penalty());
  TimeConfig rk;
  rk.dt = 0.001;
  rk.final_time = 0.1;
  const SolveResult rs = solve(still, rk);
  for (const auto& s : rs.samples) CHECK(std::abs(s.mass - rs.samples[0].mass) <= 1e-12);
  CHECK_FALSE(rs.samples[0].l2_error.has_value());

  TimeConfig bad = be;
  bad.dt = -1.0;
  CHECK_THROWS_AS(solve(sys, bad), InvalidArgument);
  bad = be;
  bad.picard_tolerance = 0.0;
  CHECK_THROWS_AS(validate_time_config(bad), InvalidArgument);
}

TEST_CASE("explicit runs at the CFL step stay finite") {
  const SemidiscreteSystem sys(uniform_space(4, 1), make_preset("smooth-mms"),
                               PenaltyConfig::for_scheme(Scheme::sipg, 1));
  for (Integrator in : {Integrator::forward_euler, Integrator::ssprk3}) {
    TimeConfig cfg;
    cfg.integrator = in;
    const double dt = cfl_dt(sys, cfg.cfl_safety);
    cfg.final_time = 1000 * dt;
    ObserverConfig obs;
    obs.stride = 100;
    const SolveResult r = solve(sys, cfg, obs);
    CHECK(r.steps == 1000);
    CHECK(r.final_state.coeffs.allFinite());
    CHECK(l2_norm(r.final_state) < 1.0);
  }
}

TEST_CASE("smooth manufactured solution improves under refinement") {
  auto error_at = [](int n) {
    ProblemSpec spec = make_preset("smooth-mms");
    spec.final_time = 0.02;
    const SemidiscreteSystem sys(uniform_space(n, 1), spec, PenaltyConfig::for_scheme(Scheme::sipg, 1));
    TimeConfig cfg;
    cfg.final_time = spec.final_time;
    const SolveResult r = solve(sys, cfg);
    return r.samples.back().l2_error.value();
  };
  const double e8 = error_at(8), e16 = error_at(16);
  CHECK(std::isfinite(e16));
  CHECK(e16 < e8);
}

TEST_CASE("integrator names") {
  for (Integrator i : {Integrator::forward_euler, Integrator::ssprk3, Integrator::backward_euler,
                       Integrator::crank_nicolson})
    CHECK(parse_integrator(integrator_name(i)) == i);
  CHECK_FALSE(parse_integrator("rk4").has_value());
  CHECK(is_explicit(Integrator::ssprk3));
  CHECK_FALSE(is_explicit(Integrator::crank_nicolson));
  CHECK(integrator_order(Integrator::ssprk3) == 3);
  CHECK(integrator_order(Integrator::crank_nicolson) == 2);
  CHECK(integrator_order(Integrator::backward_euler) == 1);
}
