#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dgair/analysis.hpp"
#include "dgair/error.hpp"
#include "dgair/norms.hpp"
#include "oracle.hpp"

using namespace dgair;
using expr::parse;

namespace {

std::shared_ptr<const DGSpace> uniform_space(int n, int k) {
  return std::make_shared<const DGSpace>(std::make_shared<const Mesh>(build_uniform_mesh(n, n)), k);
}

DGField random_field(std::shared_ptr<const DGSpace> space, std::mt19937_64& rng) {
  DGField f(space);
  f.coeffs = random_coefficients(space->num_dofs(), rng);
  return f;
}

}  // namespace

TEST_CASE("observed order") {
  CHECK(observed_order(0.2, 0.1) == doctest::Approx(1.0));
  CHECK(observed_order(0.08, 0.02) == doctest::Approx(2.0));
  CHECK_THROWS_AS(observed_order(0.0, 0.1), InvalidArgument);

  std::mt19937_64 a(3), b(3);
  const Eigen::VectorXd x = random_coefficients(500, a), y = random_coefficients(500, b);
  CHECK(x == y);
  CHECK(x.cwiseAbs().maxCoeff() <= 1.0);
  CHECK(x.minCoeff() < -0.9);
  CHECK(x.maxCoeff() > 0.9);
}

TEST_CASE("energy seminorm") {
  auto space = uniform_space(3, 2);
  const ProblemSpec spec = make_preset("smooth-mms");
  const PenaltyConfig pen = PenaltyConfig::for_scheme(Scheme::sipg, 2);
  const DGField constant = l2_project([](double, double) { return 3.0; }, space);
  CHECK(energy_seminorm(constant, spec, pen) <= 1e-12);
  CHECK(energy_seminorm(constant, spec, pen, EdgeSet::all) > 1.0);

  std::mt19937_64 rng(12);
  for (int i = 0; i < 50; ++i) {
    const DGField v = random_field(space, rng), w = random_field(space, rng);
    const double a = -2.5;
    DGField av(space, a * v.coeffs, 0.0), sum(space, v.coeffs + w.coeffs, 0.0);
    CHECK(std::abs(energy_seminorm(av, spec, pen) - std::abs(a) * energy_seminorm(v, spec, pen)) <=
          1e-13 * energy_seminorm(av, spec, pen));
    CHECK(energy_seminorm(sum, spec, pen) <= energy_seminorm(v, spec, pen) + energy_seminorm(w, spec, pen) + 1e-12);
  }

  // Indicator of one element against the dense oracle.
  const auto oracle = testing::oracle_operators(space->mesh(), 2, spec, pen.epsilon, pen.sigma0, pen.beta0);
  for (std::size_t e : {0u, 5u, 11u}) {
    DGField chi(space);
    chi.local(e)(0) = 1.0;
    const Eigen::MatrixXd k = oracle.broken_gradient + oracle.jump_interior;
    const double expected = std::sqrt(chi.coeffs.dot(k * chi.coeffs));
    CHECK(energy_seminorm(chi, spec, pen) == doctest::Approx(expected).epsilon(1e-12));
    const Eigen::MatrixXd ka = oracle.broken_gradient + oracle.jump_all;
    CHECK(energy_seminorm(chi, spec, pen, EdgeSet::all) ==
          doctest::Approx(std::sqrt(chi.coeffs.dot(ka * chi.coeffs))).epsilon(1e-12));
  }
  // A random field too.
  const DGField r = random_field(space, rng);
  const double expected = std::sqrt(r.coeffs.dot((oracle.broken_gradient + oracle.jump_interior) * r.coeffs));
  CHECK(energy_seminorm(r, spec, pen) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("error norms") {
  const ProblemSpec poly = make_preset("polynomial-mms");
  const PenaltyConfig pen = PenaltyConfig::for_scheme(Scheme::sipg, 4);
  auto space4 = uniform_space(2, 4);
  const double t = 0.7;
  auto exact_at = [&](double x, double y) { return expr::eval(*poly.exact->u, {x, y, t, std::nullopt}); };
  const DGField p = l2_project(exact_at, space4);
  CHECK(l2_error(p, poly.exact->u, t) <= 1e-12);
  CHECK(energy_error(p, *poly.exact, t, poly, pen) <= 1e-10);

  // Sign flip of the error: 2P - U against U.
  std::mt19937_64 rng(21);
  const DGField u = random_field(space4, rng);
  const DGField flipped(space4, 2.0 * p.coeffs - u.coeffs, t);
  CHECK(l2_error(u, poly.exact->u, t) == doctest::Approx(l2_error(flipped, poly.exact->u, t)).epsilon(1e-12));
  CHECK(energy_error(u, *poly.exact, t, poly, pen) ==
        doctest::Approx(energy_error(flipped, *poly.exact, t, poly, pen)).epsilon(1e-12));

  // Zero field against sin(pi x) sin(pi y).
  const ProblemSpec smooth = make_preset("smooth-mms");
  auto space = uniform_space(8, 1);
  const DGField zero(space);
  CHECK(l2_error(zero, smooth.exact->u, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(l2_error(zero, smooth.exact->u, 1.0) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-12));
  const double grad = std::sqrt(0.05 * std::numbers::pi * std::numbers::pi / 2.0);
  CHECK(energy_error(zero, *smooth.exact, 0.0, smooth, PenaltyConfig::for_scheme(Scheme::sipg, 1)) ==
        doctest::Approx(grad).epsilon(1e-6));

  CHECK(l2_norm(p) == doctest::Approx(l2_error(zero.space == space4 ? zero : DGField(space4), poly.exact->u, t)));
  const DGField one = l2_project([](double, double) { return 1.0; }, space);
  CHECK(total_mass(one) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("coercivity scan") {
  const ProblemSpec spec = make_preset("smooth-mms");
  const std::vector<double> grid{0.0, 0.1, 1.0, 10.0, 40.0};
  for (int k : {1, 2}) {
    auto space = uniform_space(4, k);
    const CoercivityReport sipg = coercivity_scan(space, spec, Scheme::sipg, grid, 100, 42);
    REQUIRE(sipg.entries.size() == grid.size());
    CHECK(sipg.entries.front().sigma0 == 0.0);
    CHECK(sipg.entries.front().min_ratio <= 0.0);
    CHECK(sipg.kappa > 0.0);
    CHECK(sipg.reference_sigma0 == 10.0 * k * k);
    REQUIRE(sipg.threshold.has_value());
    CHECK(*sipg.threshold > 0.0);
    CHECK(*sipg.threshold <= 10.0 * k * k);
    CHECK(sipg.samples == 100);
    for (const auto& e : sipg.entries) CHECK(std::isfinite(e.min_ratio));

    const CoercivityReport nipg = coercivity_scan(space, spec, Scheme::nipg, {0.1, 1.0, 10.0}, 100, 42);
    for (const auto& e : nipg.entries) CHECK(e.min_ratio > 0.0);
  }
  // Deterministic for a fixed seed.
  auto space = uniform_space(3, 1);
  const auto a = coercivity_scan(space, spec, Scheme::iipg, grid, 20, 7);
  const auto b = coercivity_scan(space, spec, Scheme::iipg, grid, 20, 7);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(a.entries[i].min_ratio == b.entries[i].min_ratio);
  CHECK_THROWS_AS(coercivity_scan(space, spec, Scheme::sipg, {-1.0}, 10, 1), InvalidArgument);
  CHECK_THROWS_AS(coercivity_scan(space, spec, Scheme::sipg, grid, 0, 1), InvalidArgument);
}

TEST_CASE("upwind and NIPG probes") {
  const ProblemSpec spec = make_preset("smooth-mms");
  for (int k : {0, 1, 2}) {
    auto space = uniform_space(4, k);
    CHECK(upwind_min_ratio(*space, spec, 100, 42) >= -1e-12);
    CHECK(nipg_identity_defect(*space, spec, 0.1, 1.0, 100, 42) <= 1e-12);
    CHECK(nipg_identity_defect(*space, spec, 10.0, 2.0, 100, 42) <= 1e-12);
  }
}

TEST_CASE("consistency residual") {
  const ProblemSpec poly = make_preset("polynomial-mms");
  double r2 = 0.0, r4 = 0.0;
  for (int n : {2, 4}) {
    const SemidiscreteSystem sys(uniform_space(n, 4), poly, PenaltyConfig::for_scheme(Scheme::sipg, 4));
    for (double t : {0.0, 0.5, 1.0}) {
      const double r = consistency_residual(sys, t);
      CHECK(r <= 1e-10);
      (n == 2 ? r2 : r4) = std::max(n == 2 ? r2 : r4, r);
    }
  }
  CHECK(std::abs(r2 - r4) <= 1e-10);

  ProblemSpec zero = make_preset("conservation-test");
  zero.exact = ExactSolution::from(parse("0"));
  zero.kx = parse("0.05");
  zero.ky = parse("0.05");
  zero.c = parse("1");
  zero.e = parse("0.5");
  const SemidiscreteSystem zs(uniform_space(3, 2), zero, PenaltyConfig::for_scheme(Scheme::sipg, 2));
  CHECK(consistency_residual(zs, 0.3) == 0.0);

  const SemidiscreteSystem low(uniform_space(2, 3), poly, PenaltyConfig::for_scheme(Scheme::sipg, 3));
  CHECK_THROWS_AS(consistency_residual(low, 0.0), InvalidArgument);
  const SemidiscreteSystem smooth(uniform_space(2, 4), make_preset("smooth-mms"),
                                  PenaltyConfig::for_scheme(Scheme::sipg, 4));
  CHECK_THROWS_AS(consistency_residual(smooth, 0.0), InvalidArgument);
}

TEST_CASE("local conservation") {
  ObserverConfig obs;
  obs.record_trace = true;

  PenaltyConfig none = PenaltyConfig::for_scheme(Scheme::nipg, 1);
  none.sigma0 = 0.0;
  const SemidiscreteSystem still(uniform_space(4, 1), make_preset("conservation-test"), none);
  TimeConfig rk;
  rk.dt = 0.01;
  rk.final_time = 0.05;
  CHECK(local_conservation_check(still, solve(still, rk, obs), Integrator::ssprk3).max_violation == 0.0);

  const SemidiscreteSystem sys(uniform_space(8, 1), make_preset("smooth-mms"),
                               PenaltyConfig::for_scheme(Scheme::sipg, 1));
  for (Integrator in : {Integrator::backward_euler, Integrator::crank_nicolson, Integrator::forward_euler,
                        Integrator::ssprk3}) {
    TimeConfig cfg;
    cfg.integrator = in;
    cfg.dt = is_explicit(in) ? cfl_dt(sys, 0.5) : 0.01;
    cfg.final_time = 5 * *cfg.dt;
    cfg.linear_tolerance = 1e-12;
    const SolveResult trace = solve(sys, cfg, obs);
    const ConservationReport report = local_conservation_check(sys, trace, in);
    CHECK(report.max_violation <= 1e-10);
    CHECK(report.element_violation.size() == sys.space().num_elements());
    const auto [lo, hi] = std::minmax_element(report.element_violation.begin(), report.element_violation.end());
    CHECK(*hi - *lo <= 1e-12);

    // A perturbation of one element's mean breaks that element's balance.
    SolveResult broken = trace;
    broken.states[3].coeffs(static_cast<Eigen::Index>(sys.space().offset(17))) += 1e-6;
    const ConservationReport bad = local_conservation_check(sys, broken, in);
    CHECK(bad.max_violation > 1e-9);
    if (in == Integrator::backward_euler) CHECK(bad.worst_element == 17);
  }

  SolveResult empty;
  CHECK_THROWS_AS(local_conservation_check(sys, empty, Integrator::backward_euler), InvalidArgument);
}

TEST_CASE("convergence study plumbing") {
  ConvergenceOptions opt;
  opt.levels = {2, 4, 8};
  opt.k = 1;
  ProblemSpec spec = make_preset("smooth-mms");
  spec.final_time = 0.02;
  const ConvergenceReport r = convergence_study(spec, opt);
  REQUIRE(r.levels.size() == 3);
  CHECK_FALSE(r.energy_orders[0].has_value());
  CHECK_FALSE(r.l2_orders[0].has_value());
  for (std::size_t i = 1; i < 3; ++i) {
    CHECK(r.levels[i].h == doctest::Approx(0.5 * r.levels[i - 1].h).epsilon(1e-15));
    CHECK(r.levels[i].energy_error < r.levels[i - 1].energy_error);
    CHECK(r.energy_orders[i].has_value());
    CHECK(r.levels[i].dofs == 4 * r.levels[i - 1].dofs);
  }
  for (const auto& l : r.levels) {
    CHECK(l.linf_l2_error >= l.l2_error);
    CHECK(l.energy_error_integrated > 0.0);
    CHECK(l.steps >= 1);
  }
  CHECK(r.reference_order() == 1);

  ConvergenceOptions two = opt;
  two.levels = {2, 4};
  CHECK_THROWS_AS(convergence_study(spec, two), InvalidArgument);
  ConvergenceOptions uneven = opt;
  uneven.levels = {2, 4, 6};
  CHECK_THROWS_AS(convergence_study(spec, uneven), InvalidArgument);
  CHECK_THROWS_AS(convergence_study(make_preset("decay-test"), opt), InvalidArgument);
}
