#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dgair/error.hpp"
#include "dgair/model.hpp"

using namespace dgair;
using expr::parse;

namespace {

ProblemSpec zero_problem() {
  ProblemSpec spec;
  for (auto* e : {&spec.kx, &spec.ky, &spec.c, &spec.e, &spec.emission, &spec.chemistry, &spec.u0}) *e = parse("0");
  return spec;
}

// Residual of the PDE by central differences, independent of the symbolic pipeline.
double numeric_residual(const ProblemSpec& spec, const expr::ExprPtr& u, double x, double y, double t) {
  const double h = 1e-4;
  auto U = [&](double px, double py, double pt) { return expr::eval(*u, {px, py, pt, std::nullopt}); };
  const double u0 = U(x, y, t);
  const double ut = (U(x, y, t + h) - U(x, y, t - h)) / (2 * h);
  const double ux = (U(x + h, y, t) - U(x - h, y, t)) / (2 * h);
  const double uy = (U(x, y + h, t) - U(x, y - h, t)) / (2 * h);
  const double uxx = (U(x + h, y, t) - 2 * u0 + U(x - h, y, t)) / (h * h);
  const double uyy = (U(x, y + h, t) - 2 * u0 + U(x, y - h, t)) / (h * h);
  const expr::Env env{x, y, t, u0};
  return ut + expr::eval(*spec.c, env) * ux + expr::eval(*spec.e, env) * uy - expr::eval(*spec.kx, env) * uxx -
         expr::eval(*spec.ky, env) * uyy - f_eval(spec, u0, x, y, t);
}

}  // namespace

TEST_CASE("f_eval") {
  ProblemSpec spec = zero_problem();
  for (double u : {-3.0, 0.0, 2.5}) CHECK(f_eval(spec, u, 0.3, 0.4, 1.0) == 0.0);
  spec.k1 = 1.0;
  spec.k2 = 2.0;
  spec.emission = parse("5");
  CHECK(f_eval(spec, 1.0, 0.1, 0.2, 0.0) == 2.0);

  ProblemSpec q = zero_problem();
  q.chemistry = parse("sin(u)");
  q.lipschitz_bound = 1.0;
  CHECK(f_eval(q, 0.0, 0.5, 0.5, 0.0) == 0.0);
  const auto report = validate(q);
  REQUIRE(report.find("lipschitz") != nullptr);
  CHECK(report.find("lipschitz")->passed);

  const CompiledProblem compiled(spec);
  CHECK(compiled.f(1.0, 0.1, 0.2, 0.0) == 2.0);
}

TEST_CASE("f_eval is affine for affine Q") {
  ProblemSpec spec = zero_problem();
  spec.k1 = 0.3;
  spec.k2 = 0.2;
  spec.emission = parse("x*y + t");
  spec.chemistry = parse("2*u - 1");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double a = 0.5 * (uni(rng) + 1.0), u1 = uni(rng), u2 = uni(rng);
    const double x = uni(rng), y = uni(rng), t = uni(rng);
    const double lhs = f_eval(spec, a * u1 + (1 - a) * u2, x, y, t);
    const double rhs = a * f_eval(spec, u1, x, y, t) + (1 - a) * f_eval(spec, u2, x, y, t);
    CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("mms forcing") {
  ProblemSpec spec = zero_problem();
  const auto zero = ExactSolution::from(parse("0"));
  CHECK(expr::to_string(mms_forcing(spec, zero)) == "0");

  ProblemSpec heat = zero_problem();
  heat.kx = parse("1");
  heat.ky = parse("1");
  const auto exact = ExactSolution::from(parse("exp(-t)*sin(pi*x)*sin(pi*y)"));
  heat.emission = mms_forcing(heat, exact);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double factor = 2.0 * std::numbers::pi * std::numbers::pi - 1.0;
  for (int i = 0; i < 100; ++i) {
    const double x = uni(rng), y = uni(rng), t = uni(rng);
    const double u = expr::eval(*exact.u, {x, y, t, std::nullopt});
    const double e = expr::eval(*heat.emission, {x, y, t, 0.0});
    CHECK(std::abs(e - factor * u) <= 1e-12 * std::max(1.0, std::abs(factor * u)));
  }

  for (const char* name : {"smooth-mms", "polynomial-mms"}) {
    const ProblemSpec p = make_preset(name);
    REQUIRE(p.exact);
    for (int i = 0; i < 100; ++i) {
      const double x = uni(rng), y = uni(rng), t = uni(rng);
      CHECK(std::abs(pde_residual(p, *p.exact, x, y, t)) <= 1e-10);
      CHECK(std::abs(numeric_residual(p, p.exact->u, x, y, t)) <= 1e-5);
    }
  }
  const ProblemSpec poly = make_preset("polynomial-mms");
  auto degree = expr::polynomial_degree(*expr::substitute(poly.emission, expr::Var::u, expr::number(0.0)));
  // Q = 0.1 sin(u) makes E non-polynomial; the transport part is polynomial of degree <= 4.
  ProblemSpec linear = poly;
  linear.chemistry = parse("0");
  degree = expr::polynomial_degree(*mms_forcing(linear, *poly.exact));
  REQUIRE(degree.has_value());
  CHECK(*degree <= 4);

  ProblemSpec variable = heat;
  variable.kx = parse("1 + x");
  CHECK_THROWS_AS(mms_forcing(variable, exact), InvalidArgument);
}

TEST_CASE("validate") {
  ProblemSpec spec = zero_problem();
  spec.kx = parse("1");
  spec.ky = parse("1");
  spec.c = parse("1");
  spec.e = parse("0.5");
  spec.bounds = {0.5, 2.0, 0.5, 2.0};
  auto report = validate(spec);
  CHECK(report.find("diffusion_bounds")->passed);
  CHECK(report.find("wind_bounds")->passed);
  CHECK(report.all_passed());

  spec.kx = parse("x");
  spec.bounds.k_lower = 0.1;
  report = validate(spec);
  const CheckResult* diff = report.find("diffusion_bounds");
  REQUIRE(diff);
  CHECK_FALSE(diff->passed);
  CHECK(diff->detail.find("x=0") != std::string::npos);
  CHECK_FALSE(report.all_passed());

  ProblemSpec quad = zero_problem();
  quad.chemistry = parse("u^2");
  quad.u_min = -10.0;
  quad.u_max = 10.0;
  quad.lipschitz_bound = 5.0;
  const auto quad_report = validate(quad);
  const CheckResult* lip = quad_report.find("lipschitz");
  REQUIRE(lip);
  CHECK_FALSE(lip->passed);
  CHECK(lip->detail.find("20") != std::string::npos);
  CHECK(lip->detail.find("local") != std::string::npos);

  ProblemSpec bad = zero_problem();
  bad.k1 = -1.0;
  bad.final_time = 0.0;
  bad.chemistry = parse("u*x");
  report = validate(bad);
  CHECK_FALSE(report.find("deposition_nonnegative")->passed);
  CHECK_FALSE(report.find("final_time_positive")->passed);
  CHECK_FALSE(report.find("dependencies:Q")->passed);

  // Wind with a vanishing component is reported, not rejected.
  const auto zero_report = validate(make_preset("conservation-test"));
  const CheckResult* wind = zero_report.find("wind_bounds");
  REQUIRE(wind);
  CHECK_FALSE(wind->passed);
}

TEST_CASE("presets") {
  for (const auto& name : preset_names()) {
    const ProblemSpec p = make_preset(name);
    CHECK(p.name == name);
    const auto report = validate(p);
    CHECK(report.find("lipschitz")->passed);
    CHECK(report.find("deposition_nonnegative")->passed);
    if (p.exact) CHECK(report.find("exact_boundary_zero")->passed);
  }
  CHECK(make_preset("smooth-mms").final_time == 0.1);
  CHECK_THROWS_AS(make_preset("nope"), InvalidArgument);
}
