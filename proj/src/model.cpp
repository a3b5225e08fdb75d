#include "dgair/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dgair/error.hpp"

namespace dgair {

using expr::ExprPtr;
using expr::Var;

namespace {

std::string point_text(double x, double y) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(x=%.6g, y=%.6g)", x, y);
  return buf;
}

bool is_constant(const ExprPtr& e) {
  return !expr::depends_on(*e, Var::x) && !expr::depends_on(*e, Var::y) && !expr::depends_on(*e, Var::t) &&
         !expr::depends_on(*e, Var::u);
}

constexpr int kSamplesPerAxis = 21;

}  // namespace

ExactSolution ExactSolution::from(ExprPtr u) {
  ExactSolution s;
  s.u = expr::simplify(u);
  s.u_t = expr::differentiate(s.u, Var::t);
  s.u_x = expr::differentiate(s.u, Var::x);
  s.u_y = expr::differentiate(s.u, Var::y);
  s.u_xx = expr::differentiate(s.u_x, Var::x);
  s.u_yy = expr::differentiate(s.u_y, Var::y);
  return s;
}

double f_eval(const ProblemSpec& spec, double u, double x, double y, double t) {
  const expr::Env env{x, y, t, u};
  return -(spec.k1 + spec.k2) * u + expr::eval(*spec.emission, env) + expr::eval(*spec.chemistry, env);
}

CompiledProblem::CompiledProblem(const ProblemSpec& spec)
    : kx(spec.kx),
      ky(spec.ky),
      c(spec.c),
      e(spec.e),
      emission(spec.emission),
      chemistry(spec.chemistry),
      u0(spec.u0),
      deposition(spec.k1 + spec.k2) {}

ExprPtr mms_forcing(const ProblemSpec& spec, const ExactSolution& exact) {
  for (const auto* coeff : {&spec.kx, &spec.ky, &spec.c, &spec.e}) {
    if (!is_constant(*coeff))
      throw InvalidArgument("manufactured forcing needs constant kx, ky, c, e (unsupported configuration)");
  }
  using namespace expr;
  ExprPtr transport = add(add(exact.u_t, mul(spec.c, exact.u_x)), mul(spec.e, exact.u_y));
  ExprPtr diffusion = add(mul(spec.kx, exact.u_xx), mul(spec.ky, exact.u_yy));
  ExprPtr reaction = mul(number(spec.k1 + spec.k2), exact.u);
  ExprPtr chem = substitute(spec.chemistry, Var::u, exact.u);
  return simplify(sub(add(sub(transport, diffusion), reaction), chem));
}

double pde_residual(const ProblemSpec& spec, const ExactSolution& exact, double x, double y, double t) {
  const expr::Env env{x, y, t, std::nullopt};
  const double u = expr::eval(*exact.u, env);
  const expr::Env full{x, y, t, u};
  const double lhs = expr::eval(*exact.u_t, env) + expr::eval(*spec.c, full) * expr::eval(*exact.u_x, env) +
                     expr::eval(*spec.e, full) * expr::eval(*exact.u_y, env) -
                     expr::eval(*spec.kx, full) * expr::eval(*exact.u_xx, env) -
                     expr::eval(*spec.ky, full) * expr::eval(*exact.u_yy, env);
  return lhs - f_eval(spec, u, x, y, t);
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* ValidationReport::find(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

ValidationReport validate(const ProblemSpec& spec) {
  ValidationReport report;
  const Rect& dom = spec.domain;

  auto dependency_check = [&](const char* name, const ExprPtr& e, std::initializer_list<Var> allowed) {
    CheckResult r{std::string("dependencies:") + name, true, "ok"};
    if (!e) {
      r.passed = false;
      r.detail = "missing expression";
    } else {
      for (Var v : {Var::x, Var::y, Var::t, Var::u}) {
        if (expr::depends_on(*e, v) && std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
          r.passed = false;
          r.detail = std::string("depends on '") + expr::var_name(v) + "'";
        }
      }
    }
    report.checks.push_back(r);
    return r.passed;
  };
  bool deps_ok = true;
  deps_ok &= dependency_check("kx", spec.kx, {Var::x, Var::y});
  deps_ok &= dependency_check("ky", spec.ky, {Var::x, Var::y});
  deps_ok &= dependency_check("c", spec.c, {Var::x, Var::y});
  deps_ok &= dependency_check("e", spec.e, {Var::x, Var::y});
  deps_ok &= dependency_check("E", spec.emission, {Var::x, Var::y, Var::t});
  deps_ok &= dependency_check("Q", spec.chemistry, {Var::u});
  deps_ok &= dependency_check("u0", spec.u0, {Var::x, Var::y});

  report.checks.push_back({"deposition_nonnegative", spec.k1 >= 0.0 && spec.k2 >= 0.0,
                           "k1=" + std::to_string(spec.k1) + " k2=" + std::to_string(spec.k2)});
  report.checks.push_back({"final_time_positive", spec.final_time > 0.0, "T=" + std::to_string(spec.final_time)});
  if (!deps_ok) return report;

  // Coefficient bounds on a grid including the boundary.
  auto bound_check = [&](const char* name, const ExprPtr& a, const ExprPtr& b, double lower, double upper) {
    CheckResult r{name, true, ""};
    if (!(lower > 0.0)) {
      r.passed = false;
      r.detail = "declared lower bound must be positive";
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int j = 0; j < kSamplesPerAxis && r.passed; ++j) {
      for (int i = 0; i < kSamplesPerAxis; ++i) {
        const double x = dom.x0 + dom.width() * i / (kSamplesPerAxis - 1);
        const double y = dom.y0 + dom.height() * j / (kSamplesPerAxis - 1);
        const expr::Env env{x, y, 0.0, 0.0};
        const double va = std::abs(expr::eval(*a, env));
        const double vb = std::abs(expr::eval(*b, env));
        lo = std::min({lo, va, vb});
        hi = std::max({hi, va, vb});
        if (std::min(va, vb) < lower) {
          r.passed = false;
          r.detail = "min below declared lower bound " + std::to_string(lower) + " at " + point_text(x, y);
          break;
        }
        if (std::max(va, vb) > upper) {
          r.passed = false;
          r.detail = "max above declared upper bound " + std::to_string(upper) + " at " + point_text(x, y);
          break;
        }
      }
    }
    if (r.passed) r.detail = "sampled range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
    report.checks.push_back(r);
  };
  bound_check("diffusion_bounds", spec.kx, spec.ky, spec.bounds.k_lower, spec.bounds.k_upper);
  bound_check("wind_bounds", spec.c, spec.e, spec.bounds.c_lower, spec.bounds.c_upper);

  {
    // |dQ/du| <= L_Q on the declared state interval.
    CheckResult r{"lipschitz", true, ""};
    const ExprPtr dq = expr::differentiate(spec.chemistry, Var::u);
    double worst = 0.0;
    double worst_u = spec.u_min;
    constexpr int kLipschitzSamples = 1000;
    for (int i = 0; i < kLipschitzSamples; ++i) {
      const double u = spec.u_min + (spec.u_max - spec.u_min) * i / (kLipschitzSamples - 1);
      const double v = std::abs(expr::eval(*dq, {0.0, 0.0, 0.0, u}));
      if (v > worst) {
        worst = v;
        worst_u = u;
      }
    }
    r.passed = worst <= spec.lipschitz_bound;
    char buf[160];
    std::snprintf(buf, sizeof buf, "max |dQ/du| = %.6g at u=%.6g vs L_Q=%.6g on [%g, %g]%s", worst, worst_u,
                  spec.lipschitz_bound, spec.u_min, spec.u_max,
                  expr::depends_on(*dq, Var::u) ? " (local bound: dQ/du varies with u)" : "");
    r.detail = buf;
    report.checks.push_back(r);
  }

  if (spec.exact) {
    CheckResult r{"exact_boundary_zero", true, "ok"};
    constexpr int kBoundarySamples = 41;
    for (double t : {0.0, 0.5 * spec.final_time, spec.final_time}) {
      for (int i = 0; i < kBoundarySamples && r.passed; ++i) {
        const double s = static_cast<double>(i) / (kBoundarySamples - 1);
        const Point pts[4] = {{dom.x0 + s * dom.width(), dom.y0},
                              {dom.x0 + s * dom.width(), dom.y1},
                              {dom.x0, dom.y0 + s * dom.height()},
                              {dom.x1, dom.y0 + s * dom.height()}};
        for (const Point& p : pts) {
          const double v = expr::eval(*spec.exact->u, {p.x, p.y, t, std::nullopt});
          if (std::abs(v) > 1e-12) {
            r.passed = false;
            r.detail = "u = " + std::to_string(v) + " at " + point_text(p.x, p.y);
            break;
          }
        }
      }
    }
    report.checks.push_back(r);
  }
  return report;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"smooth-mms", "polynomial-mms", "decay-test", "conservation-test"};
  return names;
}

ProblemSpec make_preset(std::string_view name) {
  using expr::parse;
  ProblemSpec spec;
  spec.name = std::string(name);
  if (name == "smooth-mms" || name == "polynomial-mms") {
    spec.kx = parse("0.05");
    spec.ky = parse("0.05");
    spec.c = parse("1");
    spec.e = parse("0.5");
    spec.k1 = 0.05;
    spec.k2 = 0.05;
    spec.chemistry = parse("0.1*sin(u)");
    spec.bounds = {0.05, 0.05, 0.5, 1.0};
    spec.lipschitz_bound = 0.1;
    if (name == "smooth-mms") {
      spec.exact = ExactSolution::from(parse("exp(-t)*sin(pi*x)*sin(pi*y)"));
      spec.final_time = 0.1;
      spec.u_min = -1.0;
      spec.u_max = 1.0;
    } else {
      spec.exact = ExactSolution::from(parse("x*(1-x)*y*(1-y)*(1+t)"));
      spec.final_time = 1.0;
      spec.u_min = 0.0;
      spec.u_max = 0.125;
    }
    spec.u0 = expr::simplify(expr::substitute(spec.exact->u, Var::t, expr::number(0.0)));
    spec.emission = mms_forcing(spec, *spec.exact);
    return spec;
  }
  if (name == "decay-test") {
    spec.kx = parse("0.05");
    spec.ky = parse("0.05");
    spec.c = parse("1");
    spec.e = parse("0.5");
    spec.emission = parse("0");
    spec.chemistry = parse("0");
    spec.u0 = parse("sin(pi*x)*sin(pi*y)");
    spec.final_time = 0.1;
    spec.bounds = {0.05, 0.05, 0.5, 1.0};
    return spec;
  }
  if (name == "conservation-test") {
    // Zero dynamics: no wind, no diffusion, no source.
    spec.kx = parse("0");
    spec.ky = parse("0");
    spec.c = parse("0");
    spec.e = parse("0");
    spec.emission = parse("0");
    spec.chemistry = parse("0");
    spec.u0 = parse("1+x*y");
    spec.final_time = 0.1;
    spec.u_min = 0.0;
    spec.u_max = 2.0;
    return spec;
  }
  throw InvalidArgument("unknown preset '" + std::string(name) + "'");
}

}  // namespace dgair
