#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../support/random_expr.hpp"
#include "dgair/error.hpp"
#include "dgair/expr.hpp"

using namespace dgair;
using namespace dgair::expr;

namespace {

double at(std::string_view text, Env env = {0.0, 0.0, 0.0, 0.0}) { return eval(*parse(text), env); }

}  // namespace

TEST_CASE("parse precedence and evaluation") {
  CHECK(at("2+3*4") == 14.0);
  CHECK(at("sin(pi*x)", {0.5, 0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(at("-x^2", {2.0, 0, 0, 0}) == -4.0);
  CHECK(at("3.5") == 3.5);
  CHECK(at("exp(-t)") == 1.0);
  CHECK(at("8-3-2") == 3.0);
  CHECK(at("8/4/2") == 1.0);
  CHECK(at(" ( 1 + 2 ) * 3 ") == 9.0);
  CHECK(at("2*-3") == -6.0);
  CHECK(at("1e-3*1000") == doctest::Approx(1.0));
  CHECK(at("sqrt(u)", {0, 0, 0, 9.0}) == 3.0);
  CHECK(at("cos(0)") == 1.0);
}

TEST_CASE("parse errors carry offsets") {
  auto offset_of = [](std::string_view text) -> long {
    try {
      parse(text);
    } catch (const ParseError& e) {
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  CHECK(offset_of("") == 0);
  CHECK(offset_of("   ") >= 0);
  CHECK(offset_of("1 + foo") == 4);
  CHECK(offset_of("(x + 1") >= 0);
  CHECK(offset_of("x + 1)") == 5);
  CHECK(offset_of("x^1.5") >= 2);
  CHECK(offset_of("x^-1") >= 2);
  CHECK(offset_of("x^y") >= 2);
  CHECK(offset_of("sin x") >= 0);
}

TEST_CASE("evaluation errors") {
  CHECK_THROWS_AS(at("x/(x-x)", {1.0, 0, 0, 0}), EvalError);
  CHECK_THROWS_AS(eval(*parse("x+y"), Env{1.0, std::nullopt, std::nullopt, std::nullopt}), EvalError);
  CHECK_THROWS_AS(at("sqrt(0-1)"), EvalError);
  CHECK_THROWS_AS(at("exp(1000)"), EvalError);
}

TEST_CASE("differentiate") {
  const ExprPtr d = differentiate(parse("sin(pi*x)"), Var::x);
  CHECK(eval(*d, {0.0, 0, 0, 0}) == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(structurally_equal(*d, *simplify(parse("pi*cos(pi*x)"))));
  const ExprPtr dy = differentiate(parse("y"), Var::x);
  CHECK(dy->kind == Kind::number);
  CHECK(dy->value == 0.0);
  CHECK(eval(*differentiate(parse("u^2"), Var::u), {0, 0, 0, 3.0}) == 6.0);
  CHECK(eval(*differentiate(parse("sqrt(x)"), Var::x), {4.0, 0, 0, 0}) == doctest::Approx(0.25));
  CHECK(eval(*differentiate(parse("x/y"), Var::y), {1.0, 2.0, 0, 0}) == doctest::Approx(-0.25));
  CHECK(eval(*differentiate(parse("exp(2*t)"), Var::t), {0, 0, 0.0, 0}) == doctest::Approx(2.0));
}

TEST_CASE("simplify") {
  CHECK(to_string(simplify(parse("0*sin(x)+1*y"))) == "y");
  CHECK(to_string(simplify(parse("2*3"))) == "6");
  CHECK(to_string(simplify(parse("x^1"))) == "x");
  CHECK(to_string(simplify(parse("x^0"))) == "1");
  CHECK(to_string(simplify(parse("--x"))) == "x");
  CHECK(to_string(simplify(parse("x/1-0"))) == "x");

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  const ExprPtr dxy = simplify(differentiate(parse("x*y"), Var::x));
  for (int i = 0; i < 100; ++i) {
    const Env env{box(rng), box(rng), box(rng), box(rng)};
    CHECK(eval(*dxy, env) == eval(*parse("y"), env));
  }

  testing::RandomExprGenerator gen(5);
  for (int i = 0; i < 100; ++i) {
    const ExprPtr tree = gen.tree(5);
    const ExprPtr s = simplify(tree);
    for (int j = 0; j < 5; ++j) {
      const Env env = gen.env();
      const double a = eval(*tree, env);
      const double b = eval(*s, env);
      CHECK(std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("print and parse round trip") {
  testing::RandomExprGenerator gen(17);
  for (int i = 0; i < 200; ++i) {
    const ExprPtr tree = gen.tree(5);
    const std::string text = to_string(tree);
    const ExprPtr back = parse(text);
    CHECK(to_string(back) == text);
    for (int j = 0; j < 3; ++j) {
      const Env env = gen.env();
      CHECK(eval(*back, env) == eval(*tree, env));
    }
  }
  CHECK(to_string(parse("0.1")) == "0.10000000000000001");
}

TEST_CASE("derivatives agree with central differences") {
  testing::RandomExprGenerator gen(2024);
  int accepted = 0;
  double worst = 0.0;
  while (accepted < 100) {
    const ExprPtr tree = gen.tree(5);
    const Var v = gen.var();
    for (int attempt = 0; attempt < 50; ++attempt) {
      const Env env = gen.env();
      if (std::abs(eval(*tree, env)) > 1e3) continue;
      const auto c = testing::check_derivative(tree, v, env);
      worst = std::max(worst, c.relative_error);
      CHECK_MESSAGE(c.relative_error <= 1e-5, to_string(tree));
      ++accepted;
      break;
    }
  }
  MESSAGE("worst relative derivative error " << worst);
}

TEST_CASE("tree utilities") {
  const ExprPtr e = parse("x*(1-x)*t + u");
  CHECK(depends_on(*e, Var::x));
  CHECK(depends_on(*e, Var::u));
  CHECK_FALSE(depends_on(*e, Var::y));
  CHECK(polynomial_degree(*parse("x*(1-x)*y*(1-y)*(1+t)")) == 4);
  CHECK(polynomial_degree(*parse("3*t")) == 0);
  CHECK_FALSE(polynomial_degree(*parse("sin(x)")).has_value());
  CHECK_FALSE(polynomial_degree(*parse("1/x")).has_value());
  const ExprPtr s = substitute(e, Var::t, number(2.0));
  CHECK(eval(*s, {0.5, 0, 0, 1.0}) == 1.5);
  CHECK(var_name(Var::u) == 'u');

  const CompiledExpr c(parse("sin(x)*sin(x) + y*t - u"));
  CHECK(c(0.3, 2.0, 4.0, 1.0) == doctest::Approx(std::sin(0.3) * std::sin(0.3) + 7.0));
  CHECK_FALSE(c.is_constant());
  CHECK(CompiledExpr(parse("2*pi")).is_constant());

  testing::RandomExprGenerator gen(99);
  for (int i = 0; i < 50; ++i) {
    const ExprPtr tree = gen.tree(5);
    const CompiledExpr compiled(tree);
    const Env env = gen.env();
    CHECK(compiled(*env.x, *env.y, *env.t, *env.u) == doctest::Approx(eval(*tree, env)).epsilon(1e-14));
  }
}
