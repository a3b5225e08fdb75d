#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dgair::expr {

enum class Var { x, y, t, u };
enum class Func { sin, cos, exp, sqrt };
enum class Kind { number, pi, variable, negate, add, sub, mul, div, pow, call };

struct Node;
using ExprPtr = std::shared_ptr<const Node>;

/// Immutable expression tree node. `pow` nodes carry their nonnegative
/// integer exponent in `exponent`; `call` nodes have exactly one child.
struct Node {
  Kind kind = Kind::number;
  double value = 0.0;
  Var var = Var::x;
  Func func = Func::sin;
  int exponent = 0;
  std::vector<ExprPtr> children;
};

/// Variable bindings; evaluation fails on any unbound variable it meets.
struct Env {
  std::optional<double> x, y, t, u;
};

ExprPtr number(double v);
ExprPtr pi();
ExprPtr variable(Var v);
ExprPtr negate(ExprPtr a);
ExprPtr add(ExprPtr a, ExprPtr b);
ExprPtr sub(ExprPtr a, ExprPtr b);
ExprPtr mul(ExprPtr a, ExprPtr b);
ExprPtr div(ExprPtr a, ExprPtr b);
ExprPtr pow(ExprPtr base, int exponent);
ExprPtr call(Func f, ExprPtr arg);

/// Grammar, loosest first: + - (left assoc), * / (left assoc), unary -,
/// ^ with a nonnegative integer literal exponent, then numbers, x y t u pi,
/// sin cos exp sqrt calls and parentheses. Throws ParseError with a byte offset.
ExprPtr parse(std::string_view text);

double eval(const Node& node, const Env& env);

/// Exact symbolic derivative, simplified.
ExprPtr differentiate(const ExprPtr& node, Var var);

/// Constant folding and the identities 0+a, a+0, a-0, 0-a, 1*a, a*1, 0*a,
/// a*0, a/1, a^0, a^1, --a.
ExprPtr simplify(const ExprPtr& node);

/// Fully parenthesized canonical text; numbers keep 17 significant digits.
std::string to_string(const Node& node);
inline std::string to_string(const ExprPtr& node) { return to_string(*node); }

/// Replaces every occurrence of `var` with `replacement`.
ExprPtr substitute(const ExprPtr& node, Var var, const ExprPtr& replacement);

bool structurally_equal(const Node& a, const Node& b);
bool depends_on(const Node& node, Var var);

/// Total degree in (x, y) when the tree is a polynomial in x and y (t, u and
/// constants count as coefficients); nullopt otherwise.
std::optional<int> polynomial_degree(const Node& node);

char var_name(Var v);

/// Flattened evaluator with common subexpressions shared. Every variable is
/// bound on each call. Reentrant.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  explicit CompiledExpr(const ExprPtr& node);

  double operator()(double x, double y, double t, double u) const;
  /// True when the tree references no variables.
  bool is_constant() const { return constant_; }
  const ExprPtr& source() const { return source_; }

 private:
  enum class Op { constant, vx, vy, vt, vu, neg, add, sub, mul, div, pow, sin, cos, exp, sqrt };
  struct Instr {
    Op op = Op::constant;
    int a = 0;
    int b = 0;
    double value = 0.0;
  };
  int emit(const ExprPtr& node, std::unordered_map<std::string, int>& seen);

  std::vector<Instr> code_;
  ExprPtr source_;
  bool constant_ = true;
};

}  // namespace dgair::expr
