#include "dgair/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "dgair/error.hpp"

namespace dgair::expr {

namespace {

ExprPtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

ExprPtr binary(Kind k, ExprPtr a, ExprPtr b) {
  Node n;
  n.kind = k;
  n.children = {std::move(a), std::move(b)};
  return make(std::move(n));
}

bool is_number(const ExprPtr& n, double v) { return n->kind == Kind::number && n->value == v; }
bool is_number(const ExprPtr& n) { return n->kind == Kind::number; }

const char* func_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::exp: return "exp";
    case Func::sqrt: return "sqrt";
  }
  return "?";
}

double apply_func(Func f, double a) {
  switch (f) {
    case Func::sin: return std::sin(a);
    case Func::cos: return std::cos(a);
    case Func::exp: return std::exp(a);
    case Func::sqrt: return std::sqrt(a);
  }
  return 0.0;
}

double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// --- parser --------------------------------------------------------------

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ExprPtr run() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    ExprPtr e = parse_sum();
    skip_ws();
    if (pos_ < text_.size()) {
      if (text_[pos_] == ')') throw ParseError("unbalanced ')'", pos_);
      throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr parse_sum() {
    ExprPtr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = add(lhs, parse_product());
      } else if (accept('-')) {
        lhs = sub(lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_product() {
    ExprPtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = mul(lhs, parse_unary());
      } else if (accept('/')) {
        lhs = div(lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_unary() {
    if (accept('-')) return negate(parse_unary());
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t at = pos_;
    const bool paren = accept('(');
    skip_ws();
    const std::size_t num_at = pos_;
    if (pos_ >= text_.size() || !(std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      throw ParseError("exponent must be a nonnegative integer literal", at);
    const double v = parse_number_literal();
    if (v != std::floor(v) || v > 1000.0)
      throw ParseError("exponent must be a nonnegative integer literal", num_at);
    if (paren && !accept(')')) throw ParseError("expected ')'", pos_);
    return pow(base, static_cast<int>(v));
  }

  double parse_number_literal() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const auto* first = text_.data() + start;
    const auto* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ParseError("malformed number", start);
    return v;
  }

  ExprPtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(parse_number_literal());
    if (c == '(') {
      const std::size_t open = pos_;
      ++pos_;
      ExprPtr inner = parse_sum();
      if (!accept(')')) throw ParseError("unbalanced '('", open);
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
      const std::string_view id = text_.substr(start, pos_ - start);
      if (id == "x") return variable(Var::x);
      if (id == "y") return variable(Var::y);
      if (id == "t") return variable(Var::t);
      if (id == "u") return variable(Var::u);
      if (id == "pi") return pi();
      for (Func f : {Func::sin, Func::cos, Func::exp, Func::sqrt}) {
        if (id == func_name(f)) {
          if (!accept('(')) throw ParseError("expected '(' after " + std::string(id), pos_);
          const std::size_t open = pos_ - 1;
          ExprPtr arg = parse_sum();
          if (!accept(')')) throw ParseError("unbalanced '('", open);
          return call(f, arg);
        }
      }
      throw ParseError("unknown identifier '" + std::string(id) + "'", start);
    }
    if (c == ')') throw ParseError("unbalanced ')'", pos_);
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// --- builders ------------------------------------------------------------

ExprPtr number(double v) {
  Node n;
  n.kind = Kind::number;
  n.value = v;
  return make(std::move(n));
}
ExprPtr pi() {
  Node n;
  n.kind = Kind::pi;
  return make(std::move(n));
}
ExprPtr variable(Var v) {
  Node n;
  n.kind = Kind::variable;
  n.var = v;
  return make(std::move(n));
}
ExprPtr negate(ExprPtr a) {
  Node n;
  n.kind = Kind::negate;
  n.children = {std::move(a)};
  return make(std::move(n));
}
ExprPtr add(ExprPtr a, ExprPtr b) { return binary(Kind::add, std::move(a), std::move(b)); }
ExprPtr sub(ExprPtr a, ExprPtr b) { return binary(Kind::sub, std::move(a), std::move(b)); }
ExprPtr mul(ExprPtr a, ExprPtr b) { return binary(Kind::mul, std::move(a), std::move(b)); }
ExprPtr div(ExprPtr a, ExprPtr b) { return binary(Kind::div, std::move(a), std::move(b)); }
ExprPtr pow(ExprPtr base, int exponent) {
  if (exponent < 0) throw InvalidArgument("exponent must be nonnegative");
  Node n;
  n.kind = Kind::pow;
  n.exponent = exponent;
  n.children = {std::move(base)};
  return make(std::move(n));
}
ExprPtr call(Func f, ExprPtr arg) {
  Node n;
  n.kind = Kind::call;
  n.func = f;
  n.children = {std::move(arg)};
  return make(std::move(n));
}

char var_name(Var v) {
  switch (v) {
    case Var::x: return 'x';
    case Var::y: return 'y';
    case Var::t: return 't';
    case Var::u: return 'u';
  }
  return '?';
}

ExprPtr parse(std::string_view text) { return Parser(text).run(); }

// --- evaluation ----------------------------------------------------------

double eval(const Node& node, const Env& env) {
  switch (node.kind) {
    case Kind::number: return node.value;
    case Kind::pi: return std::numbers::pi;
    case Kind::variable: {
      const std::optional<double>* slot = nullptr;
      switch (node.var) {
        case Var::x: slot = &env.x; break;
        case Var::y: slot = &env.y; break;
        case Var::t: slot = &env.t; break;
        case Var::u: slot = &env.u; break;
      }
      if (!slot->has_value()) throw EvalError(std::string("unbound variable '") + var_name(node.var) + "'");
      return **slot;
    }
    case Kind::negate: return -eval(*node.children[0], env);
    case Kind::add: return eval(*node.children[0], env) + eval(*node.children[1], env);
    case Kind::sub: return eval(*node.children[0], env) - eval(*node.children[1], env);
    case Kind::mul: return eval(*node.children[0], env) * eval(*node.children[1], env);
    case Kind::div: {
      const double num = eval(*node.children[0], env);
      const double den = eval(*node.children[1], env);
      if (den == 0.0) throw EvalError("division by zero");
      return num / den;
    }
    case Kind::pow: return ipow(eval(*node.children[0], env), node.exponent);
    case Kind::call: {
      const double a = eval(*node.children[0], env);
      if (node.func == Func::sqrt && a < 0.0) throw EvalError("sqrt of a negative value");
      const double r = apply_func(node.func, a);
      if (!std::isfinite(r)) throw EvalError(std::string("non-finite result of ") + func_name(node.func));
      return r;
    }
  }
  return 0.0;
}

// --- printing and structure ------------------------------------------------

std::string to_string(const Node& node) {
  switch (node.kind) {
    case Kind::number: return node.value < 0.0 || std::signbit(node.value) ? "(" + format_number(node.value) + ")"
                                                                           : format_number(node.value);
    case Kind::pi: return "pi";
    case Kind::variable: return std::string(1, var_name(node.var));
    case Kind::negate: return "(-" + to_string(*node.children[0]) + ")";
    case Kind::add: return "(" + to_string(*node.children[0]) + "+" + to_string(*node.children[1]) + ")";
    case Kind::sub: return "(" + to_string(*node.children[0]) + "-" + to_string(*node.children[1]) + ")";
    case Kind::mul: return "(" + to_string(*node.children[0]) + "*" + to_string(*node.children[1]) + ")";
    case Kind::div: return "(" + to_string(*node.children[0]) + "/" + to_string(*node.children[1]) + ")";
    case Kind::pow: return "(" + to_string(*node.children[0]) + "^" + std::to_string(node.exponent) + ")";
    case Kind::call: return std::string(func_name(node.func)) + "(" + to_string(*node.children[0]) + ")";
  }
  return {};
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::number: return a.value == b.value;
    case Kind::pi: return true;
    case Kind::variable: return a.var == b.var;
    case Kind::pow:
      if (a.exponent != b.exponent) return false;
      break;
    case Kind::call:
      if (a.func != b.func) return false;
      break;
    default: break;
  }
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!structurally_equal(*a.children[i], *b.children[i])) return false;
  return true;
}

ExprPtr substitute(const ExprPtr& node, Var var, const ExprPtr& replacement) {
  if (node->kind == Kind::variable) return node->var == var ? replacement : node;
  if (node->children.empty()) return node;
  Node copy = *node;
  for (auto& child : copy.children) child = substitute(child, var, replacement);
  return make(std::move(copy));
}

bool depends_on(const Node& node, Var var) {
  if (node.kind == Kind::variable) return node.var == var;
  return std::any_of(node.children.begin(), node.children.end(),
                     [var](const ExprPtr& c) { return depends_on(*c, var); });
}

std::optional<int> polynomial_degree(const Node& node) {
  if (!depends_on(node, Var::x) && !depends_on(node, Var::y)) return 0;
  switch (node.kind) {
    case Kind::variable: return 1;
    case Kind::negate: return polynomial_degree(*node.children[0]);
    case Kind::add:
    case Kind::sub: {
      auto a = polynomial_degree(*node.children[0]);
      auto b = polynomial_degree(*node.children[1]);
      if (!a || !b) return std::nullopt;
      return std::max(*a, *b);
    }
    case Kind::mul: {
      auto a = polynomial_degree(*node.children[0]);
      auto b = polynomial_degree(*node.children[1]);
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    case Kind::div: {
      // Only division by something free of x and y keeps a polynomial.
      if (depends_on(*node.children[1], Var::x) || depends_on(*node.children[1], Var::y)) return std::nullopt;
      return polynomial_degree(*node.children[0]);
    }
    case Kind::pow: {
      auto a = polynomial_degree(*node.children[0]);
      if (!a) return std::nullopt;
      return *a * node.exponent;
    }
    default: return std::nullopt;
  }
}

// --- simplification ----------------------------------------------------------

ExprPtr simplify(const ExprPtr& node) {
  switch (node->kind) {
    case Kind::number:
    case Kind::pi:
    case Kind::variable: return node;
    case Kind::negate: {
      ExprPtr a = simplify(node->children[0]);
      if (is_number(a)) return number(a->value == 0.0 ? 0.0 : -a->value);
      if (a->kind == Kind::negate) return a->children[0];
      return negate(a);
    }
    case Kind::call: {
      ExprPtr a = simplify(node->children[0]);
      if (is_number(a)) {
        const double r = apply_func(node->func, a->value);
        if (std::isfinite(r) && !(node->func == Func::sqrt && a->value < 0.0)) return number(r);
      }
      return call(node->func, a);
    }
    case Kind::pow: {
      ExprPtr a = simplify(node->children[0]);
      if (node->exponent == 0) return number(1.0);
      if (node->exponent == 1) return a;
      if (is_number(a)) {
        const double r = ipow(a->value, node->exponent);
        if (std::isfinite(r)) return number(r);
      }
      return pow(a, node->exponent);
    }
    default: break;
  }

  ExprPtr a = simplify(node->children[0]);
  ExprPtr b = simplify(node->children[1]);
  switch (node->kind) {
    case Kind::add:
      if (is_number(a) && is_number(b)) return number(a->value + b->value);
      if (is_number(a, 0.0)) return b;
      if (is_number(b, 0.0)) return a;
      return add(a, b);
    case Kind::sub:
      if (is_number(a) && is_number(b)) return number(a->value - b->value);
      if (is_number(b, 0.0)) return a;
      if (is_number(a, 0.0)) return simplify(negate(b));
      return sub(a, b);
    case Kind::mul:
      if (is_number(a) && is_number(b)) return number(a->value * b->value);
      if (is_number(a, 0.0) || is_number(b, 0.0)) return number(0.0);
      if (is_number(a, 1.0)) return b;
      if (is_number(b, 1.0)) return a;
      if (is_number(a, -1.0)) return simplify(negate(b));
      if (is_number(b, -1.0)) return simplify(negate(a));
      return mul(a, b);
    case Kind::div:
      if (is_number(a) && is_number(b) && b->value != 0.0) return number(a->value / b->value);
      if (is_number(b, 1.0)) return a;
      if (is_number(a, 0.0) && !(is_number(b, 0.0))) return number(0.0);
      return div(a, b);
    default: return node;
  }
}

// --- differentiation -------------------------------------------------------

namespace {

ExprPtr derive(const ExprPtr& node, Var var) {
  const auto& c = node->children;
  switch (node->kind) {
    case Kind::number:
    case Kind::pi: return number(0.0);
    case Kind::variable: return number(node->var == var ? 1.0 : 0.0);
    case Kind::negate: return negate(derive(c[0], var));
    case Kind::add: return add(derive(c[0], var), derive(c[1], var));
    case Kind::sub: return sub(derive(c[0], var), derive(c[1], var));
    case Kind::mul: return add(mul(derive(c[0], var), c[1]), mul(c[0], derive(c[1], var)));
    case Kind::div:
      return div(sub(mul(derive(c[0], var), c[1]), mul(c[0], derive(c[1], var))), pow(c[1], 2));
    case Kind::pow:
      if (node->exponent == 0) return number(0.0);
      return mul(mul(number(node->exponent), pow(c[0], node->exponent - 1)), derive(c[0], var));
    case Kind::call: {
      ExprPtr inner = derive(c[0], var);
      switch (node->func) {
        case Func::sin: return mul(inner, call(Func::cos, c[0]));
        case Func::cos: return negate(mul(inner, call(Func::sin, c[0])));
        case Func::exp: return mul(inner, call(Func::exp, c[0]));
        case Func::sqrt: return div(inner, mul(number(2.0), call(Func::sqrt, c[0])));
      }
    }
  }
  return number(0.0);
}

}  // namespace

ExprPtr differentiate(const ExprPtr& node, Var var) { return simplify(derive(node, var)); }

// --- compiled evaluation ---------------------------------------------------

CompiledExpr::CompiledExpr(const ExprPtr& node) : source_(node) {
  std::unordered_map<std::string, int> seen;
  emit(node, seen);
}

int CompiledExpr::emit(const ExprPtr& node, std::unordered_map<std::string, int>& seen) {
  const std::string key = to_string(*node);
  if (auto it = seen.find(key); it != seen.end()) return it->second;

  Instr ins;
  switch (node->kind) {
    case Kind::number:
      ins.op = Op::constant;
      ins.value = node->value;
      break;
    case Kind::pi:
      ins.op = Op::constant;
      ins.value = std::numbers::pi;
      break;
    case Kind::variable:
      constant_ = false;
      ins.op = node->var == Var::x ? Op::vx : node->var == Var::y ? Op::vy : node->var == Var::t ? Op::vt : Op::vu;
      break;
    case Kind::negate:
      ins.op = Op::neg;
      ins.a = emit(node->children[0], seen);
      break;
    case Kind::add:
    case Kind::sub:
    case Kind::mul:
    case Kind::div:
      ins.op = node->kind == Kind::add   ? Op::add
               : node->kind == Kind::sub ? Op::sub
               : node->kind == Kind::mul ? Op::mul
                                         : Op::div;
      ins.a = emit(node->children[0], seen);
      ins.b = emit(node->children[1], seen);
      break;
    case Kind::pow:
      ins.op = Op::pow;
      ins.a = emit(node->children[0], seen);
      ins.b = node->exponent;
      break;
    case Kind::call:
      ins.op = node->func == Func::sin   ? Op::sin
               : node->func == Func::cos ? Op::cos
               : node->func == Func::exp ? Op::exp
                                         : Op::sqrt;
      ins.a = emit(node->children[0], seen);
      break;
  }
  code_.push_back(ins);
  const int id = static_cast<int>(code_.size()) - 1;
  seen.emplace(key, id);
  return id;
}

double CompiledExpr::operator()(double x, double y, double t, double u) const {
  if (code_.empty()) throw EvalError("empty compiled expression");
  thread_local std::vector<double> reg;
  reg.resize(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    double r = 0.0;
    switch (in.op) {
      case Op::constant: r = in.value; break;
      case Op::vx: r = x; break;
      case Op::vy: r = y; break;
      case Op::vt: r = t; break;
      case Op::vu: r = u; break;
      case Op::neg: r = -reg[in.a]; break;
      case Op::add: r = reg[in.a] + reg[in.b]; break;
      case Op::sub: r = reg[in.a] - reg[in.b]; break;
      case Op::mul: r = reg[in.a] * reg[in.b]; break;
      case Op::div:
        if (reg[in.b] == 0.0) throw EvalError("division by zero");
        r = reg[in.a] / reg[in.b];
        break;
      case Op::pow: r = ipow(reg[in.a], in.b); break;
      case Op::sin: r = std::sin(reg[in.a]); break;
      case Op::cos: r = std::cos(reg[in.a]); break;
      case Op::exp: r = std::exp(reg[in.a]); break;
      case Op::sqrt: r = std::sqrt(reg[in.a]); break;
    }
    reg[i] = r;
  }
  const double result = reg.back();
  if (!std::isfinite(result)) throw EvalError("non-finite expression value");
  return result;
}

}  // namespace dgair::expr
