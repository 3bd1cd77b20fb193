#include "sct/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace sct::expr {

namespace {

ExprPtr unary(Kind k, ExprPtr a) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  return n;
}

bool both_const(const ExprPtr& a, const ExprPtr& b) {
  return a->kind == Kind::Const && b->kind == Kind::Const;
}

}  // namespace

ExprPtr constant(double c) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->value = c;
  return n;
}

ExprPtr var(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->name = std::move(name);
  return n;
}

bool is_zero(const ExprPtr& e) {
  return e->kind == Kind::Const && e->value == 0.0;
}

bool is_const(const ExprPtr& e, double c) {
  return e->kind == Kind::Const && e->value == c;
}

ExprPtr add(ExprPtr a, ExprPtr b) {
  if (both_const(a, b)) return constant(a->value + b->value);
  if (is_zero(a)) return b;
  if (is_zero(b)) return a;
  auto n = std::make_shared<Node>();
  n->kind = Kind::Add;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

ExprPtr sub(ExprPtr a, ExprPtr b) {
  if (both_const(a, b)) return constant(a->value - b->value);
  if (is_zero(b)) return a;
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sub;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

ExprPtr mul(ExprPtr a, ExprPtr b) {
  if (both_const(a, b)) return constant(a->value * b->value);
  if (is_zero(a) || is_zero(b)) return constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  auto n = std::make_shared<Node>();
  n->kind = Kind::Mul;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

ExprPtr div(ExprPtr a, ExprPtr b) {
  if (both_const(a, b) && b->value != 0.0) return constant(a->value / b->value);
  if (is_const(b, 1.0)) return a;
  auto n = std::make_shared<Node>();
  n->kind = Kind::Div;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

ExprPtr pow(ExprPtr base, int exponent) {
  if (exponent == 0) return one();
  if (exponent == 1) return base;
  if (base->kind == Kind::Const) return constant(std::pow(base->value, exponent));
  auto n = std::make_shared<Node>();
  n->kind = Kind::Pow;
  n->a = std::move(base);
  n->exponent = exponent;
  return n;
}

ExprPtr sin(ExprPtr a) {
  if (a->kind == Kind::Const) return constant(std::sin(a->value));
  return unary(Kind::Sin, std::move(a));
}

ExprPtr cos(ExprPtr a) {
  if (a->kind == Kind::Const) return constant(std::cos(a->value));
  return unary(Kind::Cos, std::move(a));
}

ExprPtr exp(ExprPtr a) {
  if (a->kind == Kind::Const) return constant(std::exp(a->value));
  return unary(Kind::Exp, std::move(a));
}

ExprPtr neg(ExprPtr a) { return sub(constant(0.0), std::move(a)); }

void Env::set(const std::string& name, double value) {
  for (auto& [n, v] : vals_) {
    if (n == name) {
      v = value;
      return;
    }
  }
  vals_.emplace_back(name, value);
}

const double* Env::find(std::string_view name) const {
  for (const auto& [n, v] : vals_) {
    if (n == name) return &v;
  }
  return nullptr;
}

double eval(const ExprPtr& e, const Env& env) {
  switch (e->kind) {
    case Kind::Const:
      return e->value;
    case Kind::Var: {
      const double* v = env.find(e->name);
      if (!v) throw EvalError("unbound variable '" + e->name + "'");
      return *v;
    }
    case Kind::Add:
      return eval(e->a, env) + eval(e->b, env);
    case Kind::Sub:
      return eval(e->a, env) - eval(e->b, env);
    case Kind::Mul:
      return eval(e->a, env) * eval(e->b, env);
    case Kind::Div: {
      const double denom = eval(e->b, env);
      if (denom == 0.0) throw EvalError("division by zero");
      return eval(e->a, env) / denom;
    }
    case Kind::Pow:
      return std::pow(eval(e->a, env), e->exponent);
    case Kind::Sin:
      return std::sin(eval(e->a, env));
    case Kind::Cos:
      return std::cos(eval(e->a, env));
    case Kind::Exp:
      return std::exp(eval(e->a, env));
  }
  throw EvalError("corrupt expression node");
}

ExprPtr diff(const ExprPtr& e, const std::string& variable) {
  switch (e->kind) {
    case Kind::Const:
      return zero();
    case Kind::Var:
      return constant(e->name == variable ? 1.0 : 0.0);
    case Kind::Add:
      return add(diff(e->a, variable), diff(e->b, variable));
    case Kind::Sub:
      return sub(diff(e->a, variable), diff(e->b, variable));
    case Kind::Mul:
      return add(mul(diff(e->a, variable), e->b), mul(e->a, diff(e->b, variable)));
    case Kind::Div:
      // (a/b)' = (a'b - a b') / b^2
      return div(sub(mul(diff(e->a, variable), e->b), mul(e->a, diff(e->b, variable))),
                 pow(e->b, 2));
    case Kind::Pow:
      // (a^n)' = n a^(n-1) a'
      return mul(mul(constant(e->exponent), pow(e->a, e->exponent - 1)),
                 diff(e->a, variable));
    case Kind::Sin:
      return mul(cos(e->a), diff(e->a, variable));
    case Kind::Cos:
      return mul(constant(-1.0), mul(sin(e->a), diff(e->a, variable)));
    case Kind::Exp:
      return mul(exp(e->a), diff(e->a, variable));
  }
  throw EvalError("corrupt expression node");
}

ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& repl) {
  switch (e->kind) {
    case Kind::Const:
      return e;
    case Kind::Var: {
      auto it = repl.find(e->name);
      return it == repl.end() ? e : it->second;
    }
    case Kind::Add:
      return add(substitute(e->a, repl), substitute(e->b, repl));
    case Kind::Sub:
      return sub(substitute(e->a, repl), substitute(e->b, repl));
    case Kind::Mul:
      return mul(substitute(e->a, repl), substitute(e->b, repl));
    case Kind::Div:
      return div(substitute(e->a, repl), substitute(e->b, repl));
    case Kind::Pow:
      return pow(substitute(e->a, repl), e->exponent);
    case Kind::Sin:
      return sin(substitute(e->a, repl));
    case Kind::Cos:
      return cos(substitute(e->a, repl));
    case Kind::Exp:
      return exp(substitute(e->a, repl));
  }
  throw EvalError("corrupt expression node");
}

namespace {

void print(std::ostringstream& os, const ExprPtr& e) {
  switch (e->kind) {
    case Kind::Const: {
      // Negative literals only parse in leading position, so parenthesize.
      if (std::signbit(e->value)) {
        os << '(' << e->value << ')';
      } else {
        os << e->value;
      }
      return;
    }
    case Kind::Var:
      os << e->name;
      return;
    case Kind::Add:
      os << '(';
      print(os, e->a);
      os << " + ";
      print(os, e->b);
      os << ')';
      return;
    case Kind::Sub:
      os << '(';
      print(os, e->a);
      os << " - ";
      print(os, e->b);
      os << ')';
      return;
    case Kind::Mul:
      os << '(';
      print(os, e->a);
      os << " * ";
      print(os, e->b);
      os << ')';
      return;
    case Kind::Div:
      os << '(';
      print(os, e->a);
      os << " / ";
      print(os, e->b);
      os << ')';
      return;
    case Kind::Pow:
      // The grammar allows one exponent per factor; nested powers need parens.
      if (e->a->kind == Kind::Pow) {
        os << '(';
        print(os, e->a);
        os << ')';
      } else {
        print(os, e->a);
      }
      os << '^' << e->exponent;
      return;
    case Kind::Sin:
      os << "sin(";
      print(os, e->a);
      os << ')';
      return;
    case Kind::Cos:
      os << "cos(";
      print(os, e->a);
      os << ')';
      return;
    case Kind::Exp:
      os << "exp(";
      print(os, e->a);
      os << ')';
      return;
  }
}

}  // namespace

std::string to_string(const ExprPtr& e) {
  std::ostringstream os;
  os.precision(17);
  print(os, e);
  return os.str();
}

namespace {

// Recursive-descent parser over the published grammar.  The token cursor is a
// byte offset into the original text so errors can point at their cause.
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ExprPtr run() {
    ExprPtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
    throw ParseError(msg, at);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  ExprPtr parse_expr() {
    bool negate = eat('-');
    ExprPtr e = parse_term();
    if (negate) e = neg(std::move(e));
    for (;;) {
      if (eat('+')) {
        e = add(std::move(e), parse_term());
      } else if (eat('-')) {
        e = sub(std::move(e), parse_term());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_factor();
    for (;;) {
      if (eat('*')) {
        e = mul(std::move(e), parse_factor());
      } else if (eat('/')) {
        e = div(std::move(e), parse_factor());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_factor() {
    ExprPtr base = parse_base();
    if (eat('^')) {
      bool negexp = eat('-');
      skip_ws();
      std::size_t start = pos_;
      long n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        n = n * 10 + (text_[pos_] - '0');
        ++pos_;
      }
      if (pos_ == start) fail("expected integer exponent after '^'");
      return pow(std::move(base), static_cast<int>(negexp ? -n : n));
    }
    return base;
  }

  ExprPtr parse_base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected expression");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  ExprPtr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // not an exponent suffix after all
      }
    }
    if (pos_ == start) fail("expected number");
    return constant(std::stod(std::string(text_.substr(start, pos_ - start))));
  }

  ExprPtr parse_ident() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])))) {
      ++pos_;
    }
    std::string name(text_.substr(start, pos_ - start));
    if (name == "sin" || name == "cos" || name == "exp") {
      if (!eat('(')) fail("expected '(' after function name");
      ExprPtr arg = parse_expr();
      if (!eat(')')) fail("expected ')'");
      if (name == "sin") return sin(std::move(arg));
      if (name == "cos") return cos(std::move(arg));
      return exp(std::move(arg));
    }
    if (name == "t") return var("t");
    if (name.size() >= 2 && (name[0] == 'x' || name[0] == 'w' || name[0] == 'y')) {
      bool digits = true;
      for (std::size_t i = 1; i < name.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
      }
      if (digits) return var(std::move(name));
    }
    fail_at("unknown identifier '" + name + "'", start);
  }
};

}  // namespace

ExprPtr parse(std::string_view text) { return Parser(text).run(); }

int Chart::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i] == name) return static_cast<int>(i);
  }
  return -1;
}

ChartPtr make_chart(std::vector<std::string> vars,
                    std::vector<std::pair<double, double>> bounds) {
  auto c = std::make_shared<Chart>();
  c->vars = std::move(vars);
  c->bounds = std::move(bounds);
  return c;
}

ChartPtr box_chart(int m, double lo, double hi) {
  std::vector<std::string> vars;
  std::vector<std::pair<double, double>> bounds;
  vars.reserve(m);
  for (int i = 1; i <= m; ++i) {
    vars.push_back("x" + std::to_string(i));
    bounds.emplace_back(lo, hi);
  }
  return make_chart(std::move(vars), std::move(bounds));
}

ChartPtr cube_chart(int k) {
  std::vector<std::string> vars;
  std::vector<std::pair<double, double>> bounds;
  vars.reserve(k + 1);
  for (int i = 1; i <= k; ++i) {
    vars.push_back("w" + std::to_string(i));
    bounds.emplace_back(0.0, 1.0);
  }
  vars.push_back("t");
  bounds.emplace_back(0.0, 1.0);
  return make_chart(std::move(vars), std::move(bounds));
}

}  // namespace sct::expr
