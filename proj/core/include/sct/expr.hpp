#pragma once

// Scalar expression DSL: immutable ASTs over named variables with rational
// constants, +, -, *, /, integer powers, and sin/cos/exp.  Supports pointwise
// evaluation, exact symbolic differentiation, and capture-free substitution.
// Construction goes through smart constructors that apply light algebraic
// simplification (constant folding, 0/1 identities) so derivative trees stay
// small enough for repeated evaluation inside quadrature loops.

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sct::expr {

enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp };

struct Node;
using ExprPtr = std::shared_ptr<const Node>;

struct Node {
  Kind kind;
  double value = 0.0;   // Const
  std::string name;     // Var
  ExprPtr a, b;         // operands (b unused for unary nodes)
  int exponent = 0;     // Pow
};

// Smart constructors (fold constants, drop additive/multiplicative units).
ExprPtr constant(double c);
ExprPtr var(std::string name);
ExprPtr add(ExprPtr a, ExprPtr b);
ExprPtr sub(ExprPtr a, ExprPtr b);
ExprPtr mul(ExprPtr a, ExprPtr b);
ExprPtr div(ExprPtr a, ExprPtr b);
ExprPtr pow(ExprPtr base, int exponent);
ExprPtr sin(ExprPtr a);
ExprPtr cos(ExprPtr a);
ExprPtr exp(ExprPtr a);
ExprPtr neg(ExprPtr a);

inline ExprPtr zero() { return constant(0.0); }
inline ExprPtr one() { return constant(1.0); }

bool is_zero(const ExprPtr& e);
bool is_const(const ExprPtr& e, double c);

// Raised by parse() with the byte offset of the offending token.
struct ParseError : std::runtime_error {
  ParseError(std::string msg, std::size_t offset)
      : std::runtime_error(std::move(msg)), offset(offset) {}
  std::size_t offset;
};

// Raised by eval() on unbound variables and division by zero.
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Variable bindings for evaluation.  Lookup is a linear scan; charts are tiny.
class Env {
 public:
  Env() = default;
  void set(const std::string& name, double value);
  const double* find(std::string_view name) const;

 private:
  std::vector<std::pair<std::string, double>> vals_;
};

double eval(const ExprPtr& e, const Env& env);

// Exact symbolic partial derivative with respect to the named variable.
ExprPtr diff(const ExprPtr& e, const std::string& variable);

// Simultaneous capture-free substitution of variables by expressions.
ExprPtr substitute(const ExprPtr& e,
                   const std::map<std::string, ExprPtr>& repl);

std::string to_string(const ExprPtr& e);

// Grammar:
//   expr   := ('-')? term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' ('-')? integer)?
//   base   := number | ident | '(' expr ')' | func '(' expr ')'
//   func   := 'sin' | 'cos' | 'exp'
//   ident  := x[0-9]+ | w[0-9]+ | y[0-9]+ | t
// Unknown identifiers are rejected at parse time with their offset.
ExprPtr parse(std::string_view text);

// One coordinate chart: ordered variable names with optional box bounds.
struct Chart {
  std::vector<std::string> vars;
  // Per-variable (lo, hi); empty when the chart is unbounded.
  std::vector<std::pair<double, double>> bounds;

  int dim() const { return static_cast<int>(vars.size()); }
  int index_of(std::string_view name) const;  // -1 when absent
};

using ChartPtr = std::shared_ptr<const Chart>;

ChartPtr make_chart(std::vector<std::string> vars,
                    std::vector<std::pair<double, double>> bounds = {});

// Standard chart with variables x1..xm on the given box (default unit box).
ChartPtr box_chart(int m, double lo = 0.0, double hi = 1.0);

// Parameter chart with variables w1..wk followed by t, each on [0, 1].  The
// time variable is last by convention; contraction against ∂/∂t relies on it.
ChartPtr cube_chart(int k);

}  // namespace sct::expr
