// Tests for the scalar expression DSL: evaluation, symbolic differentiation
// against central differences, substitution, parsing, and error reporting.
#include "doctest.h"
#include "sct/expr.hpp"

#include <cmath>
#include <random>

using namespace sct::expr;

namespace {

// Deterministic random expression generator.  Division keeps constant
// denominators away from zero and exp arguments are damped so values stay in a
// range where central differences are meaningful.
struct Gen {
  std::mt19937 rng;
  std::uniform_real_distribution<double> unit{-1.0, 1.0};

  explicit Gen(unsigned seed) : rng(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * 0.5 * (unit(rng) + 1.0);
  }

  int pick(int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); }

  ExprPtr leaf() {
    if (pick(3) == 0) return constant(uniform(-2.0, 2.0));
    return var("x" + std::to_string(1 + pick(3)));
  }

  ExprPtr gen(int depth) {
    if (depth <= 0) return leaf();
    switch (pick(8)) {
      case 0: return add(gen(depth - 1), gen(depth - 1));
      case 1: return sub(gen(depth - 1), gen(depth - 1));
      case 2: return mul(gen(depth - 1), gen(depth - 1));
      case 3: {
        double c = uniform(0.5, 2.0) * (pick(2) ? 1.0 : -1.0);
        return div(gen(depth - 1), constant(c));
      }
      case 4: return pow(gen(depth - 1), 2 + pick(2));
      case 5: return sin(gen(depth - 1));
      case 6: return cos(gen(depth - 1));
      default: return exp(mul(constant(0.3), gen(depth - 1)));
    }
  }

  Env point() {
    Env env;
    for (int i = 1; i <= 3; ++i) env.set("x" + std::to_string(i), unit(rng));
    return env;
  }
};

}  // namespace

TEST_CASE("evaluation of hand-built expressions") {
  Env env;
  env.set("x1", 2.0);
  env.set("x2", 3.0);

  auto e = add(mul(var("x1"), var("x2")), pow(var("x1"), 3));
  CHECK(eval(e, env) == doctest::Approx(2.0 * 3.0 + 8.0));

  CHECK(eval(sin(constant(0.0)), env) == doctest::Approx(0.0));
  CHECK(eval(exp(constant(1.0)), env) == doctest::Approx(std::exp(1.0)));
  CHECK(eval(pow(var("x1"), -2), env) == doctest::Approx(0.25));
}

TEST_CASE("constant folding keeps trees small") {
  CHECK(is_zero(mul(constant(0.0), var("x1"))));
  CHECK(is_const(add(constant(1.0), constant(2.0)), 3.0));
  CHECK(mul(constant(1.0), var("x1"))->kind == Kind::Var);
  CHECK(add(var("x1"), constant(0.0))->kind == Kind::Var);
  CHECK(is_const(pow(var("x1"), 0), 1.0));
  CHECK(pow(var("x1"), 1)->kind == Kind::Var);
  // A division by a literal zero must survive folding so eval can report it.
  CHECK(div(constant(1.0), constant(0.0))->kind == Kind::Div);
}

TEST_CASE("derivatives match central differences on 1000 random expressions") {
  Gen g(20240817u);
  const double h = 1e-5;
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    ExprPtr f = g.gen(3);
    Env env = g.point();
    for (int i = 1; i <= 3; ++i) {
      std::string xi = "x" + std::to_string(i);
      ExprPtr df = diff(f, xi);
      double exact = eval(df, env);
      const double x0 = *env.find(xi);
      Env ep = env, em = env;
      ep.set(xi, x0 + h);
      em.set(xi, x0 - h);
      double fp = eval(f, ep), fm = eval(f, em);
      double approx = (fp - fm) / (2.0 * h);
      // Skip samples where the stencil leaves the well-conditioned range.
      if (!std::isfinite(exact) || !std::isfinite(approx)) continue;
      if (std::abs(fp) > 1e3 || std::abs(fm) > 1e3 || std::abs(exact) > 1e3) continue;
      ++checked;
      CHECK(std::abs(exact - approx) <= 1e-6 * (1.0 + std::abs(exact)));
    }
  }
  // The generator is tame enough that almost every sample must survive.
  CHECK(checked >= 2500);
}

TEST_CASE("mixed partial derivatives commute") {
  Gen g(777u);
  for (int trial = 0; trial < 100; ++trial) {
    ExprPtr f = g.gen(3);
    Env env = g.point();
    double a = eval(diff(diff(f, "x1"), "x2"), env);
    double b = eval(diff(diff(f, "x2"), "x1"), env);
    if (!std::isfinite(a) || !std::isfinite(b)) continue;
    CHECK(std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a)));
  }
}

TEST_CASE("substitution composes expressions") {
  // x1^2 with x1 -> t + 1, evaluated at t = 2, gives 9.
  auto f = pow(var("x1"), 2);
  auto gsub = substitute(f, {{"x1", add(var("t"), constant(1.0))}});
  Env env;
  env.set("t", 2.0);
  CHECK(eval(gsub, env) == doctest::Approx(9.0));
  // Untouched variables pass through.
  auto h2 = substitute(add(var("x1"), var("x2")), {{"x1", constant(5.0)}});
  env.set("x2", 1.0);
  CHECK(eval(h2, env) == doctest::Approx(6.0));
}

TEST_CASE("parser handles the published grammar") {
  Env env;
  env.set("x1", 2.0);
  env.set("x2", 3.0);
  env.set("w1", 0.5);
  env.set("y1", 0.25);
  env.set("t", 4.0);

  CHECK(eval(parse("x1 + 2*x2"), env) == doctest::Approx(8.0));
  CHECK(eval(parse("1+2*3"), env) == doctest::Approx(7.0));
  CHECK(eval(parse("(1+2)*3"), env) == doctest::Approx(9.0));
  CHECK(eval(parse("2*x1^3"), env) == doctest::Approx(16.0));
  CHECK(eval(parse("6/3/2"), env) == doctest::Approx(1.0));
  CHECK(eval(parse("1-2-3"), env) == doctest::Approx(-4.0));
  CHECK(eval(parse("-x1"), env) == doctest::Approx(-2.0));
  CHECK(eval(parse("x1^-1"), env) == doctest::Approx(0.5));
  CHECK(eval(parse("2.5e2"), env) == doctest::Approx(250.0));
  CHECK(eval(parse("1e-3"), env) == doctest::Approx(0.001));
  CHECK(eval(parse("sin(x1)*cos(x2)+exp(t)"), env) ==
        doctest::Approx(std::sin(2.0) * std::cos(3.0) + std::exp(4.0)));
  CHECK(eval(parse("w1 + y1 + t"), env) == doctest::Approx(4.75));
  CHECK(eval(parse("1 + (-2)"), env) == doctest::Approx(-1.0));
}

TEST_CASE("parser reports byte offsets for malformed input") {
  auto offset_of = [](std::string_view text) -> std::size_t {
    try {
      parse(text);
    } catch (const ParseError& e) {
      return e.offset;
    }
    return static_cast<std::size_t>(-1);
  };

  CHECK(offset_of("x1 +") == 4);       // missing right operand
  CHECK(offset_of("") == 0);           // empty input
  CHECK(offset_of("foo") == 0);        // unknown identifier, at its start
  CHECK(offset_of("1 + foo") == 4);    // unknown identifier later in the text
  CHECK(offset_of("x1x") == 0);        // identifier with trailing letters
  CHECK(offset_of("(1+2") == 4);       // unclosed parenthesis
  CHECK(offset_of("x1 @ 2") == 3);     // stray operator
  CHECK(offset_of("x1 ^ q") == 5);     // non-integer exponent
  CHECK(offset_of("x1 x2") == 3);      // trailing input

  CHECK_THROWS_AS(parse("x1 +"), ParseError);
  CHECK_THROWS_AS(parse("sin x1"), ParseError);
}

TEST_CASE("evaluation errors carry useful messages") {
  Env empty;
  CHECK_THROWS_AS(eval(parse("x1"), empty), EvalError);
  Env env;
  env.set("x1", 0.0);
  CHECK_THROWS_AS(eval(parse("1/x1"), env), EvalError);
  CHECK_THROWS_AS(eval(parse("1/0"), env), EvalError);
}

TEST_CASE("printing round-trips through the parser") {
  Gen g(4242u);
  for (int trial = 0; trial < 50; ++trial) {
    ExprPtr f = g.gen(3);
    Env env = g.point();
    double direct = 0.0;
    try {
      direct = eval(f, env);
    } catch (const EvalError&) {
      continue;
    }
    if (!std::isfinite(direct)) continue;
    double reparsed = eval(parse(to_string(f)), env);
    CHECK(reparsed == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("charts name coordinates and track bounds") {
  auto chart = box_chart(3);
  CHECK(chart->dim() == 3);
  CHECK(chart->vars[0] == "x1");
  CHECK(chart->vars[2] == "x3");
  CHECK(chart->index_of("x2") == 1);
  CHECK(chart->index_of("x9") == -1);
  CHECK(chart->bounds[0].first == 0.0);
  CHECK(chart->bounds[0].second == 1.0);

  auto custom = make_chart({"x1", "x2"}, {{-1.0, 1.0}, {0.0, 2.0}});
  CHECK(custom->dim() == 2);
  CHECK(custom->bounds[1].second == 2.0);
}
