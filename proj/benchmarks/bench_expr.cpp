#include <benchmark/benchmark.h>

#include "sct/expr.hpp"

namespace {

using namespace sct::expr;

ExprPtr sample_expression() {
  return parse("sin(x1*x2) + exp(0.3*x3)*cos(x1 - x3^2) + x2^3/(1 + x1^2)");
}

void BM_ExprEval(benchmark::State& state) {
  ExprPtr f = sample_expression();
  Env env;
  env.set("x1", 0.3);
  env.set("x2", -0.7);
  env.set("x3", 0.9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval(f, env));
  }
}
BENCHMARK(BM_ExprEval);

void BM_ExprDiff(benchmark::State& state) {
  ExprPtr f = sample_expression();
  for (auto _ : state) {
    benchmark::DoNotOptimize(diff(f, "x1"));
  }
}
BENCHMARK(BM_ExprDiff);

void BM_ExprParse(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse("sin(x1*x2) + exp(0.3*x3)*cos(x1 - x3^2)"));
  }
}
BENCHMARK(BM_ExprParse);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
