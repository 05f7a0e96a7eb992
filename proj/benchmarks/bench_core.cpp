// Microbenchmarks for the hot paths: model fitting, the constrained
// trust-region step, and a short end-to-end solve.

#include <benchmark/benchmark.h>

#include <random>

#include "fibo/driver.hpp"

using fibo::Vector;

namespace {

fibo::InterpolationSet quadratic_stencil(int n) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector g = Vector::NullaryExpr(n, [&] { return u(rng); });
  fibo::Matrix A = fibo::Matrix::NullaryExpr(n, n, [&] { return u(rng); });
  const fibo::Matrix H = 0.5 * (A + A.transpose());
  fibo::InterpolationSet Y;
  for (const Vector& p : fibo::build_stencil(Vector::Zero(n), 1.0)) {
    Y.points.push_back(p);
    Y.values.push_back(g.dot(p) + 0.5 * p.dot(H * p));
  }
  return Y;
}

void BM_FitModel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto Y = quadratic_stencil(n);
  const Vector x_k = Vector::Zero(n);
  for (auto _ : state)
    benchmark::DoNotOptimize(fibo::fit_model(Y, x_k));
}
BENCHMARK(BM_FitModel)->Arg(2)->Arg(4)->Arg(6);

void BM_TrSubproblem(benchmark::State& state) {
  const auto hs22 = fibo::get_problem("HS22");
  const Vector x_k = (Vector(2) << 0.5, 0.5).finished();
  fibo::InterpolationSet Y;
  for (const Vector& p : fibo::build_stencil(x_k, 0.5)) {
    Y.points.push_back(p);
    Y.values.push_back(hs22.objective(p));
  }
  const auto model = fibo::fit_model(Y, x_k);
  for (auto _ : state) {
    fibo::EvalLedger ledger;
    benchmark::DoNotOptimize(
        fibo::solve_tr_subproblem(model, hs22, x_k, 0.5, ledger));
  }
}
BENCHMARK(BM_TrSubproblem);

void BM_FiboSolve(benchmark::State& state) {
  const auto hs22 = fibo::get_problem("HS22");
  for (auto _ : state)
    benchmark::DoNotOptimize(fibo::fibo_solve(hs22));
}
BENCHMARK(BM_FiboSolve);

}  // namespace

BENCHMARK_MAIN();
