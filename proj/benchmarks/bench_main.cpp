#include <benchmark/benchmark.h>

#include "iat/arnoldi.hpp"
#include "iat/paramselect.hpp"
#include "iat/problems.hpp"
#include "iat/solver.hpp"

namespace {

const iat::Problem& phillips_problem() {
  static const iat::Problem p = iat::make_problem({iat::ProblemKind::phillips, 1000, 0.01, 11});
  return p;
}

void BM_ArnoldiPhillips(benchmark::State& state) {
  const auto& p = phillips_problem();
  for (auto _ : state) {
    benchmark::DoNotOptimize(iat::arnoldi(*p.op, p.y_delta, state.range(0)));
  }
}
BENCHMARK(BM_ArnoldiPhillips)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_KronBlurApply(benchmark::State& state) {
  const auto blur = iat::blur(state.range(0));
  iat::Vector x = blur.x_dagger;
  for (auto _ : state) {
    x = blur.op->apply(x);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations() * x.size());
}
BENCHMARK(BM_KronBlurApply)->Arg(30)->Arg(100);

void BM_IatSolve(benchmark::State& state) {
  const auto& p = phillips_problem();
  const auto dec = iat::arnoldi(*p.op, p.y_delta, 30);
  const iat::Vector yr = dec.reduce(p.y_delta);
  for (auto _ : state) {
    benchmark::DoNotOptimize(iat::iat_solve(dec.hessenberg, yr, 5.0, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_IatSolve)->Arg(1)->Arg(200)->Arg(2000);

void BM_SolveAlpha(benchmark::State& state) {
  const auto& p = phillips_problem();
  const auto dec = iat::arnoldi(*p.op, p.y_delta, 30);
  const auto svd = iat::hessenberg_svd(dec.hessenberg, dec.reduce(p.y_delta));
  const double rhs = 0.5 * svd.y_hat_norm();
  const auto form = state.range(1) ? iat::PhiForm::literal : iat::PhiForm::diagonal;
  for (auto _ : state) {
    benchmark::DoNotOptimize(iat::solve_alpha(svd, static_cast<int>(state.range(0)), rhs, 1e-12, form));
  }
}
BENCHMARK(BM_SolveAlpha)->Args({1, 0})->Args({200, 0})->Args({200, 1});

void BM_ApproximationGapBlur(benchmark::State& state) {
  const auto blur = iat::blur(30);
  const iat::Vector y = blur.op->apply(blur.x_dagger);
  const auto dec = iat::arnoldi(*blur.op, y, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(iat::approximation_gap(*blur.op, dec));
  }
}
BENCHMARK(BM_ApproximationGapBlur)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
