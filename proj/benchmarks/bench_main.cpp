#include <benchmark/benchmark.h>

#include "dmgsp/dmgsp.hpp"

using namespace dmgsp;

namespace {

void BM_Decompose(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Graph g = random_sensor_graph(n, 7);
  TransitionMatrix tm = markov_matrix(g.weights());
  for (auto _ : state) {
    benchmark::DoNotOptimize(decompose(tm));
  }
}
BENCHMARK(BM_Decompose)->Arg(30)->Arg(100);

void BM_ApplyFilter(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Graph g = random_sensor_graph(n, 7);
  ShiftOperator s = build_gso(g, GsoKind::Markov);
  FilterSpec f = FilterSpec::tikhonov(0.5);
  Rng rng(1);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_filter(s, f, x));
  }
}
BENCHMARK(BM_ApplyFilter)->Arg(100);

void BM_MarkovVarStep(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Rng rng(3);
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  Eigen::MatrixXd sigma = a * a.transpose() / double(n);
  Eigen::MatrixXd w = project_doubly_stochastic(
      Eigen::MatrixXd::Constant(n, n, 0.5), 50);
  for (auto _ : state) {
    benchmark::DoNotOptimize(markov_var_objective(sigma, w));
    benchmark::DoNotOptimize(markov_var_gradient(sigma, w));
  }
}
BENCHMARK(BM_MarkovVarStep)->Arg(30)->Arg(100);

void BM_ProjectDoublyStochastic(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Rng rng(5);
  Eigen::MatrixXd w(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) w(i, j) = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_doubly_stochastic(w, 50));
  }
}
BENCHMARK(BM_ProjectDoublyStochastic)->Arg(30)->Arg(100);

void BM_RunGridCell(benchmark::State& state) {
  auto [g, x] = gen_synthetic(30, 7, 200);
  LearnOptions opts;
  opts.max_iters = 50;
  GsoSpec gso;
  gso.kind = GsoKind::Markov;
  FilterSpec f = FilterSpec::tikhonov(0.5, TikhonovSign::Minus);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        learn_pipeline(x, g, gso, f, LearnMethod::MV, opts));
  }
}
BENCHMARK(BM_RunGridCell)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
