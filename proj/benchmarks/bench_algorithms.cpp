#include <benchmark/benchmark.h>

#include "pldo/algorithms.hpp"

using namespace pldo;

static void BM_DGDIteration(benchmark::State& state)
{
  const int n = static_cast<int>(state.range(0));
  const auto p = build_least_squares(n, 10, 10, 0);
  const auto model = MixingModel::metropolis(make_graph_sequence(n, SequenceKind::Static, {BaseTopology::Ring}));
  DGDConfig cfg;
  cfg.gamma = 1.0 / p.smoothness().L_global;
  cfg.iterations = 100;
  cfg.rounds = 5;
  cfg.oracle.delta = 0.1;
  cfg.oracle.sigma = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(dgd_run(p, model, cfg, StackedState(n, 10)));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_DGDIteration)->Arg(10)->Arg(50);

static void BM_MGDAOuter(benchmark::State& state)
{
  const int n = static_cast<int>(state.range(0));
  const auto p = build_robust_ls(n, 5, 5, 5, 2.0, 0);
  const auto model = MixingModel::metropolis(make_graph_sequence(n, SequenceKind::Static, {BaseTopology::Exponential}));
  MGDAConfig cfg;
  cfg.gamma_x = cfg.gamma_y = 1e-3;
  cfg.N_x = 20;
  cfg.N_y = 10;
  cfg.T_x = cfg.T_y = 10;
  for (auto _ : state) benchmark::DoNotOptimize(mgda_run(p, model, model, cfg, StackedState(n, 5), StackedState(n, 5)));
  state.SetItemsProcessed(state.iterations() * 20);
}
BENCHMARK(BM_MGDAOuter)->Arg(5)->Arg(20);
BENCHMARK_MAIN();
