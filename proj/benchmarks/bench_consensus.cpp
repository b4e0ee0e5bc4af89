#include <benchmark/benchmark.h>

#include "pldo/consensus.hpp"

using namespace pldo;

static void BM_Metropolis(benchmark::State& state)
{
  const int n = static_cast<int>(state.range(0));
  GraphParams gp;
  gp.base = BaseTopology::RandomConnected;
  gp.seed = 1;
  const auto seq = make_graph_sequence(n, SequenceKind::Static, gp);
  for (auto _ : state) benchmark::DoNotOptimize(metropolis_matrix(seq, 0));
}
BENCHMARK(BM_Metropolis)->Arg(10)->Arg(50)->Arg(200);

static void BM_Consensus(benchmark::State& state)
{
  const int n = static_cast<int>(state.range(0));
  const auto model = MixingModel::metropolis(make_graph_sequence(n, SequenceKind::Static, {BaseTopology::Exponential}));
  const StackedState z0(Matrix::Random(n, 5));
  for (auto _ : state) {
    CommClock clock;
    benchmark::DoNotOptimize(run_consensus(z0, 10, model, clock));
  }
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_Consensus)->Arg(5)->Arg(20)->Arg(100);

static void BM_Calibrate(benchmark::State& state)
{
  const int n = static_cast<int>(state.range(0));
  GraphParams gp;
  gp.base = BaseTopology::Ring;
  gp.tau = 3;
  for (auto _ : state)
    benchmark::DoNotOptimize(MixingModel::calibrated(make_graph_sequence(n, SequenceKind::TauConnected, gp)).lambda());
}
BENCHMARK(BM_Calibrate)->Arg(9)->Arg(30);
