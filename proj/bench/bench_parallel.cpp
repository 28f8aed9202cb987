// Serial reference against the OpenMP kernels on the two sharded workloads.

#include <benchmark/benchmark.h>

#include <random>

#include "fluxsim/anyon.hpp"
#include "fluxsim/parallel.hpp"
#include "fluxsim/synth.hpp"

using namespace fluxsim;

namespace {

const GroupPtr& a5() {
  static const GroupPtr G = alternating_group(5);
  return G;
}

bool fusion_trial(std::int64_t, std::uint64_t seed) {
  const FiniteGroup& G = *a5();
  static const int b = G.index_of(parse_cycles("(3 4 5)", 5));
  AnyonSystem sys(a5(), seed);
  const PairId p = sys.create_flux_ancilla(b);
  const PairId q = sys.create_flux_ancilla(G.inv(b));
  return sys.fuse(p.left, q.left).result == FusionResult::Vacuum;
}

struct TableFixture {
  Program program;
  std::vector<int> table;

  TableFixture() : table(3600) {
    std::mt19937_64 eng(1);
    for (auto& v : table) v = static_cast<int>(eng() % 60);
    Synthesizer syn(a5());
    program = synthesize(syn, 2, table);
  }
};

const TableFixture& tables() {
  static const TableFixture f;
  return f;
}

void BM_FusionTrialsSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(count_trials_serial(1, state.range(0), fusion_trial));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FusionTrialsParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(count_trials(1, state.range(0), fusion_trial));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_VerifyTableSerial(benchmark::State& state) {
  const auto& f = tables();
  for (auto _ : state) benchmark::DoNotOptimize(verify_table_serial(*a5(), f.program, f.table));
  state.SetItemsProcessed(state.iterations() * 3600);
}

void BM_VerifyTableParallel(benchmark::State& state) {
  const auto& f = tables();
  for (auto _ : state) benchmark::DoNotOptimize(verify_table(*a5(), f.program, f.table));
  state.SetItemsProcessed(state.iterations() * 3600);
}

}  // namespace

BENCHMARK(BM_FusionTrialsSerial)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FusionTrialsParallel)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyTableSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyTableParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
