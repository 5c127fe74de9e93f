#include <benchmark/benchmark.h>

#include "qubofit/dynprog.hpp"

using namespace qubofit;

namespace {

const JitParams kJit{100.0, 50.0, 100.0, {}};

void BM_GridValueIteration(benchmark::State& state) {
    const MdpSpec mdp = make_jit_mdp(kJit, 4);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(value_iteration_grid(mdp, n, n));
    }
}
BENCHMARK(BM_GridValueIteration)->Arg(50)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FittedValueIteration(benchmark::State& state) {
    const MdpSpec mdp = make_jit_mdp(kJit, 4);
    const BasisSet basis = BasisSet::triangular_uniform(0.0, 100.0, 9);
    SolverConfig config;
    config.backend = state.range(0) == 0 ? Backend::Classical : Backend::Tabu;
    config.params = SolverParams::tabu_defaults(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fitted_value_iteration(mdp, basis, FixedPointFormat(9, 8), config, 50, 2001));
    }
    state.SetLabel(to_string(config.backend));
}
BENCHMARK(BM_FittedValueIteration)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
