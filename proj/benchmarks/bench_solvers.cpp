#include <benchmark/benchmark.h>

#include "qubofit/data.hpp"
#include "qubofit/encoding.hpp"
#include "qubofit/solvers.hpp"

using namespace qubofit;

namespace {

NormalSystem cubic_system(std::size_t m) {
    GeneratorSpec g;
    g.kind = SampleKind::Cubic;
    g.seed = 42;
    return assemble(minmax_normalize(generate(g)), BasisSet::triangular_uniform(0.0, 1.0, m));
}

QuboProblem cubic_qubo(std::size_t m, int d) { return build_qubo(cubic_system(m), FixedPointFormat(d, d - 1)); }

void BM_BuildQubo(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const NormalSystem sys = cubic_system(m);
    const FixedPointFormat fmt(8, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_qubo(sys, fmt));
    }
    state.SetLabel("N=" + std::to_string(m * 8));
}
BENCHMARK(BM_BuildQubo)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_BruteForce(benchmark::State& state) {
    const QuboProblem q = cubic_qubo(2, static_cast<int>(state.range(0)) / 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(brute_force(q));
    }
    state.SetLabel("N=" + std::to_string(q.size()));
}
BENCHMARK(BM_BruteForce)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Tabu(benchmark::State& state) {
    const QuboProblem q = cubic_qubo(static_cast<std::size_t>(state.range(0)), 8);
    const SolverParams params = SolverParams::tabu_defaults(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(tabu_search(q, params));
    }
    state.SetLabel("N=" + std::to_string(q.size()));
}
BENCHMARK(BM_Tabu)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Annealing(benchmark::State& state) {
    const QuboProblem q = cubic_qubo(static_cast<std::size_t>(state.range(0)), 8);
    const SolverParams params = SolverParams::anneal_defaults(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulated_annealing(q, params));
    }
    state.SetLabel("N=" + std::to_string(q.size()));
}
BENCHMARK(BM_Annealing)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace
