#include <benchmark/benchmark.h>

#include <cmath>

#include "taillab/estimators.hpp"
#include "taillab/generators.hpp"
#include "taillab/limit_process.hpp"
#include "taillab/pa_network.hpp"
#include "taillab/rng.hpp"

using namespace taillab;

static void BM_KsProfile(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto rng = make_stream(1);
    const OrderedSample s = order_sample(sample_pareto(ParetoModel{1.0, 1.0}, n, rng));
    for (auto _ : state) {
        benchmark::DoNotOptimize(ks_profile(s));
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_KsProfile)->Arg(1000)->Arg(2000)->Arg(4000)->Complexity();

static void BM_KsProfileIntegerDegrees(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto rng = make_stream(2);
    std::vector<double> data = sample_pareto(ParetoModel{1.3, 1.0}, n, rng);
    for (auto& x : data) x = std::ceil(x);
    const OrderedSample s = order_sample(data);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ks_profile(s));
    }
}
BENCHMARK(BM_KsProfileIntegerDegrees)->Arg(2000)->Arg(12000);

static void BM_LimitDraw(benchmark::State& state) {
    const Grid grid(static_cast<int>(state.range(0)));
    auto rng = make_stream(3);
    const BrownianPath path = simulate_brownian(grid, rng);
    LimitWorkspace ws;
    for (auto _ : state) {
        benchmark::DoNotOptimize(draw_T(path, ws));
    }
}
BENCHMARK(BM_LimitDraw)->Arg(1024)->Arg(2048)->Arg(4096);

static void BM_BreakLimitDraw(benchmark::State& state) {
    const Grid grid(static_cast<int>(state.range(0)));
    auto rng = make_stream(4);
    const BrownianPath path = simulate_brownian(grid, rng);
    LimitWorkspace ws;
    for (auto _ : state) {
        benchmark::DoNotOptimize(draw_Tstar(path, 0.5, 1.0, -2.0, UGrid{}, ws));
    }
}
BENCHMARK(BM_BreakLimitDraw)->Arg(2048)->Arg(4096);

static void BM_PaGrowth(benchmark::State& state) {
    const PaParams p = pa_params_normalized(0.0978, 0.873, 0.0289, 2.05, 13.8);
    const auto edges = static_cast<double>(state.range(0));
    const auto target = static_cast<std::uint32_t>(std::ceil((p.alpha + p.gamma) * edges));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(grow_until_nodes(p, target, seed++));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PaGrowth)->Arg(100000);

BENCHMARK_MAIN();
