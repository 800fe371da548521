#include <benchmark/benchmark.h>

#include "polylab/collapse.hpp"
#include "polylab/copoly.hpp"
#include "polylab/homopin.hpp"
#include "polylab/randpin.hpp"
#include "polylab/randpot.hpp"

using namespace polylab;

static void BM_CollapseEnumerate(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(collapse::enumerate(int(st.range(0))));
}
BENCHMARK(BM_CollapseEnumerate)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_HomopinPartition(benchmark::State& st) {
    const auto pin = homopin::PinningSpec::srw_pinned();
    for (auto _ : st) benchmark::DoNotOptimize(homopin::constrained_partition(pin, 1.0, std::size_t(st.range(0))));
}
BENCHMARK(BM_HomopinPartition)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

static void BM_RandpinQuenched(benchmark::State& st) {
    const auto spec = randpin::RandomPinningSpec::make(TailedLaw::srw(256), DisorderLaw::bernoulli());
    for (auto _ : st) benchmark::DoNotOptimize(randpin::quenched_f(spec, 1.0, 0.0, std::size_t(st.range(0)), 1));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_RandpinQuenched)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_CopolyQuenched(benchmark::State& st) {
    copoly::CopolySpec spec;
    for (auto _ : st) benchmark::DoNotOptimize(copoly::quenched_g(spec, 1.0, 0.3, std::size_t(st.range(0)), 1));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_CopolyQuenched)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_RandpotReplica(benchmark::State& st) {
    randpot::EnvSlab env;
    env.d = int(st.range(0));
    env.n = int(st.range(1));
    for (auto _ : st) benchmark::DoNotOptimize(randpot::trace_replica(env, 0.3));
}
BENCHMARK(BM_RandpotReplica)->Args({1, 1000})->Args({2, 200})->Args({3, 60})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
