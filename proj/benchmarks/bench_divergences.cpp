#include <benchmark/benchmark.h>

#include "qrd/qrd.hpp"

namespace {

using namespace qrd;

struct Pair {
    HermitianOperator rho, sigma;
};

Pair random_pair(int d) {
    Rng rng = make_rng(2024, static_cast<std::uint64_t>(d));
    HermitianOperator rho = random_state(d, rng);
    HermitianOperator sigma = random_invertible_state(d, rng);
    return {rho, sigma};
}

void BM_Sandwiched(benchmark::State& state) {
    const Pair p = random_pair(static_cast<int>(state.range(0)));
    const DivergenceParams params = DivergenceParams::finite(1.7, 0.9);
    for (auto _ : state) benchmark::DoNotOptimize(d_alpha_z(p.rho, p.sigma, params));
}
BENCHMARK(BM_Sandwiched)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_ZeroLimit(benchmark::State& state) {
    const Pair p = random_pair(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(d_alpha_zero(p.rho, p.sigma, 1.5));
}
BENCHMARK(BM_ZeroLimit)->Arg(2)->Arg(4)->Arg(8);

void BM_Measured(benchmark::State& state) {
    const Pair p = random_pair(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(measured_renyi_lower(p.rho, p.sigma, 2.0, 2, 1));
}
BENCHMARK(BM_Measured)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ChannelDivergence(benchmark::State& state) {
    const Channel id = Channel::identity(2), dep = Channel::depolarizing(2, 0.2);
    const auto spec = ChannelDivergenceSpec::alpha_z(DivergenceParams::finite(2, 2));
    for (auto _ : state) benchmark::DoNotOptimize(channel_divergence(id, dep, spec, static_cast<int>(state.range(0)), 3));
}
BENCHMARK(BM_ChannelDivergence)->Arg(0)->Arg(4)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
