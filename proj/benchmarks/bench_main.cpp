#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "tfgamma/bounds.hpp"
#include "tfgamma/fermi_box.hpp"
#include "tfgamma/potentials.hpp"
#include "tfgamma/spectral.hpp"
#include "tfgamma/tf.hpp"

namespace {

using namespace tfgamma;

GridDensity gaussian_1d(std::size_t cells) {
    const auto g = GridSpec::box(1, -4.0, 4.0, cells);
    return GridDensity::sample(g, [](std::span<const double> x) { return std::exp(-0.5 * x[0] * x[0]); }).normalized();
}

void BM_SturmCount(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> diag(n), off(n - 1, -1.0);
    for (std::size_t i = 0; i < n; ++i) diag[i] = 2.0 + std::sin(0.01 * static_cast<double>(i));
    for (auto _ : state) benchmark::DoNotOptimize(sturm_count(diag, off, 1.5));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SturmCount)->Range(1 << 10, 1 << 18)->Complexity(benchmark::oN);

void BM_BoxSpectrum(benchmark::State& state) {
    const Cube cube{{0.0, 0.0, 0.0}, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(box_spectrum(cube, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_BoxSpectrum)->Arg(100)->Arg(1000)->Arg(10000);

void BM_SeaDensity(benchmark::State& state) {
    const auto f = gaussian_1d(1024);
    const auto rec = build_recovery(f, static_cast<std::size_t>(state.range(0)), 4);
    const auto grid = resolving_grid(rec.sea, f.grid());
    for (auto _ : state) benchmark::DoNotOptimize(sea_density(rec.sea, grid));
}
BENCHMARK(BM_SeaDensity)->Arg(200)->Arg(2000);

void BM_PairInteractionShells(benchmark::State& state) {
    const auto f = gaussian_1d(static_cast<std::size_t>(state.range(0)));
    const auto w = piecewise_constant_kernel({{0.0, 1.0, 1.0}, {1.0, 2.0, 0.5}});
    for (auto _ : state) benchmark::DoNotOptimize(pair_interaction(f.as_field(), f.as_field(), w));
}
BENCHMARK(BM_PairInteractionShells)->Arg(1024)->Arg(16384);

void BM_InteractionChannel(benchmark::State& state) {
    const RadialGrid grid{1e-4, 12.0, 3000};
    const auto f = RadialDensity::sample(grid, [](double r) {
        return std::pow(2.0 * std::numbers::pi, -1.5) * std::exp(-0.5 * r * r);
    });
    const auto chi = coulomb_chi(3);
    const double N = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(interaction_channel(f, chi, N, 1.0 / N).value);
}
BENCHMARK(BM_InteractionChannel)->Arg(100)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_TFHarmonic(benchmark::State& state) {
    TFProblem p;
    p.external = harmonic_potential();
    const auto grid = GridSpec::box(1, -8.0, 8.0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(tf_minimize(p, grid, 1e-10).energy.total);
}
BENCHMARK(BM_TFHarmonic)->Arg(1024)->Arg(8192);

}  // namespace
BENCHMARK_MAIN();
