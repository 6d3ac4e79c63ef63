// Serial reference vs OpenMP kernels on the workloads the CLI runs. The
// parallel variants are bit-identical to the serial ones (see test_kernels),
// so only throughput differs. Thread count follows OMP_NUM_THREADS.

#include "qnd/bayes.hpp"
#include "qnd/fock.hpp"
#include "qnd/kernels.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace qnd;

namespace {

struct Serial {
    template <class... A> static auto density(A&&... a) { return kernels::serial::homodyne_density_grid(a...); }
    template <class... A> static auto likelihood(A&&... a) { return kernels::serial::likelihood_grid(a...); }
    template <class... A> static auto minimize(A&&... a) { return kernels::serial::minimize_error_grid(a...); }
    template <class... A> static auto sample(A&&... a) { return kernels::serial::sample_batch(a...); }
    template <class... A> static auto summarize(A&&... a) { return kernels::serial::summarize_records(a...); }
};

struct Parallel {
    template <class... A> static auto density(A&&... a) { return kernels::parallel::homodyne_density_grid(a...); }
    template <class... A> static auto likelihood(A&&... a) { return kernels::parallel::likelihood_grid(a...); }
    template <class... A> static auto minimize(A&&... a) { return kernels::parallel::minimize_error_grid(a...); }
    template <class... A> static auto sample(A&&... a) { return kernels::parallel::sample_batch(a...); }
    template <class... A> static auto summarize(A&&... a) { return kernels::parallel::summarize_records(a...); }
};

// Desk-scale measurement: 494 probe photons, prior mean 100.
const KrausParams kKp{std::sqrt(494.0), 0.0033738191632928477, 0.006747638326585695, -2.0197};

template <class K>
void homodyne_density(benchmark::State& state) {
    const double alpha = static_cast<double>(state.range(0));
    const FockVector probe = fock::kerr_phase_evolve(fock::coherent_vector(alpha), 0.1 / (alpha * alpha), 0.04, 3.0);
    const auto xs = fock::quadrature_grid(alpha, 1e-3);
    for (auto _ : state) benchmark::DoNotOptimize(K::density(probe, xs, 0.0));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}

template <class K>
void kernel_likelihood(benchmark::State& state) {
    const KrausParams kp{3.0, 0.1 / 9.0, 0.04, 0.0};
    const auto xs = fock::quadrature_grid(3.0, 1e-4);
    for (auto _ : state) benchmark::DoNotOptimize(K::likelihood(xs, 5, kp, bayes::Likelihood::kernel));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}

template <class K>
void error_grid(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const InteractionParams ip = InteractionParams::from_factors(4.25e-7, 8.5e-7);
    std::vector<double> zetas(side), n_ps(side);
    for (std::size_t i = 0; i < side; ++i) {
        zetas[i] = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(i + 1) / static_cast<double>(side);
        n_ps[i] = 1e5 * std::pow(1e3, static_cast<double>(i) / static_cast<double>(side - 1));
    }
    for (auto _ : state) benchmark::DoNotOptimize(K::minimize(ip, 0.9, 1e6, zetas, n_ps));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}

template <class K>
void calibration(benchmark::State& state) {
    const auto count = static_cast<std::size_t>(state.range(0));
    const PhotonDistribution prior = bayes::poisson_prior(100.0);
    for (auto _ : state) {
        const auto records = K::sample(prior, kKp, 20240601, count, 0);
        benchmark::DoNotOptimize(K::summarize(records, prior, kKp, 0.68));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(count));
}

}  // namespace

BENCHMARK(homodyne_density<Serial>)->Arg(3)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(homodyne_density<Parallel>)->Arg(3)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(kernel_likelihood<Serial>)->Unit(benchmark::kMillisecond);
BENCHMARK(kernel_likelihood<Parallel>)->Unit(benchmark::kMillisecond);
BENCHMARK(error_grid<Serial>)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(error_grid<Parallel>)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(calibration<Serial>)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(calibration<Parallel>)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
