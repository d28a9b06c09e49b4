// Serial reference vs OpenMP Bellman backup on the three-day scenario.

#include <cmath>

#include <benchmark/benchmark.h>

#include "thermo/dp_solver.hpp"

namespace {

thermo::UserProblem make_problem() {
    using namespace thermo;
    const BuildingParams b = BuildingParams::make(8.3e-7, 0.4, 0.0015, 45.0, 3, 3600.0);
    const TariffSchedule tariff = TariffSchedule::from_hours({0.089, 0.044, 13.5}, 12.0, 19.0, 3, 1.0);
    ExteriorTrace trace;
    for (int h = 0; h < 72; ++h) trace.temps.push_back(36.0 + 7.0 * std::cos(2.0 * M_PI * (h - 16) / 24.0));
    return UserProblem{b, tariff, trace, ComfortBand{22.0, 28.0}, WallState::uniform(3, 28.0)};
}

void run_backup(benchmark::State& state, thermo::Kernel kernel) {
    thermo::DpConfig config;
    config.grid_nodes = static_cast<int>(state.range(0));
    config.exploit_symmetry = state.range(1) != 0;
    const thermo::DpSolver solver(make_problem(), config);
    const thermo::ValueGrid terminal = solver.terminal_layer(9000.0);
    for (auto _ : state) {
        // step 13 is on-peak, so the cap filter is exercised
        thermo::ValueGrid next = terminal;
        next.step = 14;
        benchmark::DoNotOptimize(solver.bellman_backup(next, 9000.0, kernel));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(solver.grid().size()));
}

void BM_BackupSerial(benchmark::State& state) { run_backup(state, thermo::Kernel::serial); }
void BM_BackupParallel(benchmark::State& state) { run_backup(state, thermo::Kernel::parallel); }

void BM_SolveFixedGamma(benchmark::State& state) {
    thermo::DpConfig config;
    config.grid_nodes = static_cast<int>(state.range(0));
    const thermo::DpSolver solver(make_problem(), config);
    const auto kernel = state.range(1) != 0 ? thermo::Kernel::parallel : thermo::Kernel::serial;
    for (auto _ : state) benchmark::DoNotOptimize(solver.solve_fixed_gamma(9000.0, kernel));
}

}  // namespace

BENCHMARK(BM_BackupSerial)->Args({21, 1})->Args({41, 1})->Args({21, 0});
BENCHMARK(BM_BackupParallel)->Args({21, 1})->Args({41, 1})->Args({21, 0});
BENCHMARK(BM_SolveFixedGamma)->Args({21, 0})->Args({21, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
