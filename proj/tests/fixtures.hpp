// Shared builders for the test suites.

#ifndef THERMO_TESTS_FIXTURES_HPP
#define THERMO_TESTS_FIXTURES_HPP

#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include "thermo/dp_solver.hpp"
#include "thermo/scenario_io.hpp"

namespace fixtures {

inline std::filesystem::path source_dir() { return THERMO_SOURCE_DIR; }
inline std::filesystem::path data_file(const char* name) { return source_dir() / "data" / name; }
inline std::filesystem::path config_file(const char* name) { return source_dir() / "configs" / name; }

inline thermo::BuildingParams table1(int m = 3, double dt_seconds = 3600.0) {
    return thermo::BuildingParams::make(8.3e-7, 0.4, 0.0015, 45.0, m, dt_seconds);
}

// Same sinusoid as the bundled CSV, evaluated directly.
inline thermo::ExteriorTrace phoenix_like(int hours = 72) {
    thermo::ExteriorTrace t;
    for (int h = 0; h < hours; ++h) t.temps.push_back(36.0 + 7.0 * std::cos(2.0 * M_PI * (h - 16) / 24.0));
    return t;
}

inline thermo::UserProblem aps_problem(thermo::Prices prices = {0.089, 0.044, 13.5}) {
    using namespace thermo;
    return UserProblem{table1(), TariffSchedule::from_hours(prices, 12.0, 19.0, 3, 1.0), phoenix_like(),
                       ComfortBand{22.0, 28.0}, WallState::uniform(3, 28.0)};
}

inline thermo::ScenarioConfig aps_config() {
    return thermo::ScenarioConfig::from(thermo::KeyValueConfig::load(config_file("aps_demand.cfg")));
}

// Small randomized problem: one day at a coarse step so DP solves stay cheap.
struct RandomProblem {
    thermo::UserProblem problem;
    double gamma_lo = 0.0;  // smallest on-peak power reachable at u = t_max from the band
    double gamma_hi = 0.0;
};

inline RandomProblem random_problem(std::mt19937_64& rng, int m = 1) {
    using namespace thermo;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int steps = std::uniform_int_distribution<int>(4, 8)(rng);
    const double dt_h = 24.0 / steps;
    // keep alpha * dt / dx^2 <= 1/2 for the chosen M
    const double l_in = 0.4;
    const double dx = l_in / (m + 1);
    const double alpha = (0.05 + 0.45 * unit(rng)) * dx * dx / (dt_h * 3600.0);
    const BuildingParams b =
        BuildingParams::make(alpha, l_in, 0.001 + 0.002 * unit(rng), 20.0 + 40.0 * unit(rng), m, dt_h * 3600.0);
    const int on_start = std::uniform_int_distribution<int>(0, steps - 2)(rng);
    const int on_end = std::uniform_int_distribution<int>(on_start + 1, steps)(rng);
    const Prices prices{0.02 + 0.1 * unit(rng), 0.01 + 0.06 * unit(rng), 2.0 + 18.0 * unit(rng)};
    TariffSchedule tariff(prices, steps, on_start, on_end, steps, dt_h);
    ExteriorTrace ext;
    for (int k = 0; k < steps; ++k) ext.temps.push_back(30.0 + 14.0 * unit(rng));
    const ComfortBand band{22.0, 28.0};
    const double t0 = 22.0 + 6.0 * unit(rng);
    RandomProblem out{UserProblem{b, tariff, ext, band, WallState::uniform(m, t0)}, 0.0, 0.0};
    double lo = 1e300, hi = -1e300;
    for (int k = on_start; k < on_end; ++k) {
        for (double t1 : {band.t_min, band.t_max}) {
            lo = std::min(lo, power(b, static_cast<std::size_t>(k), band.t_max, t1, ext));
            hi = std::max(hi, power(b, static_cast<std::size_t>(k), band.t_min, t1, ext));
        }
    }
    out.gamma_lo = lo;
    out.gamma_hi = hi;
    return out;
}

inline thermo::DpConfig coarse_dp() {
    thermo::DpConfig c;
    c.grid_nodes = 11;
    c.du = 0.5;
    return c;
}

}  // namespace fixtures

#endif  // THERMO_TESTS_FIXTURES_HPP
