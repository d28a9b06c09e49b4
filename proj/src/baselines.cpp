#include "thermo/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace thermo {

std::vector<double> constant_strategy(const ComfortBand& band, int n_steps) {
    if (n_steps < 0) throw std::invalid_argument("negative horizon");
    return std::vector<double>(static_cast<std::size_t>(n_steps), band.t_max);
}

std::vector<double> precool_strategy(const ComfortBand& band, const TariffSchedule& tariff,
                                     double precool_hours, int n_steps) {
    if (precool_hours < 0.0) throw std::invalid_argument("precool_hours must be nonnegative");
    std::vector<double> controls = constant_strategy(band, n_steps);
    const int window = static_cast<int>(std::lround(precool_hours / tariff.dt_hours()));
    const int start = std::max(0, tariff.on_start() - window);
    for (int k = 0; k < n_steps; ++k) {
        const int in_day = k % tariff.steps_per_day();
        if (in_day >= start && in_day < tariff.on_start())
            controls[static_cast<std::size_t>(k)] = band.t_min;
    }
    return controls;
}

StrategyOutcome evaluate_strategy(const UserProblem& problem, std::vector<double> controls) {
    if (controls.size() != static_cast<std::size_t>(problem.tariff.n_steps()))
        throw std::invalid_argument("control sequence length does not match the horizon");
    StrategyOutcome out;
    out.trajectory = simulate(problem.building, problem.initial, controls, problem.exterior);
    out.bill = total_bill(problem.tariff, out.trajectory.powers_w);
    out.controls = std::move(controls);
    return out;
}

}  // namespace thermo
