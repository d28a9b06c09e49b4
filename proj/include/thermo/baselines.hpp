// Reference thermostat schedules: hold T_max, or precool to T_min just
// before the on-peak window.

#ifndef THERMO_BASELINES_HPP
#define THERMO_BASELINES_HPP

#include <vector>

#include "thermo/dp_solver.hpp"
#include "thermo/tariff.hpp"

namespace thermo {

std::vector<double> constant_strategy(const ComfortBand& band, int n_steps);

/// T_min for the `precool_hours` preceding each day's on-peak start (truncated
/// at midnight), T_max everywhere else.
std::vector<double> precool_strategy(const ComfortBand& band, const TariffSchedule& tariff,
                                     double precool_hours, int n_steps);

struct StrategyOutcome {
    std::vector<double> controls;
    Trajectory trajectory;
    BillBreakdown bill;
};

/// Simulates a fixed control sequence on `problem` and prices it.
StrategyOutcome evaluate_strategy(const UserProblem& problem, std::vector<double> controls);

}  // namespace thermo

#endif  // THERMO_BASELINES_HPP
