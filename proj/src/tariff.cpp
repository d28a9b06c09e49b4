#include "thermo/tariff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace thermo {

namespace {

int to_steps(double hours, double dt_hours, const char* what) {
    const double steps = hours / dt_hours;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9)
        throw std::invalid_argument(std::string(what) + " is not a whole number of time steps");
    return static_cast<int>(rounded);
}

void check_length(const TariffSchedule& tariff, std::span<const double> powers_w) {
    if (powers_w.size() != static_cast<std::size_t>(tariff.n_steps()))
        throw std::invalid_argument("power profile has " + std::to_string(powers_w.size()) +
                                    " samples, tariff horizon is " +
                                    std::to_string(tariff.n_steps()));
}

double on_peak_max_w(const TariffSchedule& tariff, std::span<const double> powers_w) {
    double peak = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t k = 0; k < powers_w.size(); ++k) {
        if (!tariff.on_peak(k)) continue;
        peak = std::max(peak, powers_w[k]);
        any = true;
    }
    if (!any) throw std::invalid_argument("horizon contains no on-peak step");
    return peak;
}

}  // namespace

TariffSchedule::TariffSchedule(Prices prices, int steps_per_day, int on_start, int on_end,
                               int n_steps, double dt_hours, DemandTerm demand_term)
    : prices_(prices),
      steps_per_day_(steps_per_day),
      on_start_(on_start),
      on_end_(on_end),
      n_steps_(n_steps),
      dt_hours_(dt_hours),
      demand_term_(demand_term) {
    if (steps_per_day < 1) throw std::invalid_argument("steps per day must be positive");
    if (!(0 <= on_start && on_start < on_end && on_end <= steps_per_day))
        throw std::invalid_argument("on-peak window must satisfy 0 <= N_on < N_off <= steps per day");
    if (n_steps < 1) throw std::invalid_argument("horizon must contain at least one step");
    if (!(dt_hours > 0.0)) throw std::invalid_argument("dt_hours must be positive");
    if (prices.p_on < 0.0 || prices.p_off < 0.0 || prices.p_d < 0.0)
        throw std::invalid_argument("prices must be nonnegative");
}

TariffSchedule TariffSchedule::from_hours(Prices prices, double on_start_hour,
                                          double on_end_hour, int days, double dt_hours,
                                          DemandTerm demand_term) {
    if (!(dt_hours > 0.0)) throw std::invalid_argument("dt_hours must be positive");
    if (days < 1) throw std::invalid_argument("horizon must span at least one day");
    const int per_day = to_steps(24.0, dt_hours, "a day");
    return TariffSchedule(prices, per_day, to_steps(on_start_hour, dt_hours, "on-peak start"),
                          to_steps(on_end_hour, dt_hours, "on-peak end"), per_day * days,
                          dt_hours, demand_term);
}

double TariffSchedule::demand_rate_per_w() const {
    const double multiplier = demand_term_ == DemandTerm::per_day ? days() : 1.0;
    return prices_.p_d / 30.0 / 1000.0 * multiplier;
}

bool TariffSchedule::has_on_peak_step() const {
    for (int k = 0; k < std::min(n_steps_, steps_per_day_); ++k)
        if (on_peak(static_cast<std::size_t>(k))) return true;
    return false;
}

TariffSchedule TariffSchedule::with_prices(Prices prices) const {
    return TariffSchedule(prices, steps_per_day_, on_start_, on_end_, n_steps_, dt_hours_,
                          demand_term_);
}

double energy_cost(const TariffSchedule& tariff, std::span<const double> powers_w) {
    check_length(tariff, powers_w);
    double on = 0.0;
    double off = 0.0;
    for (std::size_t k = 0; k < powers_w.size(); ++k)
        (tariff.on_peak(k) ? on : off) += powers_w[k];
    const double kwh_per_w = tariff.dt_hours() / 1000.0;
    return (tariff.p_off() * off + tariff.p_on() * on) * kwh_per_w;
}

DemandCharge demand_cost(const TariffSchedule& tariff, std::span<const double> powers_w) {
    check_length(tariff, powers_w);
    const double peak_w = on_peak_max_w(tariff, powers_w);
    return {tariff.demand_rate_per_w() * peak_w, peak_w / 1000.0};
}

BillBreakdown total_bill(const TariffSchedule& tariff, std::span<const double> powers_w) {
    BillBreakdown bill;
    bill.energy_cost = energy_cost(tariff, powers_w);
    const DemandCharge demand = demand_cost(tariff, powers_w);
    bill.demand_cost = demand.cost;
    bill.peak_kw = demand.peak_kw;
    bill.total = bill.energy_cost + bill.demand_cost;
    return bill;
}

double production_cost(const MarginalCosts& costs, const TariffSchedule& tariff,
                       std::span<const double> powers_w) {
    check_length(tariff, powers_w);
    double energy_w = 0.0;
    for (double g : powers_w) energy_w += g;
    const double energy_kwh = energy_w * tariff.dt_hours() / 1000.0;
    return costs.a * energy_kwh + costs.b * on_peak_max_w(tariff, powers_w) / 1000.0;
}

double oracle_cost_to_go(std::size_t j, std::span<const double> controls,
                         std::span<const double> wall_t1, const BuildingParams& params,
                         const ExteriorTrace& trace, const TariffSchedule& tariff,
                         double gamma_w) {
    const auto n_f = static_cast<std::size_t>(tariff.n_steps());
    if (j > n_f) throw std::out_of_range("cost-to-go index beyond horizon");
    const std::size_t tail = n_f - j;
    if (controls.size() != tail)
        throw std::invalid_argument("control tail length does not match N_f - j");
    if (wall_t1.size() < tail)
        throw std::invalid_argument("wall trace shorter than control tail");

    const double rate = tariff.demand_rate_per_w();
    const double terminal = rate == 0.0 ? 0.0 : rate * gamma_w;
    if (j == n_f) return terminal;

    // on-peak and off-peak sums over the remaining steps k >= j
    double on = 0.0;
    double off = 0.0;
    for (std::size_t i = 0; i < tail; ++i) {
        const std::size_t k = j + i;
        const double g = power(params, k, controls[i], wall_t1[i], trace);
        (tariff.on_peak(k) ? on : off) += g;
    }
    return (tariff.p_off() * off + tariff.p_on() * on) * tariff.dt_hours() / 1000.0 + terminal;
}

}  // namespace thermo
