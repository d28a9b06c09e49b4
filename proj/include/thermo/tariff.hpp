// Time-of-use tariffs with demand charges and the monetary functionals built
// on them: energy cost, demand cost, total bill and utility production cost.
//
// Powers enter in watts. Energy is W * dt_hours / 1000 (kWh) and peaks are
// reported in kW. Money is in dollars, unrounded.

#ifndef THERMO_TARIFF_HPP
#define THERMO_TARIFF_HPP

#include <cstddef>
#include <span>

#include "thermo/thermal_core.hpp"

namespace thermo {

struct Prices {
    double p_on = 0.0;   // $/kWh
    double p_off = 0.0;  // $/kWh
    double p_d = 0.0;    // $/kW per month

    Prices scaled(double factor) const { return {p_on * factor, p_off * factor, p_d * factor}; }
};

/// How the monthly demand price accrues over a multi-day horizon.
enum class DemandTerm {
    per_day,  // (p_d / 30) * peak * days
    single,   // (p_d / 30) * peak, once per horizon
};

class TariffSchedule {
public:
    /// steps_per_day steps make one day; step k is on-peak iff
    /// on_start <= k mod steps_per_day < on_end.
    TariffSchedule(Prices prices, int steps_per_day, int on_start, int on_end, int n_steps,
                   double dt_hours, DemandTerm demand_term = DemandTerm::per_day);

    /// Hour-based constructor; 24 / dt_hours and the window edges must fall on steps.
    static TariffSchedule from_hours(Prices prices, double on_start_hour, double on_end_hour,
                                     int days, double dt_hours,
                                     DemandTerm demand_term = DemandTerm::per_day);

    const Prices& prices() const { return prices_; }
    double p_on() const { return prices_.p_on; }
    double p_off() const { return prices_.p_off; }
    double p_d() const { return prices_.p_d; }
    int steps_per_day() const { return steps_per_day_; }
    int on_start() const { return on_start_; }
    int on_end() const { return on_end_; }
    int n_steps() const { return n_steps_; }
    double dt_hours() const { return dt_hours_; }
    DemandTerm demand_term() const { return demand_term_; }
    int days() const { return (n_steps_ + steps_per_day_ - 1) / steps_per_day_; }

    bool on_peak(std::size_t k) const {
        const int in_day = static_cast<int>(k % static_cast<std::size_t>(steps_per_day_));
        return in_day >= on_start_ && in_day < on_end_;
    }
    double price_at(std::size_t k) const { return on_peak(k) ? prices_.p_on : prices_.p_off; }

    /// $ per W of on-peak peak (or per W of the cap gamma): (p_d / 30) / 1000 * multiplier.
    double demand_rate_per_w() const;
    bool has_on_peak_step() const;

    TariffSchedule with_prices(Prices prices) const;

private:
    Prices prices_;
    int steps_per_day_;
    int on_start_;
    int on_end_;
    int n_steps_;
    double dt_hours_;
    DemandTerm demand_term_;
};

struct MarginalCosts {
    double a = 0.0;  // $/kWh
    double b = 0.0;  // $/kW
};

struct BillBreakdown {
    double energy_cost = 0.0;
    double demand_cost = 0.0;
    double total = 0.0;
    double peak_kw = 0.0;
};

struct DemandCharge {
    double cost = 0.0;
    double peak_kw = 0.0;
};

double energy_cost(const TariffSchedule& tariff, std::span<const double> powers_w);
DemandCharge demand_cost(const TariffSchedule& tariff, std::span<const double> powers_w);
BillBreakdown total_bill(const TariffSchedule& tariff, std::span<const double> powers_w);

/// a * (energy in kWh) + b * (on-peak peak in kW).
double production_cost(const MarginalCosts& costs, const TariffSchedule& tariff,
                       std::span<const double> powers_w);

/// Whether an on-peak power respects the cap gamma. Shared by the DP and the
/// brute-force oracle so both admit exactly the same controls.
inline bool within_cap(double power_w, double gamma_w) {
    return power_w <= gamma_w + 1e-9 * (gamma_w > 1.0 ? gamma_w : 1.0);
}

/// Cost-to-go of a control tail by its regime-wise sum, plus the terminal
/// demand term on gamma.
///
/// `controls` holds u_j..u_{N_f-1}; `wall_t1` holds T1 at steps j..N_f (the
/// trailing entry is unused by the stage costs). At j = N_f both are allowed
/// to be empty (wall_t1 may hold the single terminal entry).
double oracle_cost_to_go(std::size_t j, std::span<const double> controls,
                         std::span<const double> wall_t1, const BuildingParams& params,
                         const ExteriorTrace& trace, const TariffSchedule& tariff,
                         double gamma_w);

}  // namespace thermo

#endif  // THERMO_TARIFF_HPP
