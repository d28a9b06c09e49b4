// Utility-level pricing: find on-peak, off-peak and demand prices that
// minimize the utility's production cost a * energy + b * peak when the user
// responds optimally, then rescale them so the user's bill equals that cost.
//
// The search runs on the unit simplex p_on + p_off + p_d = 1; the user's
// optimal response is invariant to a common scaling of the prices, so only
// the final point is scaled back to revenue-neutral dollars.

#ifndef THERMO_PRICE_OPTIMIZER_HPP
#define THERMO_PRICE_OPTIMIZER_HPP

#include <vector>

#include "thermo/dp_solver.hpp"
#include "thermo/tariff.hpp"

namespace thermo {

struct PricePoint {
    double p_on = 0.0;
    double p_off = 0.0;
    double p_d = 0.0;
    bool normalized = false;

    /// Point on the unit simplex with p_off = 1 - p_d - p_on.
    static PricePoint on_simplex(double p_on, double p_d);
    /// Divides a dollar price vector by its component sum.
    static PricePoint normalize(const Prices& prices);

    Prices prices() const { return {p_on, p_off, p_d}; }
};

struct PriceEvaluation {
    PricePoint prices;
    double production_cost = 0.0;
    BillBreakdown bill;  // at `prices`
    double gamma_w = 0.0;
    std::vector<double> controls;
    Trajectory trajectory;
};

struct PricingConfig {
    double step_d = 0.01;
    double step_on = 0.01;
    double epsilon = 1e-4;  // $ of production cost
    bool diagonal_only = false;
    bool shrink_on_fail = false;
    double min_step = 1e-6;
    int max_iterations = 500;
};

struct PricingResult {
    PricePoint optimal_prices;     // revenue-neutral dollars
    PricePoint normalized_prices;  // best point on the simplex
    double production_cost = 0.0;
    double demand_peak_kw = 0.0;
    double user_bill = 0.0;  // recomputed at optimal_prices with the fixed response
    BillBreakdown bill;
    int iterations = 0;   // accepted moves
    int evaluations = 0;  // user-problem solves
    std::vector<double> cost_history;  // accepted production costs, in order
    GammaMode mode = GammaMode::total_cost;
    PriceEvaluation response;  // at normalized_prices
};

/// Scales all prices by production_cost / bill_total.
PricePoint revenue_scale(const PricePoint& prices, double production_cost, double bill_total);

class PriceOptimizer {
public:
    /// `base.tariff` supplies the time structure; its prices are ignored.
    PriceOptimizer(UserProblem base, DpConfig dp, GammaSearchConfig gamma, MarginalCosts costs);

    /// Smallest feasible cap; it does not depend on prices so it is found once.
    double gamma_min() const { return gamma_min_; }

    PriceEvaluation evaluate_prices(const PricePoint& prices) const;
    PricingResult pattern_search(const PricePoint& init, const PricingConfig& config) const;

private:
    UserProblem base_;
    DpConfig dp_;
    GammaSearchConfig gamma_;
    MarginalCosts costs_;
    double gamma_min_ = 0.0;
};

}  // namespace thermo

#endif  // THERMO_PRICE_OPTIMIZER_HPP
