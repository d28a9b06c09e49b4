#include "thermo/price_optimizer.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <utility>

namespace thermo {

namespace {

// simplex rounding slack; anything more negative is a rejected candidate
constexpr double kSimplexSlack = 1e-12;

}  // namespace

PricePoint PricePoint::on_simplex(double p_on, double p_d) {
    PricePoint p;
    p.p_on = p_on;
    p.p_d = p_d;
    p.p_off = 1.0 - p_d - p_on;
    p.normalized = true;
    return p;
}

PricePoint PricePoint::normalize(const Prices& prices) {
    const double sum = prices.p_on + prices.p_off + prices.p_d;
    if (!(sum > 0.0)) throw std::invalid_argument("cannot normalize an all-zero price vector");
    return on_simplex(prices.p_on / sum, prices.p_d / sum);
}

PricePoint revenue_scale(const PricePoint& prices, double production_cost, double bill_total) {
    if (!(bill_total > 0.0)) throw std::invalid_argument("revenue scaling needs a positive bill");
    const double f = production_cost / bill_total;
    PricePoint out{prices.p_on * f, prices.p_off * f, prices.p_d * f, false};
    return out;
}

PriceOptimizer::PriceOptimizer(UserProblem base, DpConfig dp, GammaSearchConfig gamma,
                               MarginalCosts costs)
    : base_(std::move(base)), dp_(std::move(dp)), gamma_(gamma), costs_(costs) {
    if (costs_.a < 0.0 || costs_.b < 0.0) throw std::invalid_argument("marginal costs must be nonnegative");
    const DpSolver solver(base_, dp_);
    gamma_min_ = solver.gamma_bisection(gamma_).gamma_w;
}

PriceEvaluation PriceOptimizer::evaluate_prices(const PricePoint& prices) const {
    if (prices.p_on < 0.0 || prices.p_off < 0.0 || prices.p_d < 0.0)
        throw std::invalid_argument("prices must be nonnegative");
    UserProblem problem = base_;
    problem.tariff = base_.tariff.with_prices(prices.prices());
    const DpSolver solver(problem, dp_);

    FixedGammaSolution solution;
    if (gamma_.mode == GammaMode::feasibility_bisection) {
        solution = solver.solve_fixed_gamma(gamma_min_);
    } else {
        solution = solver.gamma_total_search(gamma_, gamma_min_).solution;
    }
    if (!solution.feasible) throw InfeasibleError("user problem is infeasible at these prices");

    RolloutResult response = solver.rollout(solution.policy);
    PriceEvaluation out;
    out.prices = prices;
    out.gamma_w = solution.policy.gamma_w;
    out.production_cost = production_cost(costs_, problem.tariff, response.trajectory.powers_w);
    out.bill = response.bill;
    out.controls = std::move(response.controls);
    out.trajectory = std::move(response.trajectory);
    return out;
}

PricingResult PriceOptimizer::pattern_search(const PricePoint& init, const PricingConfig& config) const {
    if (!init.normalized) throw std::invalid_argument("pattern search starts from a normalized price point");
    if (init.p_on < 0.0 || init.p_d < 0.0 || !(init.p_on + init.p_d < 1.0))
        throw std::invalid_argument("initial prices need p_on, p_d >= 0 and p_on + p_d < 1");
    if (!(config.step_d > 0.0) || !(config.step_on > 0.0))
        throw std::invalid_argument("price steps must be positive");

    PricingResult result;
    result.mode = gamma_.mode;
    PriceEvaluation current = evaluate_prices(init);
    result.evaluations = 1;
    result.cost_history.push_back(current.production_cost);

    double step_d = config.step_d;
    double step_on = config.step_on;
    while (result.iterations < config.max_iterations) {
        std::array<std::pair<double, double>, 8> moves{{
            {-step_d, -step_on}, {-step_d, step_on}, {step_d, -step_on}, {step_d, step_on},
            {-step_d, 0.0}, {step_d, 0.0}, {0.0, -step_on}, {0.0, step_on},
        }};
        const std::size_t n_moves = config.diagonal_only ? 4 : 8;

        bool have_best = false;
        PriceEvaluation best;
        for (std::size_t i = 0; i < n_moves; ++i) {
            const auto [sd, son] = moves[i];
            PricePoint cand = PricePoint::on_simplex(current.prices.p_on + son, current.prices.p_d + sd);
            if (cand.p_on < -kSimplexSlack || cand.p_d < -kSimplexSlack || cand.p_off < -kSimplexSlack)
                continue;
            cand.p_on = std::max(cand.p_on, 0.0);
            cand.p_d = std::max(cand.p_d, 0.0);
            cand.p_off = std::max(cand.p_off, 0.0);
            PriceEvaluation eval;
            try {
                eval = evaluate_prices(cand);
            } catch (const InfeasibleError&) {
                continue;
            }
            ++result.evaluations;
            if (!have_best || eval.production_cost < best.production_cost) {
                best = std::move(eval);
                have_best = true;
            }
        }

        if (have_best && current.production_cost - best.production_cost > config.epsilon) {
            current = std::move(best);
            result.cost_history.push_back(current.production_cost);
            ++result.iterations;
            continue;
        }
        if (config.shrink_on_fail && (step_d > config.min_step || step_on > config.min_step)) {
            step_d *= 0.5;
            step_on *= 0.5;
            continue;
        }
        break;
    }

    result.normalized_prices = current.prices;
    result.production_cost = current.production_cost;
    result.optimal_prices = revenue_scale(current.prices, current.production_cost, current.bill.total);
    const TariffSchedule scaled = base_.tariff.with_prices(result.optimal_prices.prices());
    result.bill = total_bill(scaled, current.trajectory.powers_w);
    result.user_bill = result.bill.total;
    result.demand_peak_kw = result.bill.peak_kw;
    result.response = std::move(current);
    return result;
}

}  // namespace thermo
