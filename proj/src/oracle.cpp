#include "thermo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace thermo {

TinyInstance TinyInstance::with_uniform_candidates(UserProblem problem, double gamma_w,
                                                   std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const auto n_f = static_cast<std::size_t>(problem.tariff.n_steps());
    TinyInstance inst{std::move(problem), gamma_w, {}};
    inst.candidates.assign(n_f, values);
    return inst;
}

std::size_t TinyInstance::sequence_count() const {
    std::size_t n = 1;
    for (const auto& c : candidates) n *= c.size();
    return n;
}

void TinyInstance::validate() const {
    problem.validate();
    if (problem.building.m() > 2) throw std::invalid_argument("tiny instances have M <= 2");
    if (problem.tariff.n_steps() > 6) throw std::invalid_argument("tiny instances have N_f <= 6");
    if (candidates.size() != static_cast<std::size_t>(problem.tariff.n_steps()))
        throw std::invalid_argument("need one candidate set per step");
    for (const auto& c : candidates) {
        if (c.empty() || c.size() > 5) throw std::invalid_argument("each step needs 1 to 5 candidates");
        if (!std::is_sorted(c.begin(), c.end())) throw std::invalid_argument("candidates must be ascending");
    }
}

bool admissible_sequence(const TinyInstance& instance, const std::vector<double>& controls) {
    const UserProblem& p = instance.problem;
    for (double u : controls)
        if (!p.band.contains(u)) return false;
    WallState state = p.initial;
    for (std::size_t k = 0; k < controls.size(); ++k) {
        if (p.tariff.on_peak(k) &&
            !within_cap(power(p.building, k, controls[k], state.t1(), p.exterior), instance.gamma_w))
            return false;
        state = step(p.building, state, controls[k]);
    }
    return true;
}

OracleResult enumerate_optimum(const TinyInstance& instance) {
    instance.validate();
    const UserProblem& p = instance.problem;
    const std::size_t n_f = instance.candidates.size();

    OracleResult best;
    best.value = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> digit(n_f, 0);
    std::vector<double> controls(n_f);
    std::vector<double> wall_t1(n_f + 1);

    // odometer over sequences in lexicographic order, last step fastest
    for (;;) {
        for (std::size_t k = 0; k < n_f; ++k) controls[k] = instance.candidates[k][digit[k]];
        if (admissible_sequence(instance, controls)) {
            ++best.feasible_sequences;
            const Trajectory traj = simulate(p.building, p.initial, controls, p.exterior);
            for (std::size_t k = 0; k <= n_f; ++k) wall_t1[k] = traj.states[k].t1();
            const double q0 = oracle_cost_to_go(0, controls, wall_t1, p.building, p.exterior, p.tariff,
                                                instance.gamma_w);
            if (q0 < best.value) {
                best.value = q0;
                best.controls = controls;
            }
        }
        bool wrapped = true;
        for (std::size_t k = n_f; k-- > 0;) {
            if (++digit[k] < instance.candidates[k].size()) {
                wrapped = false;
                break;
            }
            digit[k] = 0;
        }
        if (wrapped) break;
    }
    if (best.feasible_sequences == 0)
        throw InfeasibleError("no control sequence satisfies the band and the on-peak cap");
    return best;
}

TinyInstance random_grid_aligned_instance(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> steps(3, 6);

    // 2^-13 * 3600 / 0.9375^2 = 1/2 with every operand exactly representable
    const BuildingParams building =
        BuildingParams::make(std::ldexp(1.0, -13), 1.875, 0.001 + 0.002 * unit(rng), 20.0 + 40.0 * unit(rng), 1, 3600.0);

    const int n_f = steps(rng);
    const int on_start = std::uniform_int_distribution<int>(0, n_f - 1)(rng);
    const int on_end = std::uniform_int_distribution<int>(on_start + 1, n_f)(rng);
    const Prices prices{0.05 + 0.1 * unit(rng), 0.02 + 0.06 * unit(rng), 5.0 + 15.0 * unit(rng)};
    TariffSchedule tariff(prices, n_f, on_start, on_end, n_f, 1.0);

    ExteriorTrace exterior;
    for (int k = 0; k < n_f; ++k) exterior.temps.push_back(30.0 + 14.0 * unit(rng));

    std::vector<double> lattice{22, 23, 24, 25, 26, 27, 28};
    std::shuffle(lattice.begin(), lattice.end(), rng);
    const auto n_controls = static_cast<std::size_t>(std::uniform_int_distribution<int>(2, 4)(rng));
    std::vector<double> controls(lattice.begin(), lattice.begin() + static_cast<std::ptrdiff_t>(n_controls));

    const double t0 = std::uniform_int_distribution<int>(20, 30)(rng);
    UserProblem problem{building, tariff, exterior, ComfortBand{22.0, 28.0}, WallState::uniform(1, t0)};

    // cap between the smallest and largest on-peak power reachable on the lattice
    double g_lo = std::numeric_limits<double>::infinity();
    double g_hi = -g_lo;
    for (int k = on_start; k < on_end; ++k) {
        for (double u : controls) {
            for (double t1 : controls) {
                const double g = power(building, static_cast<std::size_t>(k), u, t1, exterior);
                g_lo = std::min(g_lo, g);
                g_hi = std::max(g_hi, g);
            }
            const double g0 = power(building, static_cast<std::size_t>(k), u, t0, exterior);
            g_lo = std::min(g_lo, g0);
            g_hi = std::max(g_hi, g0);
        }
    }
    const double gamma = g_lo + (g_hi - g_lo) * (0.3 + 0.8 * unit(rng));
    return TinyInstance::with_uniform_candidates(std::move(problem), gamma, std::move(controls));
}

DpConfig grid_aligned_dp_config(const TinyInstance& instance) {
    DpConfig config;
    config.grid_nodes = 11;
    config.grid_margin = 2.0;
    config.control_values = instance.candidates.front();
    config.boundary_control = false;
    config.exploit_symmetry = false;
    return config;
}

EquivalenceCase check_equivalence(const TinyInstance& instance, const DpConfig& config) {
    EquivalenceCase c;
    const DpSolver solver(instance.problem, config);
    const FixedGammaSolution sol = solver.solve_fixed_gamma(instance.gamma_w);
    c.dp_value = sol.value;
    try {
        const OracleResult o = enumerate_optimum(instance);
        c.feasible = true;
        c.oracle_value = o.value;
        c.oracle_controls = o.controls;
    } catch (const InfeasibleError&) {
        c.feasible = false;
        c.oracle_value = std::numeric_limits<double>::infinity();
    }
    if (!c.feasible) {
        c.values_match = !sol.feasible;
        c.controls_match = c.values_match;
        return c;
    }
    if (!sol.feasible) return c;
    const double scale = std::max({1.0, std::abs(c.dp_value), std::abs(c.oracle_value)});
    c.values_match = std::abs(c.dp_value - c.oracle_value) <= 1e-9 * scale;
    c.dp_controls = solver.rollout(sol.policy).controls;
    c.controls_match = c.dp_controls == c.oracle_controls;
    return c;
}

std::vector<EquivalenceCase> verify_dp_against_oracle(int feasible_cases, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<EquivalenceCase> out;
    int feasible = 0;
    while (feasible < feasible_cases) {
        const TinyInstance inst = random_grid_aligned_instance(rng);
        EquivalenceCase c = check_equivalence(inst, grid_aligned_dp_config(inst));
        if (c.feasible) ++feasible;
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace thermo
