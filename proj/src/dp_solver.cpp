#include "thermo/dp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace thermo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// successor coordinates this far outside the grid box are rounding, not clamps
constexpr double kClampSlack = 1e-9;

bool is_mirror_symmetric(const WallState& s) {
    const std::size_t m = s.size();
    for (std::size_t i = 0; i < m / 2; ++i)
        if (s.temps[i] != s.temps[m - 1 - i]) return false;
    return true;
}

std::vector<double> make_base_controls(const ComfortBand& band, const DpConfig& config) {
    std::vector<double> out;
    if (!config.control_values.empty()) {
        for (double u : config.control_values)
            if (band.contains(u)) out.push_back(u);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        if (out.empty()) throw std::invalid_argument("no control candidate lies inside the comfort band");
        return out;
    }
    if (!(config.du > 0.0)) throw std::invalid_argument("control step du must be positive");
    const double span = band.t_max - band.t_min;
    const auto count = static_cast<int>(std::ceil(span / config.du - 1e-9)) + 1;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(std::min(band.t_min + i * config.du, band.t_max));
    out.back() = band.t_max;
    return out;
}

StateGrid make_grid(const UserProblem& problem, const DpConfig& config) {
    const int m = problem.building.m();
    const bool mirrored = config.exploit_symmetry && m > 1 && is_mirror_symmetric(problem.initial);
    return StateGrid(m, mirrored, problem.band.t_min - config.grid_margin,
                     problem.band.t_max + config.grid_margin, config.grid_nodes);
}

}  // namespace

const char* to_string(GammaMode mode) {
    return mode == GammaMode::total_cost ? "total_cost" : "feasibility_bisection";
}

GammaMode parse_gamma_mode(const std::string& text) {
    if (text == "total_cost" || text == "total-cost") return GammaMode::total_cost;
    if (text == "feasibility_bisection" || text == "feasibility-bisection" || text == "bisection")
        return GammaMode::feasibility_bisection;
    throw std::invalid_argument("unknown gamma mode '" + text + "'");
}

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("THERMOSTAT_DP_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void UserProblem::validate() const {
    if (!(band.t_min < band.t_max)) throw std::invalid_argument("comfort band needs T_min < T_max");
    if (initial.size() != static_cast<std::size_t>(building.m()))
        throw std::invalid_argument("initial wall state size does not match M");
    for (double t : initial.temps)
        if (!std::isfinite(t)) throw std::invalid_argument("initial wall state is not finite");
    if (exterior.size() < static_cast<std::size_t>(tariff.n_steps()))
        throw std::invalid_argument("exterior trace shorter than the horizon");
    if (std::abs(tariff.dt_hours() - building.dt_hours()) > 1e-12)
        throw std::invalid_argument("tariff and building time steps differ");
    if (!tariff.has_on_peak_step()) throw std::invalid_argument("horizon has no on-peak step");
}

// ---------------------------------------------------------------------------
// StateGrid

StateGrid::StateGrid(int state_dim, bool mirrored, double lo, double hi, int nodes_per_dim)
    : state_dim_(state_dim),
      dims_(mirrored ? (state_dim + 1) / 2 : state_dim),
      mirrored_(mirrored),
      n_(nodes_per_dim),
      size_(1),
      lo_(lo),
      hi_(hi),
      h_(0.0) {
    if (state_dim < 1) throw std::invalid_argument("state dimension must be positive");
    if (nodes_per_dim < 2) throw std::invalid_argument("grid needs at least two nodes per dimension");
    if (!(lo < hi)) throw std::invalid_argument("grid bounds must be increasing");
    h_ = (hi - lo) / (n_ - 1);
    for (int d = 0; d < dims_; ++d) size_ *= static_cast<std::size_t>(n_);
}

void StateGrid::node_state(std::size_t flat, std::span<double> full) const {
    // first free coordinate varies slowest
    double free_coords[64];
    for (int d = dims_ - 1; d >= 0; --d) {
        free_coords[d] = node(static_cast<int>(flat % static_cast<std::size_t>(n_)));
        flat /= static_cast<std::size_t>(n_);
    }
    for (int i = 0; i < state_dim_; ++i)
        full[static_cast<std::size_t>(i)] =
            mirrored_ ? free_coords[std::min(i, state_dim_ - 1 - i)] : free_coords[i];
}

double StateGrid::interpolate(std::span<const double> values, std::span<const double> full,
                              std::size_t& clamps) const {
    int base[64];
    double weight[64];
    bool clamped = false;
    for (int d = 0; d < dims_; ++d) {
        double x = full[static_cast<std::size_t>(d)];
        if (x < lo_ || x > hi_) {
            if (x < lo_ - kClampSlack || x > hi_ + kClampSlack) clamped = true;
            x = std::clamp(x, lo_, hi_);
        }
        const double t = (x - lo_) / h_;
        int i = static_cast<int>(std::floor(t));
        i = std::clamp(i, 0, n_ - 2);
        base[d] = i;
        weight[d] = t - i;
    }
    if (clamped) ++clamps;

    double acc = 0.0;
    const unsigned corners = 1u << dims_;
    for (unsigned c = 0; c < corners; ++c) {
        double w = 1.0;
        std::size_t flat = 0;
        for (int d = 0; d < dims_; ++d) {
            const bool upper = (c >> (dims_ - 1 - d)) & 1u;
            w *= upper ? weight[d] : 1.0 - weight[d];
            flat = flat * static_cast<std::size_t>(n_) +
                   static_cast<std::size_t>(base[d] + (upper ? 1 : 0));
        }
        if (w == 0.0) continue;
        const double v = values[flat];
        if (std::isinf(v)) return kInf;
        acc += w * v;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// DpSolver

DpSolver::DpSolver(UserProblem problem, DpConfig config)
    : problem_(std::move(problem)),
      config_(std::move(config)),
      grid_(make_grid(problem_, config_)),
      base_controls_(make_base_controls(problem_.band, config_)),
      threads_(resolve_thread_count(config_.threads)) {
    problem_.validate();
    if (grid_.lo() > problem_.band.t_min || grid_.hi() < problem_.band.t_max)
        throw std::invalid_argument("state grid must contain the comfort band");
    if (grid_.dims() > 16) throw std::invalid_argument("state grid has too many dimensions");
    for (double t : problem_.initial.temps)
        if (t < grid_.lo() || t > grid_.hi())
            throw std::invalid_argument("initial wall state lies outside the state grid");
}

void DpSolver::fill_admissible(std::size_t k, double t1, double gamma_w,
                               std::vector<double>& out) const {
    out.clear();
    const TariffSchedule& tariff = problem_.tariff;
    if (!tariff.on_peak(k) || std::isinf(gamma_w)) {
        out.insert(out.end(), base_controls_.begin(), base_controls_.end());
        return;
    }
    const BuildingParams& b = problem_.building;
    for (double u : base_controls_)
        if (within_cap(power(b, k, u, t1, problem_.exterior), gamma_w)) out.push_back(u);
    if (!config_.boundary_control) return;

    // g is affine and decreasing in u, so g(u) = gamma has a closed-form root
    const double te = problem_.exterior.at(k);
    const double u_star =
        (b.power_coeff_te() * te + b.power_coeff_t1() * t1 - gamma_w) / -b.power_coeff_u();
    if (!problem_.band.contains(u_star)) return;
    if (!within_cap(power(b, k, u_star, t1, problem_.exterior), gamma_w)) return;
    const auto pos = std::lower_bound(out.begin(), out.end(), u_star);
    if (pos != out.end() && std::abs(*pos - u_star) <= 1e-12) return;
    if (pos != out.begin() && std::abs(*(pos - 1) - u_star) <= 1e-12) return;
    out.insert(pos, u_star);
}

std::vector<double> DpSolver::admissible_controls(std::size_t k, double t1, double gamma_w) const {
    std::vector<double> out;
    fill_admissible(k, t1, gamma_w, out);
    return out;
}

double DpSolver::stage_cost(std::size_t k, double u, double t1) const {
    const TariffSchedule& tariff = problem_.tariff;
    return tariff.price_at(k) * power(problem_.building, k, u, t1, problem_.exterior) *
           tariff.dt_hours() / 1000.0;
}

ValueGrid DpSolver::terminal_layer(double gamma_w) const {
    const double rate = problem_.tariff.demand_rate_per_w();
    const double v = rate == 0.0 ? 0.0 : rate * gamma_w;
    return ValueGrid{problem_.tariff.n_steps(), std::vector<double>(grid_.size(), v)};
}

double DpSolver::minimize_at(std::size_t k, std::span<const double> state, double gamma_w,
                             const ValueGrid& next, Scratch& scratch, double& best_value,
                             std::size_t& clamps) const {
    fill_admissible(k, state[0], gamma_w, scratch.candidates);
    best_value = kInf;
    double best_u = kNaN;
    for (double u : scratch.candidates) {
        step_into(problem_.building, state, u, scratch.next_state);
        const double tail = grid_.interpolate(next.values, scratch.next_state, clamps);
        if (std::isinf(tail)) continue;
        const double total = stage_cost(k, u, state[0]) + tail;
        if (total < best_value) {  // ascending candidates: ties keep the smallest u
            best_value = total;
            best_u = u;
        }
    }
    return best_u;
}

BackupResult DpSolver::bellman_backup(const ValueGrid& next, double gamma_w, Kernel kernel) const {
    if (next.step < 1 || next.step > problem_.tariff.n_steps())
        throw std::out_of_range("backup from an invalid layer index");
    if (next.values.size() != grid_.size())
        throw std::invalid_argument("value layer does not match the state grid");

    const auto k = static_cast<std::size_t>(next.step - 1);
    const auto m = static_cast<std::size_t>(grid_.state_dim());
    const std::size_t n_nodes = grid_.size();
    BackupResult out;
    out.layer.step = next.step - 1;
    out.layer.values.assign(n_nodes, kInf);
    out.argmin.assign(n_nodes, kNaN);

    if (kernel == Kernel::serial) {
        Scratch scratch{{}, std::vector<double>(m), std::vector<double>(m)};
        std::size_t clamps = 0;
        for (std::size_t node = 0; node < n_nodes; ++node) {
            grid_.node_state(node, scratch.state);
            double value = kInf;
            out.argmin[node] = minimize_at(k, scratch.state, gamma_w, next, scratch, value, clamps);
            out.layer.values[node] = value;
        }
        out.clamps = clamps;
        return out;
    }

    std::size_t clamps = 0;
    const auto n = static_cast<long long>(n_nodes);
#pragma omp parallel num_threads(threads_) reduction(+ : clamps)
    {
        Scratch scratch{{}, std::vector<double>(m), std::vector<double>(m)};
#pragma omp for schedule(static)
        for (long long i = 0; i < n; ++i) {
            const auto node = static_cast<std::size_t>(i);
            grid_.node_state(node, scratch.state);
            double value = kInf;
            out.argmin[node] = minimize_at(k, scratch.state, gamma_w, next, scratch, value, clamps);
            out.layer.values[node] = value;
        }
    }
    out.clamps = clamps;
    return out;
}

FixedGammaSolution DpSolver::solve_fixed_gamma(double gamma_w, Kernel kernel) const {
    const auto n_f = static_cast<std::size_t>(problem_.tariff.n_steps());
    FixedGammaSolution sol;
    sol.policy.gamma_w = gamma_w;
    sol.policy.layers.resize(n_f + 1);
    sol.policy.controls.resize(n_f);
    sol.policy.layers[n_f] = terminal_layer(gamma_w);
    for (std::size_t j = n_f; j >= 1; --j) {
        BackupResult r = bellman_backup(sol.policy.layers[j], gamma_w, kernel);
        sol.clamps += r.clamps;
        sol.policy.layers[j - 1] = std::move(r.layer);
        sol.policy.controls[j - 1] = std::move(r.argmin);
    }
    sol.value = grid_.interpolate(sol.policy.layers[0].values, problem_.initial.temps, sol.clamps);
    sol.feasible = std::isfinite(sol.value);
    return sol;
}

RolloutResult DpSolver::rollout(const Policy& policy) const {
    const auto n_f = static_cast<std::size_t>(problem_.tariff.n_steps());
    if (policy.layers.size() != n_f + 1) throw std::invalid_argument("policy does not cover the horizon");
    const auto m = static_cast<std::size_t>(grid_.state_dim());

    RolloutResult out;
    out.gamma_w = policy.gamma_w;
    out.controls.reserve(n_f);
    Scratch scratch{{}, problem_.initial.temps, std::vector<double>(m)};
    for (std::size_t k = 0; k < n_f; ++k) {
        double value = kInf;
        const double u = minimize_at(k, scratch.state, policy.gamma_w, policy.layers[k + 1], scratch,
                                     value, out.clamps);
        if (std::isnan(u))
            throw InfeasibleError("rollout found no admissible control at step " + std::to_string(k) +
                                  "; the state grid is too coarse for this cap");
        out.controls.push_back(u);
        step_into(problem_.building, scratch.state, u, scratch.next_state);
        scratch.state.swap(scratch.next_state);
    }

    out.trajectory = simulate(problem_.building, problem_.initial, out.controls, problem_.exterior);
    const double cap = policy.gamma_w * (1.0 + 1e-9) + 1e-6;
    for (std::size_t k = 0; k < n_f; ++k) {
        if (problem_.tariff.on_peak(k) && out.trajectory.powers_w[k] > cap)
            throw InfeasibleError("rollout violates the on-peak cap at step " + std::to_string(k));
    }
    out.bill = total_bill(problem_.tariff, out.trajectory.powers_w);
    return out;
}

GammaSearchResult DpSolver::gamma_bisection(const GammaSearchConfig& config) const {
    if (!(config.gamma_lo < config.gamma_hi)) throw std::invalid_argument("gamma bracket must satisfy lo < hi");
    if (config.b_max < 1) throw std::invalid_argument("b_max must be at least 1");

    GammaSearchResult res;
    res.mode = GammaMode::feasibility_bisection;
    FixedGammaSolution hi_sol = solve_fixed_gamma(config.gamma_hi);
    res.solves = 1;
    if (!hi_sol.feasible)
        throw InfeasibleError("problem is infeasible at the upper cap " + std::to_string(config.gamma_hi) + " W");

    FixedGammaSolution lo_sol = solve_fixed_gamma(config.gamma_lo);
    ++res.solves;
    if (lo_sol.feasible) {
        res.feasible_at_lo = true;
        res.gamma_w = config.gamma_lo;
        res.bracket_lo = res.bracket_hi = config.gamma_lo;
        res.value = lo_sol.value;
        res.solution = std::move(lo_sol);
        return res;
    }

    double lo = config.gamma_lo;
    double hi = config.gamma_hi;
    FixedGammaSolution best = std::move(hi_sol);
    for (int it = 0; it < config.b_max; ++it) {
        const double mid = 0.5 * (lo + hi);
        FixedGammaSolution s = solve_fixed_gamma(mid);
        ++res.solves;
        if (s.feasible) {
            hi = mid;
            best = std::move(s);
        } else {
            lo = mid;
        }
    }
    res.gamma_w = hi;
    res.bracket_lo = lo;
    res.bracket_hi = hi;
    res.value = best.value;
    res.solution = std::move(best);
    return res;
}

GammaSearchResult DpSolver::gamma_total_search(const GammaSearchConfig& config,
                                               std::optional<double> known_gamma_min) const {
    if (config.scan_points < 2) throw std::invalid_argument("gamma scan needs at least two points");
    GammaSearchResult res;
    res.mode = GammaMode::total_cost;

    double gamma_min = 0.0;
    if (known_gamma_min) {
        gamma_min = *known_gamma_min;
    } else {
        const GammaSearchResult bis = gamma_bisection(config);
        res.solves += bis.solves;
        gamma_min = bis.gamma_w;
        res.feasible_at_lo = bis.feasible_at_lo;
    }

    bool have_best = false;
    auto consider = [&](double gamma) {
        FixedGammaSolution s = solve_fixed_gamma(gamma);
        ++res.solves;
        const double v = s.value;
        if (s.feasible && (!have_best || v < res.value)) {
            have_best = true;
            res.value = v;
            res.gamma_w = gamma;
            res.solution = std::move(s);
        }
        return v;
    };

    const int n_scan = config.scan_points;
    const double span = config.gamma_hi - gamma_min;
    std::vector<double> xs(static_cast<std::size_t>(n_scan));
    std::vector<double> hs(static_cast<std::size_t>(n_scan));
    for (int i = 0; i < n_scan; ++i) {
        xs[static_cast<std::size_t>(i)] = i + 1 == n_scan ? config.gamma_hi : gamma_min + span * i / (n_scan - 1);
        hs[static_cast<std::size_t>(i)] = consider(xs[static_cast<std::size_t>(i)]);
    }
    if (!have_best) throw InfeasibleError("no feasible cap found in the gamma scan");

    const auto best_it = std::min_element(hs.begin(), hs.end());
    const auto ib = static_cast<std::size_t>(best_it - hs.begin());
    double a = xs[ib == 0 ? 0 : ib - 1];
    double b = xs[std::min(ib + 1, xs.size() - 1)];
    const double tol = (config.gamma_hi - config.gamma_lo) * std::ldexp(1.0, -config.b_max);

    // golden-section refinement inside the best scan cell pair
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double hc = consider(c);
    double hd = consider(d);
    while (b - a > tol) {
        if (hc <= hd) {
            b = d;
            d = c;
            hd = hc;
            c = b - inv_phi * (b - a);
            hc = consider(c);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + inv_phi * (b - a);
            hd = consider(d);
        }
    }
    res.bracket_lo = a;
    res.bracket_hi = b;
    return res;
}

GammaSearchResult DpSolver::solve(const GammaSearchConfig& config,
                                  std::optional<double> known_gamma_min) const {
    if (config.mode == GammaMode::feasibility_bisection) return gamma_bisection(config);
    return gamma_total_search(config, known_gamma_min);
}

}  // namespace thermo
