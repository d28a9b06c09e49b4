// Backward dynamic programming for the user-level thermostat problem.
//
// For a fixed on-peak power cap gamma the value function V_j is tabulated on
// a Cartesian grid of wall states and evaluated off-grid by multilinear
// interpolation:
//
//   V_N(x)     = demand_rate * gamma
//   V_{j-1}(x) = min_{u in W(j-1, x)} price_{j-1} * g(j-1, u, x_1) * dt + V_j(f(x, u))
//
// where W restricts u to the comfort band and, on-peak, to g <= gamma.
// Infeasible states carry +infinity. On top of the fixed-gamma solve sit two
// searches over gamma: feasibility bisection (smallest feasible cap) and a
// scan + golden-section search on the total cost.
//
// The per-node backup is data parallel. Kernel::serial is the reference loop;
// Kernel::parallel is the OpenMP version and must agree with it bit for bit.

#ifndef THERMO_DP_SOLVER_HPP
#define THERMO_DP_SOLVER_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "thermo/tariff.hpp"
#include "thermo/thermal_core.hpp"

namespace thermo {

struct ComfortBand {
    double t_min = 22.0;
    double t_max = 28.0;

    bool contains(double u) const { return u >= t_min && u <= t_max; }
};

/// Everything that defines one user-level problem.
struct UserProblem {
    BuildingParams building;
    TariffSchedule tariff;
    ExteriorTrace exterior;
    ComfortBand band;
    WallState initial;

    /// Checks cross-field consistency (horizon lengths, band, initial state size).
    void validate() const;
};

/// Raised when a cap or a price point admits no feasible control sequence.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DpConfig {
    int grid_nodes = 21;       // per dimension
    double grid_margin = 2.0;  // grid spans [t_min - margin, t_max + margin]
    double du = 0.25;
    // Explicit control candidates; when nonempty they replace the du grid.
    std::vector<double> control_values;
    // Add the closed-form control where the on-peak cap binds.
    bool boundary_control = true;
    // Tabulate only ceil(M/2) coordinates when the initial profile is mirror symmetric.
    bool exploit_symmetry = true;
    // 0: THERMOSTAT_DP_THREADS if set, otherwise the OpenMP default.
    int threads = 0;
};

enum class GammaMode { feasibility_bisection, total_cost };

const char* to_string(GammaMode mode);
GammaMode parse_gamma_mode(const std::string& text);

struct GammaSearchConfig {
    double gamma_lo = 0.0;      // W
    double gamma_hi = 30000.0;  // W
    int b_max = 12;
    GammaMode mode = GammaMode::total_cost;
    int scan_points = 16;
};

enum class Kernel { serial, parallel };

/// Uniform grid over the free coordinates of the wall state.
class StateGrid {
public:
    StateGrid(int state_dim, bool mirrored, double lo, double hi, int nodes_per_dim);

    int state_dim() const { return state_dim_; }
    int dims() const { return dims_; }
    bool mirrored() const { return mirrored_; }
    int nodes_per_dim() const { return n_; }
    std::size_t size() const { return size_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double spacing() const { return h_; }
    double node(int i) const { return lo_ + h_ * i; }

    /// Full M-dimensional wall state of a flat node index.
    void node_state(std::size_t flat, std::span<double> full) const;

    /// Multilinear interpolation of `values` at a full wall state. Coordinates
    /// outside the box are clamped and counted in `clamps`. Corners with zero
    /// weight are ignored; any other infinite corner makes the result infinite.
    double interpolate(std::span<const double> values, std::span<const double> full,
                       std::size_t& clamps) const;

private:
    int state_dim_;
    int dims_;
    bool mirrored_;
    int n_;
    std::size_t size_;
    double lo_;
    double hi_;
    double h_;
};

struct ValueGrid {
    int step = 0;
    std::vector<double> values;
};

/// Value layers V_0..V_N and the tabulated minimizers for steps 0..N-1.
struct Policy {
    double gamma_w = 0.0;
    std::vector<ValueGrid> layers;
    std::vector<std::vector<double>> controls;  // NaN where infeasible
};

struct BackupResult {
    ValueGrid layer;
    std::vector<double> argmin;
    std::size_t clamps = 0;
};

struct FixedGammaSolution {
    double value = 0.0;  // V_0 at the initial state, $
    bool feasible = false;
    Policy policy;
    std::size_t clamps = 0;
};

struct RolloutResult {
    std::vector<double> controls;
    Trajectory trajectory;
    BillBreakdown bill;
    double gamma_w = 0.0;
    std::size_t clamps = 0;
};

struct GammaSearchResult {
    GammaMode mode = GammaMode::total_cost;
    double gamma_w = 0.0;
    double value = 0.0;
    FixedGammaSolution solution;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int solves = 0;
    bool feasible_at_lo = false;
};

class DpSolver {
public:
    explicit DpSolver(UserProblem problem, DpConfig config = {});

    const UserProblem& problem() const { return problem_; }
    const DpConfig& config() const { return config_; }
    const StateGrid& grid() const { return grid_; }
    /// Control candidates before the on-peak filter, ascending.
    const std::vector<double>& base_controls() const { return base_controls_; }
    int threads() const { return threads_; }

    /// Ascending admissible controls at step k for first wall node t1.
    std::vector<double> admissible_controls(std::size_t k, double t1, double gamma_w) const;
    std::vector<double> admissible_controls(std::size_t k, const WallState& node,
                                            double gamma_w) const {
        return admissible_controls(k, node.t1(), gamma_w);
    }

    ValueGrid terminal_layer(double gamma_w) const;

    /// Computes layer next.step - 1 from `next`.
    BackupResult bellman_backup(const ValueGrid& next, double gamma_w,
                                Kernel kernel = Kernel::parallel) const;

    FixedGammaSolution solve_fixed_gamma(double gamma_w, Kernel kernel = Kernel::parallel) const;

    /// Forward pass re-minimizing the Bellman right-hand side at each realized state.
    RolloutResult rollout(const Policy& policy) const;

    GammaSearchResult gamma_bisection(const GammaSearchConfig& config) const;

    /// Minimizes the total cost over gamma in [gamma_min, gamma_hi]. gamma_min is
    /// taken from `known_gamma_min` when given (it does not depend on prices),
    /// otherwise from a bisection.
    GammaSearchResult gamma_total_search(const GammaSearchConfig& config,
                                         std::optional<double> known_gamma_min = {}) const;

    GammaSearchResult solve(const GammaSearchConfig& config,
                            std::optional<double> known_gamma_min = {}) const;

private:
    struct Scratch {
        std::vector<double> candidates;
        std::vector<double> state;
        std::vector<double> next_state;
    };

    void fill_admissible(std::size_t k, double t1, double gamma_w,
                         std::vector<double>& out) const;
    double stage_cost(std::size_t k, double u, double t1) const;
    // Returns the minimizing control (NaN if none) and writes its value.
    double minimize_at(std::size_t k, std::span<const double> state, double gamma_w,
                       const ValueGrid& next, Scratch& scratch, double& best_value,
                       std::size_t& clamps) const;

    UserProblem problem_;
    DpConfig config_;
    StateGrid grid_;
    std::vector<double> base_controls_;
    int threads_ = 1;
};

/// Thread count for the solver kernels: `requested` if positive, otherwise
/// THERMOSTAT_DP_THREADS if positive, otherwise the OpenMP default.
int resolve_thread_count(int requested);

}  // namespace thermo

#endif  // THERMO_DP_SOLVER_HPP
