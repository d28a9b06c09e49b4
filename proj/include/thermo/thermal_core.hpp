// Interior-wall heat conduction model and HVAC power.
//
// The wall is a 1-D rod of width L_in discretized at M interior nodes with
// Dirichlet boundaries at the interior air temperature u on both faces.
// Time stepping is forward Euler.

#ifndef THERMO_THERMAL_CORE_HPP
#define THERMO_THERMAL_CORE_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace thermo {

/// Physical constants of the building and the discretization steps.
///
/// Construct through make(), which derives dx = L_in / (M + 1) and rejects
/// configurations that violate positivity or the explicit-Euler stability
/// bound alpha * dt / dx^2 <= 1/2.
class BuildingParams {
public:
    static BuildingParams make(double alpha, double l_in, double r_e, double c_in,
                               int m, double dt_seconds, bool clamp_power_at_zero = false);

    double alpha() const { return alpha_; }
    double l_in() const { return l_in_; }
    double r_e() const { return r_e_; }
    double c_in() const { return c_in_; }
    int m() const { return m_; }
    double dx() const { return dx_; }
    double dt() const { return dt_; }
    double dt_hours() const { return dt_ / 3600.0; }
    bool clamp_power_at_zero() const { return clamp_power_at_zero_; }

    /// alpha * dt / dx^2
    double stability_ratio() const { return ratio_; }

    // Coefficients of the affine power model g = c_u * u + c_t1 * T1 + c_te * Te.
    double power_coeff_u() const { return -(1.0 / r_e_ + 2.0 * c_in_ / dx_); }
    double power_coeff_t1() const { return 2.0 * c_in_ / dx_; }
    double power_coeff_te() const { return 1.0 / r_e_; }

private:
    BuildingParams() = default;

    double alpha_ = 0.0;
    double l_in_ = 0.0;
    double r_e_ = 0.0;
    double c_in_ = 0.0;
    int m_ = 0;
    double dx_ = 0.0;
    double dt_ = 0.0;
    double ratio_ = 0.0;
    bool clamp_power_at_zero_ = false;
};

/// Temperatures (deg C) at the M interior wall nodes.
struct WallState {
    std::vector<double> temps;

    static WallState uniform(int m, double value) {
        return WallState{std::vector<double>(static_cast<std::size_t>(m), value)};
    }
    std::size_t size() const { return temps.size(); }
    double t1() const { return temps.front(); }
    bool operator==(const WallState&) const = default;
};

/// Exterior temperature sampled at k * dt.
struct ExteriorTrace {
    std::vector<double> temps;

    double at(std::size_t k) const;
    std::size_t size() const { return temps.size(); }
};

/// Continuous-time linear model dT/dt = A T + B u.
struct LinearDynamics {
    int m = 0;
    std::vector<double> a;  // row-major m x m
    std::vector<double> b;

    double a_at(int row, int col) const { return a[static_cast<std::size_t>(row * m + col)]; }
};

LinearDynamics build_dynamics(const BuildingParams& params);

/// One forward-Euler step: (I + A dt) T + B dt u.
WallState step(const BuildingParams& params, const WallState& state, double u);

/// In-place variant used by the solver kernels; `out` must have M entries.
void step_into(const BuildingParams& params, std::span<const double> state, double u,
               std::span<double> out);

/// HVAC power (W) at step k: (Te_k - u)/R_e + 2 C_in (T1 - u)/dx.
double power(const BuildingParams& params, std::size_t k, double u, double t1,
             const ExteriorTrace& trace);

struct Trajectory {
    std::vector<WallState> states;  // N_f + 1 entries, states[0] = T0
    std::vector<double> powers_w;   // N_f entries
};

Trajectory simulate(const BuildingParams& params, const WallState& initial,
                    std::span<const double> controls, const ExteriorTrace& trace);

}  // namespace thermo

#endif  // THERMO_THERMAL_CORE_HPP
