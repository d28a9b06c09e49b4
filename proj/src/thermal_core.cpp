#include "thermo/thermal_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace thermo {

BuildingParams BuildingParams::make(double alpha, double l_in, double r_e, double c_in,
                                    int m, double dt_seconds, bool clamp_power_at_zero) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string(name) + " must be positive and finite");
    };
    positive(alpha, "alpha");
    positive(l_in, "L_in");
    positive(r_e, "R_e");
    positive(c_in, "C_in");
    positive(dt_seconds, "dt");
    if (m < 1) throw std::invalid_argument("M must be at least 1");

    BuildingParams p;
    p.alpha_ = alpha;
    p.l_in_ = l_in;
    p.r_e_ = r_e;
    p.c_in_ = c_in;
    p.m_ = m;
    p.dx_ = l_in / (m + 1);
    p.dt_ = dt_seconds;
    p.ratio_ = alpha * dt_seconds / (p.dx_ * p.dx_);
    p.clamp_power_at_zero_ = clamp_power_at_zero;
    if (p.ratio_ > 0.5) {
        throw std::invalid_argument("unstable discretization: alpha*dt/dx^2 = " +
                                    std::to_string(p.ratio_) + " exceeds 1/2");
    }
    return p;
}

double ExteriorTrace::at(std::size_t k) const {
    if (k >= temps.size())
        throw std::out_of_range("exterior trace index " + std::to_string(k) +
                                " beyond horizon of " + std::to_string(temps.size()));
    return temps[k];
}

LinearDynamics build_dynamics(const BuildingParams& params) {
    const int m = params.m();
    const double s = params.alpha() / (params.dx() * params.dx());
    LinearDynamics d;
    d.m = m;
    d.a.assign(static_cast<std::size_t>(m * m), 0.0);
    d.b.assign(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
        d.a[static_cast<std::size_t>(i * m + i)] = -2.0 * s;
        if (i > 0) d.a[static_cast<std::size_t>(i * m + i - 1)] = s;
        if (i + 1 < m) d.a[static_cast<std::size_t>(i * m + i + 1)] = s;
    }
    // both faces see the air temperature; for M = 1 the single node gets 2s
    d.b.front() += s;
    d.b.back() += s;
    return d;
}

void step_into(const BuildingParams& params, std::span<const double> state, double u,
               std::span<double> out) {
    const std::size_t m = state.size();
    const double r = params.stability_ratio();
    for (std::size_t i = 0; i < m; ++i) {
        const double left = i == 0 ? u : state[i - 1];
        const double right = i + 1 == m ? u : state[i + 1];
        out[i] = state[i] + r * (left - 2.0 * state[i] + right);
    }
}

WallState step(const BuildingParams& params, const WallState& state, double u) {
    if (state.size() != static_cast<std::size_t>(params.m()))
        throw std::invalid_argument("wall state size does not match M");
    WallState next{std::vector<double>(state.size())};
    step_into(params, state.temps, u, next.temps);
    return next;
}

double power(const BuildingParams& params, std::size_t k, double u, double t1,
             const ExteriorTrace& trace) {
    const double g = (trace.at(k) - u) / params.r_e() + 2.0 * params.c_in() * (t1 - u) / params.dx();
    if (params.clamp_power_at_zero() && g < 0.0) return 0.0;
    return g;
}

Trajectory simulate(const BuildingParams& params, const WallState& initial,
                    std::span<const double> controls, const ExteriorTrace& trace) {
    if (initial.size() != static_cast<std::size_t>(params.m()))
        throw std::invalid_argument("initial wall state size does not match M");
    if (controls.size() > trace.size())
        throw std::invalid_argument("control sequence longer than exterior trace");
    Trajectory out;
    out.states.reserve(controls.size() + 1);
    out.powers_w.reserve(controls.size());
    out.states.push_back(initial);
    for (std::size_t k = 0; k < controls.size(); ++k) {
        const WallState& cur = out.states.back();
        out.powers_w.push_back(power(params, k, controls[k], cur.t1(), trace));
        out.states.push_back(step(params, cur, controls[k]));
    }
    return out;
}

}  // namespace thermo
