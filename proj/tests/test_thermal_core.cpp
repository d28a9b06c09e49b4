#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "thermo/thermal_core.hpp"

using namespace thermo;

namespace {

// Random valid parameters with the stability ratio anywhere in (0, 1/2].
BuildingParams random_params(std::mt19937_64& rng, int m) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double l_in = 0.1 + 0.9 * unit(rng);
    const double dx = l_in / (m + 1);
    const double dt = 600.0 + 6600.0 * unit(rng);
    const double alpha = (0.01 + 0.49 * unit(rng)) * dx * dx / dt;
    return BuildingParams::make(alpha, l_in, 0.0005 + 0.005 * unit(rng), 5.0 + 95.0 * unit(rng), m, dt);
}

}  // namespace

TEST(BuildingParams, TableOneStabilityRatio) {
    const BuildingParams p = fixtures::table1();
    EXPECT_EQ(p.m(), 3);
    EXPECT_DOUBLE_EQ(p.dx(), 0.1);
    EXPECT_NEAR(p.stability_ratio(), 0.2988, 1e-12);
    EXPECT_DOUBLE_EQ(p.dt_hours(), 1.0);
}

TEST(BuildingParams, TwoHourStepIsUnstable) {
    EXPECT_THROW(fixtures::table1(3, 7200.0), std::invalid_argument);
    try {
        fixtures::table1(3, 7200.0);
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("0.5976"), std::string::npos) << e.what();
    }
}

TEST(BuildingParams, RejectsNonPositiveInputs) {
    EXPECT_THROW(BuildingParams::make(0.0, 0.4, 0.0015, 45, 3, 3600), std::invalid_argument);
    EXPECT_THROW(BuildingParams::make(8.3e-7, -0.4, 0.0015, 45, 3, 3600), std::invalid_argument);
    EXPECT_THROW(BuildingParams::make(8.3e-7, 0.4, 0.0, 45, 3, 3600), std::invalid_argument);
    EXPECT_THROW(BuildingParams::make(8.3e-7, 0.4, 0.0015, 0, 3, 3600), std::invalid_argument);
    EXPECT_THROW(BuildingParams::make(8.3e-7, 0.4, 0.0015, 45, 0, 3600), std::invalid_argument);
    EXPECT_THROW(BuildingParams::make(8.3e-7, 0.4, 0.0015, 45, 3, 0), std::invalid_argument);
}

TEST(BuildingParams, RatioExactlyOneHalfIsAccepted) {
    // 2^-13 * 3600 / 0.9375^2 == 0.5
    const BuildingParams p = BuildingParams::make(std::ldexp(1.0, -13), 1.875, 0.001, 30, 1, 3600);
    EXPECT_EQ(p.stability_ratio(), 0.5);
}

TEST(Dynamics, TableOneShapes) {
    const LinearDynamics d = build_dynamics(fixtures::table1());
    ASSERT_EQ(d.m, 3);
    EXPECT_EQ(d.a.size(), 9u);
    EXPECT_EQ(d.b.size(), 3u);
    const double s = 8.3e-7 / 0.01;
    EXPECT_DOUBLE_EQ(d.a_at(0, 0), -2 * s);
    EXPECT_DOUBLE_EQ(d.a_at(0, 1), s);
    EXPECT_DOUBLE_EQ(d.a_at(0, 2), 0.0);
    EXPECT_DOUBLE_EQ(d.b[0], s);
    EXPECT_DOUBLE_EQ(d.b[1], 0.0);
    EXPECT_DOUBLE_EQ(d.b[2], s);
}

TEST(Dynamics, SingleNodeGetsBothBoundaries) {
    const LinearDynamics d = build_dynamics(fixtures::table1(1));
    ASSERT_EQ(d.m, 1);
    EXPECT_DOUBLE_EQ(d.b[0], -d.a[0]);
}

TEST(Dynamics, RowSumsVanishProperty) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 1 + trial % 7;
        const LinearDynamics d = build_dynamics(random_params(rng, m));
        for (int i = 0; i < m; ++i) {
            double row = d.b[static_cast<std::size_t>(i)];
            double scale = std::abs(row);
            for (int j = 0; j < m; ++j) {
                row += d.a_at(i, j);
                scale = std::max(scale, std::abs(d.a_at(i, j)));
            }
            EXPECT_LE(std::abs(row), 1e-15 * scale);
        }
    }
}

TEST(Step, SingleNodeHandValue) {
    const BuildingParams p = fixtures::table1(1);
    EXPECT_NEAR(p.stability_ratio(), 0.0747, 1e-12);
    const WallState next = step(p, WallState{{25.0}}, 20.0);
    EXPECT_NEAR(next.temps[0], 24.253, 1e-12);
}

TEST(Step, SingleNodeChain) {
    const BuildingParams p = fixtures::table1(1);
    const double r = 0.0747;
    const std::vector<double> controls{20.0, 28.0, 24.0};
    const ExteriorTrace ext{{35.0, 36.0, 37.0}};
    const Trajectory traj = simulate(p, WallState{{25.0}}, controls, ext);
    double t = 25.0;
    for (std::size_t k = 0; k < controls.size(); ++k) {
        EXPECT_NEAR(traj.powers_w[k], (ext.temps[k] - controls[k]) / 0.0015 + 2 * 45 * (t - controls[k]) / 0.2, 1e-9);
        t = (1 - 2 * r) * t + 2 * r * controls[k];
        EXPECT_NEAR(traj.states[k + 1].temps[0], t, 1e-12);
    }
}

TEST(Step, EquilibriumIsExactProperty) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> temp(-20.0, 60.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int m = 1 + trial % 9;
        const BuildingParams p = random_params(rng, m);
        const double c = temp(rng);
        const WallState s = WallState::uniform(m, c);
        EXPECT_EQ(step(p, s, c), s);
    }
}

TEST(Step, AffineProperty) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> temp(15.0, 40.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 1 + trial % 6;
        const BuildingParams p = random_params(rng, m);
        WallState a = WallState::uniform(m, 0), b = a, sum = a;
        for (int i = 0; i < m; ++i) {
            a.temps[static_cast<std::size_t>(i)] = temp(rng);
            b.temps[static_cast<std::size_t>(i)] = temp(rng);
            sum.temps[static_cast<std::size_t>(i)] = a.temps[static_cast<std::size_t>(i)] + b.temps[static_cast<std::size_t>(i)];
        }
        const double ua = temp(rng), ub = temp(rng);
        const WallState lhs = step(p, sum, ua + ub);
        const WallState ra = step(p, a, ua), rb = step(p, b, ub), r0 = step(p, WallState::uniform(m, 0), 0);
        for (std::size_t i = 0; i < lhs.size(); ++i)
            EXPECT_NEAR(lhs.temps[i], ra.temps[i] + rb.temps[i] - r0.temps[i], 1e-12);
    }
}

TEST(Step, MatchesEulerOnContinuousModelProperty) {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> temp(15.0, 40.0);
    for (int trial = 0; trial < 150; ++trial) {
        const int m = 1 + trial % 5;
        const BuildingParams p = random_params(rng, m);
        const LinearDynamics d = build_dynamics(p);
        WallState s = WallState::uniform(m, 0);
        for (auto& t : s.temps) t = temp(rng);
        const double u = temp(rng);
        const WallState next = step(p, s, u);
        for (int i = 0; i < m; ++i) {
            double expect = s.temps[static_cast<std::size_t>(i)] + p.dt() * d.b[static_cast<std::size_t>(i)] * u;
            for (int j = 0; j < m; ++j) expect += p.dt() * d.a_at(i, j) * s.temps[static_cast<std::size_t>(j)];
            EXPECT_NEAR(next.temps[static_cast<std::size_t>(i)], expect, 1e-11);
        }
    }
}

TEST(Step, RejectsWrongStateSize) {
    EXPECT_THROW(step(fixtures::table1(), WallState::uniform(2, 25), 25), std::invalid_argument);
}

TEST(Power, TableOneExamples) {
    const BuildingParams p = fixtures::table1();
    EXPECT_NEAR(power(p, 0, 25.0, 25.0, ExteriorTrace{{40.0}}), 10000.0, 1e-9);
    EXPECT_NEAR(power(p, 0, 25.0, 24.0, ExteriorTrace{{25.0}}), -900.0, 1e-9);
    EXPECT_EQ(power(p, 0, 31.0, 31.0, ExteriorTrace{{31.0}}), 0.0);
}

TEST(Power, ClampFlag) {
    const BuildingParams p = BuildingParams::make(8.3e-7, 0.4, 0.0015, 45, 3, 3600, true);
    EXPECT_EQ(power(p, 0, 25.0, 24.0, ExteriorTrace{{25.0}}), 0.0);
    EXPECT_NEAR(power(p, 0, 25.0, 25.0, ExteriorTrace{{40.0}}), 10000.0, 1e-9);
}

TEST(Power, AffineCoefficientsProperty) {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> temp(10.0, 50.0);
    for (int trial = 0; trial < 300; ++trial) {
        const BuildingParams p = random_params(rng, 1 + trial % 5);
        EXPECT_DOUBLE_EQ(p.power_coeff_u(), -(1.0 / p.r_e() + 2.0 * p.c_in() / p.dx()));
        EXPECT_DOUBLE_EQ(p.power_coeff_t1(), 2.0 * p.c_in() / p.dx());
        EXPECT_DOUBLE_EQ(p.power_coeff_te(), 1.0 / p.r_e());
        const double u = temp(rng), t1 = temp(rng), te = temp(rng);
        const double g = power(p, 0, u, t1, ExteriorTrace{{te}});
        const double affine = p.power_coeff_u() * u + p.power_coeff_t1() * t1 + p.power_coeff_te() * te;
        EXPECT_NEAR(g, affine, 1e-9 * (std::abs(p.power_coeff_u()) * 50 + 1));
    }
}

TEST(ExteriorTrace, OutOfRange) {
    const ExteriorTrace t{{30.0, 31.0}};
    EXPECT_EQ(t.at(1), 31.0);
    EXPECT_THROW(t.at(2), std::out_of_range);
}

TEST(Simulate, ConstantEverythingIsStill) {
    const BuildingParams p = fixtures::table1();
    const std::vector<double> u(24, 26.0);
    const Trajectory traj = simulate(p, WallState::uniform(3, 26.0), u, ExteriorTrace{std::vector<double>(24, 26.0)});
    ASSERT_EQ(traj.states.size(), 25u);
    for (double g : traj.powers_w) EXPECT_EQ(g, 0.0);
    for (const auto& s : traj.states) EXPECT_EQ(s, WallState::uniform(3, 26.0));
}

TEST(Simulate, ShortTraceThrows) {
    const std::vector<double> u(5, 26.0);
    EXPECT_THROW(simulate(fixtures::table1(), WallState::uniform(3, 26.0), u, ExteriorTrace{{30, 30}}),
                 std::invalid_argument);
}

TEST(Simulate, BoundedByInputsProperty) {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> temp(15.0, 40.0);
    for (int trial = 0; trial < 120; ++trial) {
        const int m = 1 + trial % 6;
        const BuildingParams p = random_params(rng, m);
        WallState s = WallState::uniform(m, 0);
        for (auto& t : s.temps) t = temp(rng);
        std::vector<double> u(30);
        for (auto& x : u) x = temp(rng);
        const double lo = std::min(*std::min_element(s.temps.begin(), s.temps.end()), *std::min_element(u.begin(), u.end()));
        const double hi = std::max(*std::max_element(s.temps.begin(), s.temps.end()), *std::max_element(u.begin(), u.end()));
        const Trajectory traj = simulate(p, s, u, ExteriorTrace{std::vector<double>(30, 35.0)});
        for (const auto& st : traj.states)
            for (double t : st.temps) {
                EXPECT_GE(t, lo - 1e-9);
                EXPECT_LE(t, hi + 1e-9);
            }
    }
}

TEST(Simulate, SymmetryPreservedProperty) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> temp(15.0, 40.0);
    for (int trial = 0; trial < 120; ++trial) {
        const int m = 2 + trial % 6;
        const BuildingParams p = random_params(rng, m);
        WallState s = WallState::uniform(m, 0);
        for (int i = 0; i < (m + 1) / 2; ++i) {
            const double t = temp(rng);
            s.temps[static_cast<std::size_t>(i)] = t;
            s.temps[static_cast<std::size_t>(m - 1 - i)] = t;
        }
        std::vector<double> u(20);
        for (auto& x : u) x = temp(rng);
        const Trajectory traj = simulate(p, s, u, ExteriorTrace{std::vector<double>(20, 35.0)});
        for (const auto& st : traj.states)
            for (int i = 0; i < m; ++i)
                EXPECT_NEAR(st.temps[static_cast<std::size_t>(i)], st.temps[static_cast<std::size_t>(m - 1 - i)], 1e-12);
    }
}

TEST(Simulate, EnergyConvergesUnderRefinement) {
    // dx = 0.2, 0.1, 0.05 at a common 15-minute step, smooth setpoint
    const int n = 96;
    ExteriorTrace ext;
    std::vector<double> u(n);
    for (int k = 0; k < n; ++k) {
        ext.temps.push_back(36.0 + 7.0 * std::cos(2.0 * M_PI * (k / 4.0 - 16.0) / 24.0));
        u[static_cast<std::size_t>(k)] = 25.0 + 3.0 * std::sin(2.0 * M_PI * k / 96.0);
    }
    std::vector<double> energy;
    for (int m : {2, 4, 8}) {
        const BuildingParams p = BuildingParams::make(8.3e-7, 0.4, 0.0015, 45.0, m, 900.0);
        const auto g = simulate(p, WallState::uniform(m, 25.0), u, ext).powers_w;
        energy.push_back(std::accumulate(g.begin(), g.end(), 0.0));
    }
    const double coarse = std::abs(energy[1] - energy[0]), fine = std::abs(energy[2] - energy[1]);
    EXPECT_GT(coarse, 0.0);
    EXPECT_LT(fine, coarse);
}
