#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "thermo/oracle.hpp"

using namespace thermo;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

UserProblem tiny(int n_f, Prices prices, std::vector<double> ext, double t0 = 25.0) {
    const BuildingParams b = BuildingParams::make(std::ldexp(1.0, -13), 1.875, 0.0015, 45.0, 1, 3600.0);
    return UserProblem{b, TariffSchedule(prices, n_f, 1, 2, n_f, 1.0), ExteriorTrace{std::move(ext)},
                       ComfortBand{22.0, 28.0}, WallState{{t0}}};
}

}  // namespace

TEST(Oracle, GridAlignedDynamics) {
    const BuildingParams b = BuildingParams::make(std::ldexp(1.0, -13), 1.875, 0.0015, 45.0, 1, 3600.0);
    EXPECT_EQ(b.stability_ratio(), 0.5);
    EXPECT_EQ(step(b, WallState{{27.0}}, 23.0).temps[0], 23.0);
}

TEST(Oracle, SingleFeasibleSequence) {
    auto inst = TinyInstance::with_uniform_candidates(tiny(3, {0.1, 0.05, 10.0}, {35, 35, 35}), 20000.0, {24.0});
    const OracleResult r = enumerate_optimum(inst);
    EXPECT_EQ(r.feasible_sequences, 1u);
    EXPECT_EQ(r.controls, (std::vector<double>{24, 24, 24}));
}

TEST(Oracle, ZeroPricesTieBreaksLexicographically) {
    auto inst = TinyInstance::with_uniform_candidates(tiny(4, {0, 0, 0}, {35, 35, 35, 35}), kInf, {26.0, 23.0, 28.0});
    EXPECT_EQ(inst.sequence_count(), 81u);
    const OracleResult r = enumerate_optimum(inst);
    EXPECT_EQ(r.value, 0.0);
    EXPECT_EQ(r.feasible_sequences, 81u);
    EXPECT_EQ(r.controls, (std::vector<double>{23, 23, 23, 23}));
}

TEST(Oracle, CapRemovesSequences) {
    // on-peak at step 1: g = (40 - u)/R_e + 2 C (T1 - u)/dx with T1 = u_0
    auto inst = TinyInstance::with_uniform_candidates(tiny(3, {0.1, 0.05, 10.0}, {40, 40, 40}), 8100.0, {22.0, 28.0});
    const OracleResult r = enumerate_optimum(inst);
    const BuildingParams& b = inst.problem.building;
    std::size_t expected = 0;
    for (double u0 : {22.0, 28.0})
        for (double u1 : {22.0, 28.0}) {
            const bool ok = within_cap(power(b, 1, u1, u0, inst.problem.exterior), 8100.0);
            expected += ok ? 2 : 0;
            EXPECT_EQ(admissible_sequence(inst, {u0, u1, 22.0}), ok);
        }
    EXPECT_EQ(r.feasible_sequences, expected);
    EXPECT_GT(expected, 0u);
    EXPECT_LT(expected, 8u);
    inst.gamma_w = 0.0;
    EXPECT_THROW(enumerate_optimum(inst), InfeasibleError);
}

TEST(Oracle, ValidateLimits) {
    auto inst = TinyInstance::with_uniform_candidates(tiny(3, {0.1, 0.05, 10.0}, {35, 35, 35}), kInf, {22, 23, 24, 25, 26, 27});
    EXPECT_THROW(inst.validate(), std::invalid_argument);
    inst.candidates.assign(3, {24.0, 23.0});
    EXPECT_THROW(inst.validate(), std::invalid_argument);
    inst.candidates.assign(2, {24.0});
    EXPECT_THROW(inst.validate(), std::invalid_argument);
    auto big = TinyInstance::with_uniform_candidates(tiny(7, {0.1, 0.05, 10.0}, std::vector<double>(7, 35.0)), kInf, {24.0});
    EXPECT_THROW(big.validate(), std::invalid_argument);
}

TEST(Oracle, HandInstanceMatchesDp) {
    auto inst = TinyInstance::with_uniform_candidates(tiny(4, {0.08, 0.03, 12.0}, {36, 41, 39, 33}, 26.0), 12500.0,
                                                      {22.0, 24.0, 26.0});
    DpConfig c = grid_aligned_dp_config(inst);
    c.grid_nodes = 6;  // nodes 20, 22, ..., 30
    const EquivalenceCase e = check_equivalence(inst, c);
    ASSERT_TRUE(e.feasible);
    EXPECT_TRUE(e.values_match) << e.oracle_value << " vs " << e.dp_value;
    EXPECT_TRUE(e.controls_match);
}

TEST(Oracle, DpEquivalenceOnRandomInstances) {
    const auto report = verify_dp_against_oracle(40, 2015);
    int feasible = 0;
    for (const auto& c : report) {
        feasible += c.feasible ? 1 : 0;
        EXPECT_TRUE(c.values_match) << c.oracle_value << " vs " << c.dp_value;
        EXPECT_TRUE(c.controls_match);
    }
    EXPECT_EQ(feasible, 40);
}

TEST(Oracle, RandomInstancesAreWellFormedProperty) {
    std::mt19937_64 rng(51);
    for (int i = 0; i < 200; ++i) {
        const TinyInstance inst = random_grid_aligned_instance(rng);
        EXPECT_NO_THROW(inst.validate());
        EXPECT_EQ(inst.problem.building.stability_ratio(), 0.5);
        for (double u : inst.candidates.front()) EXPECT_EQ(u, std::round(u));
        EXPECT_EQ(inst.problem.initial.t1(), std::round(inst.problem.initial.t1()));
    }
}
