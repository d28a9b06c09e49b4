// Exhaustive solver for tiny user-level instances. It enumerates every control
// sequence, keeps those that respect the comfort band and the on-peak cap
// along the simulated trajectory, and scores them with the sequence-form
// cost-to-go. It shares no code path with the DP recursion, so agreement
// between the two is a check of the recursion.

#ifndef THERMO_ORACLE_HPP
#define THERMO_ORACLE_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "thermo/dp_solver.hpp"

namespace thermo {

struct TinyInstance {
    UserProblem problem;
    double gamma_w = 0.0;
    // candidate controls per step, each ascending
    std::vector<std::vector<double>> candidates;

    /// Same candidate set at every step.
    static TinyInstance with_uniform_candidates(UserProblem problem, double gamma_w,
                                                std::vector<double> values);
    std::size_t sequence_count() const;
    void validate() const;
};

struct OracleResult {
    double value = 0.0;
    std::vector<double> controls;
    std::size_t feasible_sequences = 0;
};

/// Minimum of the cost-to-go over all admissible sequences; ties go to the
/// lexicographically smallest sequence. Throws InfeasibleError when no
/// sequence is admissible.
OracleResult enumerate_optimum(const TinyInstance& instance);

/// Whether a control sequence is admissible for the instance.
bool admissible_sequence(const TinyInstance& instance, const std::vector<double>& controls);

/// Random M = 1 instance whose dynamics map lattice states to lattice states:
/// alpha * dt / dx^2 = 1/2 exactly, so the successor of any state is the
/// control itself, and every control and T0 is an integer node of the
/// [20, 30] grid with 11 nodes. DP and oracle then see identical numbers.
TinyInstance random_grid_aligned_instance(std::mt19937_64& rng);

/// DP settings matching a grid-aligned instance: its candidates as the
/// control set, no boundary control, 11 nodes over [20, 30].
DpConfig grid_aligned_dp_config(const TinyInstance& instance);

struct EquivalenceCase {
    bool feasible = false;  // according to the oracle
    double oracle_value = 0.0;
    double dp_value = 0.0;
    std::vector<double> oracle_controls;
    std::vector<double> dp_controls;  // rollout
    bool values_match = false;       // within 1e-9 relative
    bool controls_match = false;
};

EquivalenceCase check_equivalence(const TinyInstance& instance, const DpConfig& config);

/// Draws grid-aligned instances until `feasible_cases` feasible ones were
/// checked (infeasible draws are checked for agreement on infeasibility too).
std::vector<EquivalenceCase> verify_dp_against_oracle(int feasible_cases, std::uint64_t seed);

}  // namespace thermo

#endif  // THERMO_ORACLE_HPP
