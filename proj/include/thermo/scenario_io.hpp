// Scenario configuration, exterior-temperature ingestion, orchestration of
// the thermostat strategies and CSV/text output.

#ifndef THERMO_SCENARIO_IO_HPP
#define THERMO_SCENARIO_IO_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "thermo/baselines.hpp"
#include "thermo/dp_solver.hpp"
#include "thermo/price_optimizer.hpp"
#include "thermo/tariff.hpp"
#include "thermo/thermal_core.hpp"

namespace thermo {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every key a scenario file may contain. CLI flags mirror these names.
const std::vector<std::string>& config_keys();

/// Flat `key = value` text with `#` comments.
class KeyValueConfig {
public:
    static KeyValueConfig load(const std::filesystem::path& path);
    static KeyValueConfig parse(const std::string& text,
                                const std::filesystem::path& base_dir = {});

    /// Overrides (or adds) a key; relative paths in the value resolve against the CWD.
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    std::optional<std::string> get(const std::string& key) const;
    /// Value of a path-valued key, resolved against the directory of the file it came from.
    std::optional<std::filesystem::path> get_path(const std::string& key) const;

private:
    struct Entry {
        std::string value;
        std::filesystem::path base_dir;
    };
    std::map<std::string, Entry> entries_;
};

struct ScenarioConfig {
    // building
    double alpha = 8.3e-7;
    double l_in = 0.4;
    double r_e = 0.0015;
    double c_in = 45.0;
    int m = 3;
    double dt_hours = 1.0;
    bool clamp_power_at_zero = false;
    ComfortBand band{22.0, 28.0};

    // tariff
    Prices prices{0.089, 0.044, 13.5};
    double on_peak_start_hour = 12.0;
    double on_peak_end_hour = 19.0;
    int days = 3;
    DemandTerm demand_term = DemandTerm::per_day;

    // initial wall profile; empty means uniform at T_max
    std::vector<double> t_init;

    std::filesystem::path exterior_csv;

    DpConfig dp;
    GammaSearchConfig gamma;
    double precool_hours = 3.0;
    std::vector<std::string> strategies{"optimal", "constant", "precool"};

    MarginalCosts marginal;
    PricingConfig pricing;
    // "proportional": start from the normalized tariff prices; "simplex": from init_p_on/init_p_d
    std::string price_init = "proportional";
    double init_p_on = 0.1;
    double init_p_d = 0.8;

    std::filesystem::path output_dir = "results";
    std::filesystem::path controls_csv;

    static ScenarioConfig from(const KeyValueConfig& kv);

    int n_steps() const;
    BuildingParams building() const;
    TariffSchedule tariff() const;
    WallState initial_state() const;
    /// Loads the exterior trace and assembles the user problem.
    UserProblem user_problem() const;
    void validate() const;
};

/// Reads an `hour,temp_c` CSV of hourly samples and resamples it linearly to
/// `dt_hours`. Past the last row the final value holds for one source interval.
ExteriorTrace load_exterior_csv(const std::filesystem::path& path, double dt_hours, int horizon);

struct ScenarioResult {
    std::string strategy;
    std::vector<double> controls;
    Trajectory trajectory;
    Prices prices;  // tariff the bill was computed under
    BillBreakdown bill;
    double production_cost = 0.0;
    double peak_kw = 0.0;
    double gamma_w = 0.0;  // 0 when the strategy has no cap
    std::size_t clamps = 0;
    int iterations = 0;
    std::vector<std::string> notes;
};

ScenarioResult make_result(const std::string& strategy, const UserProblem& problem,
                           const MarginalCosts& costs, std::vector<double> controls);

std::vector<ScenarioResult> run_scenario(const ScenarioConfig& config);

/// Writes trajectory_<strategy>.csv per result, summary.csv and report.txt.
/// Returns the written paths.
std::vector<std::filesystem::path> emit_results(const std::vector<ScenarioResult>& results,
                                                const std::filesystem::path& out_dir,
                                                double dt_hours);

std::string format_report(const std::vector<ScenarioResult>& results);

/// Parsed trajectory CSV, for recomputing bills from emitted files.
struct TrajectoryTable {
    std::vector<double> hours;
    std::vector<double> u_c;
    std::vector<double> g_kw;
    std::vector<std::vector<double>> wall;  // per row, M entries
};

TrajectoryTable read_trajectory_csv(const std::filesystem::path& path);

struct SummaryRow {
    std::string strategy;
    double energy_usd = 0.0;
    double demand_usd = 0.0;
    double total_usd = 0.0;
    double peak_kw = 0.0;
    double production_usd = 0.0;
    double gamma_w = 0.0;
};

std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path);

/// Reads a control sequence: one value per line or comma separated, optional
/// `u_c` header.
std::vector<double> load_controls_csv(const std::filesystem::path& path);

}  // namespace thermo

#endif  // THERMO_SCENARIO_IO_HPP
