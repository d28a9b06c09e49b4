#include "thermo/scenario_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace thermo {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::optional<double> to_double(const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || t.empty()) return std::nullopt;
    return v;
}

double parse_double(const std::string& key, const std::string& text) {
    if (const auto v = to_double(text)) return *v;
    throw std::invalid_argument("config key '" + key + "': '" + text + "' is not a number");
}

int parse_int(const std::string& key, const std::string& text) {
    const double v = parse_double(key, text);
    if (v != std::floor(v)) throw std::invalid_argument("config key '" + key + "' must be an integer");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw std::invalid_argument("config key '" + key + "': '" + text + "' is not a boolean");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_double(key, item));
    return out;
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::vector<std::vector<std::string>> read_csv_rows(const fs::path& path, std::string& header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        if (!have_header) {
            header = line;
            have_header = true;
            continue;
        }
        rows.push_back(split(line, ','));
    }
    if (!have_header) throw IoError("'" + path.string() + "' is empty");
    return rows;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "alpha", "l_in", "r_e", "c_in", "m", "dt_hours", "clamp_power_at_zero",
        "t_min", "t_max",
        "p_on", "p_off", "p_d", "on_peak_start_hour", "on_peak_end_hour", "days", "demand_term",
        "t_init", "exterior_csv",
        "grid_nodes", "grid_margin", "du", "boundary_control", "symmetry", "threads",
        "gamma_mode", "gamma_lo", "gamma_hi", "b_max", "scan_points",
        "precool_hours", "strategies",
        "marginal_a", "marginal_b",
        "price_step_d", "price_step_on", "price_epsilon", "diagonal_only", "shrink_on_fail",
        "price_min_step", "price_max_iterations", "price_init", "init_p_on", "init_p_d",
        "output_dir", "controls_csv",
    };
    return keys;
}

// ---------------------------------------------------------------------------
// KeyValueConfig

KeyValueConfig KeyValueConfig::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.parent_path());
}

KeyValueConfig KeyValueConfig::parse(const std::string& text, const fs::path& base_dir) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    const auto& keys = config_keys();
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        cfg.entries_[key] = Entry{trim(line.substr(eq + 1)), base_dir};
    }
    return cfg;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
        throw std::invalid_argument("unknown config key '" + key + "'");
    entries_[key] = Entry{trim(value), {}};
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second.value;
}

std::optional<fs::path> KeyValueConfig::get_path(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end() || it->second.value.empty()) return std::nullopt;
    fs::path p(it->second.value);
    if (p.is_relative() && !it->second.base_dir.empty()) p = it->second.base_dir / p;
    return p;
}

// ---------------------------------------------------------------------------
// ScenarioConfig

ScenarioConfig ScenarioConfig::from(const KeyValueConfig& kv) {
    ScenarioConfig c;
    auto num = [&](const char* key, double& dst) {
        if (const auto v = kv.get(key)) dst = parse_double(key, *v);
    };
    auto integer = [&](const char* key, int& dst) {
        if (const auto v = kv.get(key)) dst = parse_int(key, *v);
    };
    auto flag = [&](const char* key, bool& dst) {
        if (const auto v = kv.get(key)) dst = parse_bool(key, *v);
    };

    num("alpha", c.alpha);
    num("l_in", c.l_in);
    num("r_e", c.r_e);
    num("c_in", c.c_in);
    integer("m", c.m);
    num("dt_hours", c.dt_hours);
    flag("clamp_power_at_zero", c.clamp_power_at_zero);
    num("t_min", c.band.t_min);
    num("t_max", c.band.t_max);
    num("p_on", c.prices.p_on);
    num("p_off", c.prices.p_off);
    num("p_d", c.prices.p_d);
    num("on_peak_start_hour", c.on_peak_start_hour);
    num("on_peak_end_hour", c.on_peak_end_hour);
    integer("days", c.days);
    if (const auto v = kv.get("demand_term")) {
        if (*v == "per_day") c.demand_term = DemandTerm::per_day;
        else if (*v == "single") c.demand_term = DemandTerm::single;
        else throw std::invalid_argument("demand_term must be per_day or single");
    }
    if (const auto v = kv.get("t_init"); v && !v->empty() && *v != "t_max")
        c.t_init = parse_list("t_init", *v);
    if (const auto p = kv.get_path("exterior_csv")) c.exterior_csv = *p;

    integer("grid_nodes", c.dp.grid_nodes);
    num("grid_margin", c.dp.grid_margin);
    num("du", c.dp.du);
    flag("boundary_control", c.dp.boundary_control);
    flag("symmetry", c.dp.exploit_symmetry);
    integer("threads", c.dp.threads);

    if (const auto v = kv.get("gamma_mode")) c.gamma.mode = parse_gamma_mode(*v);
    num("gamma_lo", c.gamma.gamma_lo);
    num("gamma_hi", c.gamma.gamma_hi);
    integer("b_max", c.gamma.b_max);
    integer("scan_points", c.gamma.scan_points);

    num("precool_hours", c.precool_hours);
    if (const auto v = kv.get("strategies")) {
        c.strategies.clear();
        for (auto& s : split(*v, ','))
            if (!s.empty()) c.strategies.push_back(s);
    }

    num("marginal_a", c.marginal.a);
    num("marginal_b", c.marginal.b);
    num("price_step_d", c.pricing.step_d);
    num("price_step_on", c.pricing.step_on);
    num("price_epsilon", c.pricing.epsilon);
    flag("diagonal_only", c.pricing.diagonal_only);
    flag("shrink_on_fail", c.pricing.shrink_on_fail);
    num("price_min_step", c.pricing.min_step);
    integer("price_max_iterations", c.pricing.max_iterations);
    if (const auto v = kv.get("price_init")) c.price_init = *v;
    num("init_p_on", c.init_p_on);
    num("init_p_d", c.init_p_d);

    if (const auto p = kv.get_path("output_dir")) c.output_dir = *p;
    if (const auto p = kv.get_path("controls_csv")) c.controls_csv = *p;
    c.validate();
    return c;
}

int ScenarioConfig::n_steps() const {
    return static_cast<int>(std::lround(24.0 / dt_hours)) * days;
}

BuildingParams ScenarioConfig::building() const {
    return BuildingParams::make(alpha, l_in, r_e, c_in, m, dt_hours * 3600.0, clamp_power_at_zero);
}

TariffSchedule ScenarioConfig::tariff() const {
    return TariffSchedule::from_hours(prices, on_peak_start_hour, on_peak_end_hour, days, dt_hours,
                                      demand_term);
}

WallState ScenarioConfig::initial_state() const {
    if (t_init.empty()) return WallState::uniform(m, band.t_max);
    if (t_init.size() == 1) return WallState::uniform(m, t_init.front());
    if (t_init.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("t_init needs 1 or M values");
    return WallState{t_init};
}

void ScenarioConfig::validate() const {
    (void)building();
    (void)tariff();
    (void)initial_state();
    if (!(band.t_min < band.t_max)) throw std::invalid_argument("t_min must be below t_max");
    for (const auto& s : strategies) {
        if (s != "optimal" && s != "constant" && s != "precool" && s != "prices" && s != "simulated")
            throw std::invalid_argument("unknown strategy '" + s + "'");
    }
    if (price_init != "proportional" && price_init != "simplex")
        throw std::invalid_argument("price_init must be proportional or simplex");
}

UserProblem ScenarioConfig::user_problem() const {
    if (exterior_csv.empty()) throw std::invalid_argument("config does not name an exterior_csv");
    const int n = n_steps();
    return UserProblem{building(), tariff(), load_exterior_csv(exterior_csv, dt_hours, n), band,
                       initial_state()};
}

// ---------------------------------------------------------------------------
// Exterior trace

ExteriorTrace load_exterior_csv(const fs::path& path, double dt_hours, int horizon) {
    std::ifstream in(path);
    if (!in) throw IoError("exterior trace: cannot open '" + path.string() + "'");
    if (!(dt_hours > 0.0) || horizon < 1) throw std::invalid_argument("exterior trace: bad dt or horizon");

    std::vector<double> hours;
    std::vector<double> temps;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        if (!have_header) {
            if (line != "hour,temp_c")
                throw IoError("exterior trace: expected header 'hour,temp_c', found '" + line + "'");
            have_header = true;
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != 2)
            throw IoError("exterior trace: line " + std::to_string(lineno) + " does not have two columns");
        const auto h = to_double(cells[0]);
        const auto t = to_double(cells[1]);
        if (!h || !t || !std::isfinite(*h) || !std::isfinite(*t))
            throw IoError("exterior trace: non-numeric cell on line " + std::to_string(lineno));
        if (!hours.empty() && !(*h > hours.back()))
            throw IoError("exterior trace: hours not increasing at line " + std::to_string(lineno));
        hours.push_back(*h);
        temps.push_back(*t);
    }
    if (!have_header) throw IoError("exterior trace: '" + path.string() + "' is empty");
    if (hours.empty()) throw IoError("exterior trace: no samples");

    const double last_interval = hours.size() > 1 ? hours.back() - hours[hours.size() - 2] : 1.0;
    const double covered = hours.back() + last_interval;
    const double needed = hours.front() + (horizon - 1) * dt_hours;
    if (!(needed < covered - 1e-9))
        throw IoError("exterior trace: too few samples: " + std::to_string(hours.size()) +
                      " rows cover " + std::to_string(covered - hours.front()) + " h, horizon needs " +
                      std::to_string(horizon * dt_hours) + " h");

    ExteriorTrace trace;
    trace.temps.reserve(static_cast<std::size_t>(horizon));
    std::size_t seg = 0;
    for (int k = 0; k < horizon; ++k) {
        const double t = hours.front() + k * dt_hours;
        if (t >= hours.back()) {
            trace.temps.push_back(temps.back());
            continue;
        }
        while (hours[seg + 1] <= t) ++seg;
        const double w = (t - hours[seg]) / (hours[seg + 1] - hours[seg]);
        trace.temps.push_back(w == 0.0 ? temps[seg] : temps[seg] + w * (temps[seg + 1] - temps[seg]));
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Orchestration

ScenarioResult make_result(const std::string& strategy, const UserProblem& problem,
                           const MarginalCosts& costs, std::vector<double> controls) {
    StrategyOutcome o = evaluate_strategy(problem, std::move(controls));
    ScenarioResult r;
    r.strategy = strategy;
    r.controls = std::move(o.controls);
    r.trajectory = std::move(o.trajectory);
    r.prices = problem.tariff.prices();
    r.bill = o.bill;
    r.peak_kw = o.bill.peak_kw;
    r.production_cost = production_cost(costs, problem.tariff, r.trajectory.powers_w);
    return r;
}

std::vector<ScenarioResult> run_scenario(const ScenarioConfig& config) {
    const UserProblem problem = config.user_problem();
    const int n = problem.tariff.n_steps();
    std::vector<ScenarioResult> results;

    for (const auto& strategy : config.strategies) {
        try {
            if (strategy == "constant") {
                results.push_back(make_result("constant", problem, config.marginal,
                                              constant_strategy(problem.band, n)));
            } else if (strategy == "precool") {
                ScenarioResult r = make_result(
                    "precool", problem, config.marginal,
                    precool_strategy(problem.band, problem.tariff, config.precool_hours, n));
                r.notes.push_back("precool window " + fmt6(config.precool_hours) + " h before on-peak");
                results.push_back(std::move(r));
            } else if (strategy == "simulated") {
                if (config.controls_csv.empty()) throw std::invalid_argument("simulated strategy needs controls_csv");
                results.push_back(make_result("simulated", problem, config.marginal,
                                              load_controls_csv(config.controls_csv)));
            } else if (strategy == "optimal") {
                const DpSolver solver(problem, config.dp);
                const GammaSearchResult search = solver.solve(config.gamma);
                RolloutResult roll = solver.rollout(search.solution.policy);
                ScenarioResult r = make_result("optimal", problem, config.marginal, roll.controls);
                r.gamma_w = search.gamma_w;
                r.clamps = search.solution.clamps + roll.clamps;
                r.iterations = search.solves;
                r.notes.push_back(std::string("gamma mode ") + to_string(search.mode) + ", V0(T0) = " +
                                  fmt6(search.value) + " $, " + std::to_string(search.solves) + " DP solves");
                results.push_back(std::move(r));
            } else if (strategy == "prices") {
                const PriceOptimizer opt(problem, config.dp, config.gamma, config.marginal);
                const PricePoint init = config.price_init == "proportional"
                                            ? PricePoint::normalize(config.prices)
                                            : PricePoint::on_simplex(config.init_p_on, config.init_p_d);
                const PricingResult pr = opt.pattern_search(init, config.pricing);
                UserProblem scaled = problem;
                scaled.tariff = problem.tariff.with_prices(pr.optimal_prices.prices());
                ScenarioResult r = make_result("optimal_prices", scaled, config.marginal, pr.response.controls);
                r.gamma_w = pr.response.gamma_w;
                r.iterations = pr.iterations;
                r.notes.push_back("initial production cost " + fmt6(pr.cost_history.front()) + " $");
                r.notes.push_back("optimal prices [p_off, p_on, p_d] = [" + fmt6(pr.optimal_prices.p_off) + ", " +
                                  fmt6(pr.optimal_prices.p_on) + ", " + fmt6(pr.optimal_prices.p_d) + "]");
                r.notes.push_back(std::to_string(pr.iterations) + " accepted moves, " +
                                  std::to_string(pr.evaluations) + " price evaluations, gamma mode " +
                                  to_string(pr.mode));
                results.push_back(std::move(r));
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("strategy '" + strategy + "': " + e.what());
        }
    }
    return results;
}

// ---------------------------------------------------------------------------
// Output

std::string format_report(const std::vector<ScenarioResult>& results) {
    std::ostringstream out;
    out << "Thermostat scenario report\n";
    out << "==========================\n\n";
    for (const auto& r : results) {
        out << "strategy: " << r.strategy << "\n";
        out << "  prices [p_on, p_off, p_d]: " << fmt6(r.prices.p_on) << ", " << fmt6(r.prices.p_off) << ", "
            << fmt6(r.prices.p_d) << "\n";
        out << "  energy cost:     $" << fmt6(r.bill.energy_cost) << "\n";
        out << "  demand cost:     $" << fmt6(r.bill.demand_cost) << "\n";
        out << "  total bill:      $" << fmt6(r.bill.total) << "\n";
        out << "  on-peak peak:    " << fmt6(r.peak_kw) << " kW\n";
        out << "  production cost: $" << fmt6(r.production_cost) << "\n";
        if (r.gamma_w != 0.0) out << "  gamma:           " << fmt6(r.gamma_w) << " W\n";
        out << "  grid clamps:     " << r.clamps << "\n";
        for (const auto& n : r.notes) out << "  " << n << "\n";
        out << "\n";
    }
    return out.str();
}

std::vector<fs::path> emit_results(const std::vector<ScenarioResult>& results, const fs::path& out_dir,
                                   double dt_hours) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());
    std::vector<fs::path> written;

    auto open = [&](const fs::path& p) {
        std::ofstream f(p);
        if (!f) throw IoError("cannot write '" + p.string() + "'");
        written.push_back(p);
        return f;
    };

    for (const auto& r : results) {
        std::ofstream f = open(out_dir / ("trajectory_" + r.strategy + ".csv"));
        const std::size_t m = r.trajectory.states.empty() ? 0 : r.trajectory.states.front().size();
        f << "step,hour,u_c,g_kw";
        for (std::size_t i = 1; i <= m; ++i) f << ",wall_t" << i << "_c";
        f << "\n";
        for (std::size_t k = 0; k < r.controls.size(); ++k) {
            f << k << "," << fmt6(static_cast<double>(k) * dt_hours) << "," << fmt6(r.controls[k]) << ","
              << fmt6(r.trajectory.powers_w[k] / 1000.0);
            for (double t : r.trajectory.states[k].temps) f << "," << fmt6(t);
            f << "\n";
        }
        if (!f) throw IoError("write failed for trajectory of '" + r.strategy + "'");
    }

    {
        std::ofstream f = open(out_dir / "summary.csv");
        f << "strategy,energy_usd,demand_usd,total_usd,peak_kw,production_usd,gamma_w\n";
        for (const auto& r : results) {
            f << r.strategy << "," << fmt6(r.bill.energy_cost) << "," << fmt6(r.bill.demand_cost) << ","
              << fmt6(r.bill.total) << "," << fmt6(r.peak_kw) << "," << fmt6(r.production_cost) << ","
              << fmt6(r.gamma_w) << "\n";
        }
        if (!f) throw IoError("write failed for summary.csv");
    }
    {
        std::ofstream f = open(out_dir / "report.txt");
        f << format_report(results);
        if (!f) throw IoError("write failed for report.txt");
    }
    return written;
}

TrajectoryTable read_trajectory_csv(const fs::path& path) {
    std::string header;
    const auto rows = read_csv_rows(path, header);
    const auto cols = split(header, ',');
    if (cols.size() < 5 || cols[0] != "step" || cols[1] != "hour" || cols[2] != "u_c" || cols[3] != "g_kw")
        throw IoError("'" + path.string() + "' is not a trajectory CSV");
    TrajectoryTable t;
    for (const auto& row : rows) {
        if (row.size() != cols.size()) throw IoError("ragged row in '" + path.string() + "'");
        std::vector<double> v;
        for (std::size_t i = 1; i < row.size(); ++i) {
            const auto d = to_double(row[i]);
            if (!d) throw IoError("non-numeric cell in '" + path.string() + "'");
            v.push_back(*d);
        }
        t.hours.push_back(v[0]);
        t.u_c.push_back(v[1]);
        t.g_kw.push_back(v[2]);
        t.wall.emplace_back(v.begin() + 3, v.end());
    }
    return t;
}

std::vector<SummaryRow> read_summary_csv(const fs::path& path) {
    std::string header;
    const auto rows = read_csv_rows(path, header);
    if (header != "strategy,energy_usd,demand_usd,total_usd,peak_kw,production_usd,gamma_w")
        throw IoError("'" + path.string() + "' is not a summary CSV");
    std::vector<SummaryRow> out;
    for (const auto& row : rows) {
        if (row.size() != 7) throw IoError("ragged row in '" + path.string() + "'");
        SummaryRow s;
        s.strategy = row[0];
        double* fields[] = {&s.energy_usd, &s.demand_usd, &s.total_usd, &s.peak_kw, &s.production_usd, &s.gamma_w};
        for (std::size_t i = 0; i < 6; ++i) {
            const auto d = to_double(row[i + 1]);
            if (!d) throw IoError("non-numeric cell in '" + path.string() + "'");
            *fields[i] = *d;
        }
        out.push_back(s);
    }
    return out;
}

std::vector<double> load_controls_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open controls '" + path.string() + "'");
    std::vector<double> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line == "u_c") continue;
        for (const auto& cell : split(line, ',')) {
            if (cell.empty()) continue;
            const auto v = to_double(cell);
            if (!v) throw IoError("controls: non-numeric value on line " + std::to_string(lineno));
            out.push_back(*v);
        }
    }
    return out;
}

}  // namespace thermo
