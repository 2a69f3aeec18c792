#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "decay/observables.hpp"

namespace decay {

struct ScenarioConfig {
    std::string name = "custom";
    ModelParams params;
    InitialStateSpec spec;
    // time grid, log-spaced, in units of tau1 (units of a^2 for the free limit)
    double grid_lo = 1e-3;
    double grid_hi = 1e3;
    int grid_points = 400;
    std::string out_dir;  // empty: <output root>/<name>
    FormPolicy policy = FormPolicy::Auto;
    double switch_tau = 300.0;
    bool free_limit = false;  // lambda = 0: wave-function decay at a fixed point
    double r1 = 0.3, r2 = 0.7;  // fixed point, in units of a
    bool auto_fits = true;
    std::vector<std::pair<double, double>> fit_windows;  // extra semilog windows in tau1
    std::vector<std::string> expected_regimes;           // e.g. "exp(6,6)", checked in order
};

std::vector<ScenarioConfig> builtin_scenarios();
ScenarioConfig builtin_scenario(const std::string& name);

// key = value lines, '#' comments.  Keys: name, scenario (builtin base),
// lambda, a, poles, kind, alpha, beta, grid (lo:hi:points), policy,
// switch_tau, out, r1, r2, fits (auto or lo:hi[,lo:hi...]), expect (labels).
ScenarioConfig parse_config(std::istream& in, const std::string& source = "<config>");
ScenarioConfig load_config(const std::string& path);

// Parses "lo:hi:points".
void parse_grid(const std::string& text, ScenarioConfig& cfg);

// Throws ConfigError with a field name.  With check_output the output
// directory is created and probed for writing.
void validate_config(const ScenarioConfig& cfg, bool check_output = true);

struct InvariantCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunReport {
    std::string output_dir;
    std::vector<InvariantCheck> checks;
    std::vector<Regime> regimes;
    bool ok() const;
};

// Output directory root from DECAY_OUTPUT_ROOT, else "out".
std::string output_root();

// Builds pole and overlap tables without writing anything.
std::vector<InvariantCheck> dry_run(const ScenarioConfig& cfg);

RunReport run_scenario(const ScenarioConfig& cfg, std::ostream& log);

}  // namespace decay
