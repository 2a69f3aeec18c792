#include "decay/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "decay/errors.hpp"

namespace decay {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

double to_double(const std::string& v, const std::string& where) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected a number, got '" + v + "'");
    }
}

int to_int(const std::string& v, const std::string& where) {
    try {
        std::size_t used = 0;
        const int x = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected an integer, got '" + v + "'");
    }
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

void add(std::vector<InvariantCheck>& checks, std::string name, bool pass, std::string detail) {
    checks.push_back({std::move(name), pass, std::move(detail)});
}

std::vector<int> box_indices(const InitialStateSpec& spec) {
    if (spec.factorized() || spec.beta == spec.alpha) return {spec.alpha};
    return {spec.alpha, spec.beta};
}

std::string out_dir_for(const ScenarioConfig& cfg) {
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    return (fs::path(output_root()) / cfg.name).string();
}

void write_checks(const fs::path& dir, const std::vector<InvariantCheck>& checks) {
    std::ofstream os(dir / "summary.txt");
    for (const auto& c : checks) os << (c.pass ? "PASS " : "FAIL ") << c.name << "  " << c.detail << "\n";
}

RunReport run_free(const ScenarioConfig& cfg, std::ostream& log) {
    RunReport rep;
    rep.output_dir = out_dir_for(cfg);
    const fs::path dir(rep.output_dir);
    fs::create_directories(dir);
    const double a = cfg.params.a;
    const double r1 = cfg.r1 * a, r2 = cfg.r2 * a;
    const auto grid = log_grid(cfg.grid_lo, cfg.grid_hi, cfg.grid_points);
    const int beta = cfg.spec.factorized() ? cfg.spec.alpha + 1 : cfg.spec.beta;
    const InitialStateSpec sym{Kind::EntangledSymmetric, cfg.spec.alpha, beta};
    const InitialStateSpec anti{Kind::EntangledAntisymmetric, cfg.spec.alpha, beta};
    std::vector<double> ts, ms, ma;
    std::ofstream os(dir / "free.csv");
    os << "t_abs,abs_psi_symmetric,abs_psi_antisymmetric\n";
    char buf[256];
    for (double g : grid) {
        const double t = g * a * a;
        const double s = std::abs(psi_free(sym, r1, r2, t, a));
        const double n = std::abs(psi_free(anti, r1, r2, t, a));
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t, s, n);
        os << buf;
        ts.push_back(t);
        ms.push_back(s);
        ma.push_back(n);
    }
    const double lo = ts.back() / 10.0;
    const SlopeFit fs_ = fit_slope(ts, ms, lo, ts.back(), Axis::Loglog);
    const SlopeFit fa = fit_slope(ts, ma, lo, ts.back(), Axis::Loglog);
    add(rep.checks, "free symmetric |psi| loglog slope -3 +- 0.1", std::abs(fs_.slope + 3.0) <= 0.1, fmt("slope %.4f", fs_.slope));
    add(rep.checks, "free antisymmetric |psi| loglog slope -5 +- 0.1", std::abs(fa.slope + 5.0) <= 0.1, fmt("slope %.4f", fa.slope));
    nlohmann::json j;
    j["scenario"] = cfg.name;
    j["fits"] = {{{"series", "abs_psi_symmetric"}, {"axis", "loglog"}, {"t_lo", lo}, {"t_hi", ts.back()}, {"slope", fs_.slope}, {"stderr", fs_.std_error}},
                 {{"series", "abs_psi_antisymmetric"}, {"axis", "loglog"}, {"t_lo", lo}, {"t_hi", ts.back()}, {"slope", fa.slope}, {"stderr", fa.std_error}}};
    std::ofstream(dir / "fits.json") << j.dump(2) << "\n";
    write_checks(dir, rep.checks);
    for (const auto& c : rep.checks) log << (c.pass ? "PASS " : "FAIL ") << c.name << "  " << c.detail << "\n";
    return rep;
}

}  // namespace

bool RunReport::ok() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string output_root() {
    const char* env = std::getenv("DECAY_OUTPUT_ROOT");
    return (env && *env) ? env : "out";
}

std::vector<ScenarioConfig> builtin_scenarios() {
    std::vector<ScenarioConfig> v;
    ScenarioConfig f1;
    f1.name = "fig1";
    f1.spec = {Kind::FactorizedSymmetric, 6, 6};
    f1.expected_regimes = {"exp(6,6)", "exp(1,1)"};
    v.push_back(f1);
    ScenarioConfig f2;
    f2.name = "fig2";
    f2.spec = {Kind::EntangledSymmetric, 1, 6};
    f2.expected_regimes = {"exp(1,6)", "exp(1,1)"};
    v.push_back(f2);
    ScenarioConfig f3;
    f3.name = "fig3";
    f3.spec = {Kind::EntangledAntisymmetric, 1, 6};
    f3.expected_regimes = {"exp(1,6)", "exp(1,2)", "mixed(1)"};
    v.push_back(f3);
    ScenarioConfig fr;
    fr.name = "free";
    fr.params.lambda = 0.0;
    fr.spec = {Kind::EntangledSymmetric, 1, 6};
    fr.free_limit = true;
    fr.grid_lo = 1.0;
    fr.grid_hi = 1e4;
    fr.grid_points = 200;
    v.push_back(fr);
    return v;
}

ScenarioConfig builtin_scenario(const std::string& name) {
    for (const auto& s : builtin_scenarios())
        if (s.name == name) return s;
    throw ConfigError("unknown scenario '" + name + "'");
}

void parse_grid(const std::string& text, ScenarioConfig& cfg) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("grid: expected lo:hi:points, got '" + text + "'");
    cfg.grid_lo = to_double(parts[0], "grid");
    cfg.grid_hi = to_double(parts[1], "grid");
    cfg.grid_points = to_int(parts[2], "grid");
}

ScenarioConfig parse_config(std::istream& in, const std::string& source) {
    ScenarioConfig cfg;
    std::string line;
    int lineno = 0;
    bool named = false;
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<int> lines;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
        entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        lines.push_back(lineno);
    }
    // a builtin base is applied first so that other keys override it
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i].first == "scenario") {
            const std::string where = source + ":" + std::to_string(lines[i]);
            try {
                cfg = builtin_scenario(entries[i].second);
            } catch (const ConfigError& e) {
                throw ConfigError(where + ": " + e.what());
            }
        }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& [key, value] = entries[i];
        const std::string where = source + ":" + std::to_string(lines[i]) + ": " + key;
        try {
            if (key == "scenario") continue;
            if (key == "name") {
                cfg.name = value;
                named = true;
            } else if (key == "lambda") cfg.params.lambda = to_double(value, where);
            else if (key == "a") cfg.params.a = to_double(value, where);
            else if (key == "poles") cfg.params.n_poles = to_int(value, where);
            else if (key == "kind") cfg.spec.kind = parse_kind(value);
            else if (key == "alpha") cfg.spec.alpha = to_int(value, where);
            else if (key == "beta") cfg.spec.beta = to_int(value, where);
            else if (key == "grid") parse_grid(value, cfg);
            else if (key == "policy") cfg.policy = parse_policy(value);
            else if (key == "switch_tau") cfg.switch_tau = to_double(value, where);
            else if (key == "out") cfg.out_dir = value;
            else if (key == "r1") cfg.r1 = to_double(value, where);
            else if (key == "r2") cfg.r2 = to_double(value, where);
            else if (key == "free") cfg.free_limit = (value == "true" || value == "1");
            else if (key == "expect") cfg.expected_regimes = split(value, ';');
            else if (key == "fits") {
                cfg.fit_windows.clear();
                cfg.auto_fits = false;
                for (const auto& w : split(value, ',')) {
                    if (w == "auto") {
                        cfg.auto_fits = true;
                        continue;
                    }
                    const auto lohi = split(w, ':');
                    if (lohi.size() != 2) throw ConfigError("expected lo:hi window, got '" + w + "'");
                    cfg.fit_windows.emplace_back(to_double(lohi[0], where), to_double(lohi[1], where));
                }
            } else throw ConfigError("unknown key");
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            throw ConfigError(msg.rfind(source, 0) == 0 ? msg : where + ": " + msg);
        } catch (const InvalidSpecError& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    if (!named && cfg.name == "custom") cfg.name = fs::path(source).stem().string();
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    return parse_config(in, path);
}

void validate_config(const ScenarioConfig& cfg, bool check_output) {
    try {
        cfg.params.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }
    if (!cfg.free_limit && cfg.params.lambda == 0.0) throw ConfigError("lambda: 0 only allowed with free = true");
    if (cfg.spec.alpha < 1 || (!cfg.spec.factorized() && cfg.spec.beta < 1)) throw ConfigError("alpha/beta: box indices must be >= 1");
    if (!cfg.free_limit) {
        try {
            cfg.spec.validate();
        } catch (const InvalidSpecError& e) {
            throw ConfigError(std::string("kind: ") + e.what());
        }
    }
    if (!(cfg.grid_lo > 0.0) || !(cfg.grid_hi > cfg.grid_lo) || cfg.grid_points < 2)
        throw ConfigError("grid: must be strictly increasing (0 < lo < hi, points >= 2)");
    if (!(cfg.switch_tau > 0.0)) throw ConfigError("switch_tau: must be > 0");
    if (!(cfg.r1 >= 0.0 && cfg.r1 <= 1.0 && cfg.r2 >= 0.0 && cfg.r2 <= 1.0) || (cfg.r1 == 1.0 && cfg.r2 == 1.0))
        throw ConfigError("r1/r2: fixed point must lie in [0, 1] (units of a), not both 1");
    for (const auto& [lo, hi] : cfg.fit_windows)
        if (!(hi > lo && lo > 0.0)) throw ConfigError("fits: window must satisfy 0 < lo < hi");
    if (!check_output) return;
    const std::string dir = out_dir_for(cfg);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("out: cannot create '" + dir + "': " + ec.message());
    const fs::path probe = fs::path(dir) / ".write_probe";
    {
        std::ofstream os(probe);
        if (!os) throw ConfigError("out: directory '" + dir + "' is not writable");
    }
    fs::remove(probe, ec);
}

std::vector<InvariantCheck> dry_run(const ScenarioConfig& cfg) {
    validate_config(cfg);
    std::vector<InvariantCheck> checks;
    if (cfg.free_limit) {
        add(checks, "free limit: no pole table needed", true, "");
        return checks;
    }
    const PoleTable table(cfg.params);
    add(checks, "pole table", true, std::to_string(table.n()) + " poles, tau1 = " + fmt("%.17g", table.tau1()));
    for (int s : box_indices(cfg.spec)) {
        const double d = sum_rule_defect(table, s);
        add(checks, "sum rule s=" + std::to_string(s), d <= 1e-3, fmt("defect %.3e", d));
    }
    const SeparableBasis basis(table);
    add(checks, "overlap tables", true, "basis dimension " + std::to_string(basis.dim()));
    return checks;
}

RunReport run_scenario(const ScenarioConfig& cfg, std::ostream& log) {
    validate_config(cfg);
    if (cfg.free_limit) return run_free(cfg, log);

    RunReport rep;
    rep.output_dir = out_dir_for(cfg);
    const fs::path dir(rep.output_dir);
    fs::create_directories(dir);

    const PoleTable table(cfg.params);
    {
        std::ofstream os(dir / "poles.csv");
        write_pole_table(os, table);
    }
    for (int s : box_indices(cfg.spec)) {
        const cplx sum = sum_rule_sum(table, s);
        add(rep.checks, "sum rule s=" + std::to_string(s), std::abs(sum.real() - 1.0) <= 1e-3,
            fmt("|Re - 1| = %.3e", std::abs(sum.real() - 1.0)) + fmt(", Im = %.3e", sum.imag()));
    }

    const DecayModel model(table, cfg.spec);
    const auto grid = log_grid(cfg.grid_lo, cfg.grid_hi, cfg.grid_points);
    SeriesOptions sopt;
    sopt.policy = cfg.policy;
    sopt.switch_tau = cfg.switch_tau;
    DecaySeries series;
    try {
        series = decay_series(model, grid, sopt);
        add(rep.checks, "P >= S - 1e-12 on every row", true, std::to_string(series.rows.size()) + " rows");
    } catch (const DataIntegrityError& e) {
        add(rep.checks, "P >= S - 1e-12 on every row", false, e.what());
        write_checks(dir, rep.checks);
        return rep;
    }
    {
        std::ofstream os(dir / "series.csv");
        write_series_csv(os, series);
    }
    add(rep.checks, "S, P within [-1e-12, 1 + 1e-9] (truncation diagnostic)", true,
        std::to_string(series.range_violations) + " rows outside");

    SeriesOptions xo = sopt;
    xo.policy = FormPolicy::Exact;
    const DecaySeries exact = cfg.policy == FormPolicy::Exact ? series : decay_series(model, grid, xo);
    xo.policy = FormPolicy::Asymptotic;
    const DecaySeries asym = decay_series(model, grid, xo);
    {
        std::ofstream os(dir / "series_asymptotic.csv");
        write_series_csv(os, asym);
    }
    {
        // inset data: purely exponential part and exponential plus mixed parts
        std::ofstream os(dir / "exponential_parts.csv");
        os << "t_abs,t_over_tau1,S_exact,S_pole_sum,S_pole_sum_plus_mixed\n";
        char buf[256];
        for (const auto& r : exact.rows) {
            const AmplitudeParts p = asymptotic_parts(model, r.t);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.t_over_tau1, r.S, std::norm(p.exponential),
                          std::norm(p.exponential + p.mixed));
            os << buf;
        }
    }

    // crossover of the long-time wave function at the fixed point
    const double a = cfg.params.a;
    const auto xgrid = log_grid(1.0, 1e4, 300);
    const Crossover cx = psi_crossover(table, cfg.spec, cfg.r1 * a, cfg.r2 * a, xgrid);
    add(rep.checks, "psi_asymptotic within 1% of psi_exact beyond a threshold", cx.found,
        cx.found ? fmt("threshold %.4g tau1", cx.threshold_tau1) + fmt(", worst %.3e beyond", cx.worst) : "never within [1, 1e4] tau1");
    if (cfg.spec.kind == Kind::EntangledAntisymmetric) {
        const cplx c = fit_antisymmetric_coefficient(table, cfg.spec, cfg.r1 * a, cfg.r2 * a, log_grid(1e3, 1e4, 40));
        const cplx want = antisymmetric_power_coefficient();
        add(rep.checks, "fitted t^-5 coefficient vs eta2^2 - 10 eta1 eta3 / 3 within 1e-3", std::abs(c - want) <= 1e-3 * std::abs(want),
            fmt("fit %.9e", c.real()) + fmt("%+.9ei", c.imag()));
    }

    // long-time power laws over the final decade
    const auto t = series.times();
    const double lo = t.back() / 10.0;
    const double target = cfg.spec.kind == Kind::EntangledAntisymmetric ? -10.0 : -6.0;
    const double tol = cfg.spec.kind == Kind::EntangledAntisymmetric ? 0.3 : 0.2;
    nlohmann::json fits = nlohmann::json::array();
    for (const auto& [label, y] : {std::pair{"S", series.S()}, std::pair{"P", series.P()}}) {
        try {
            const SlopeFit f = fit_slope(t, y, lo, t.back(), Axis::Loglog);
            add(rep.checks, std::string("final-decade loglog slope of ") + label, std::abs(f.slope - target) <= tol,
                fmt("slope %.4f", f.slope) + fmt(" (target %.0f)", target));
            fits.push_back({{"series", label}, {"axis", "loglog"}, {"t_lo", f.t_lo}, {"t_hi", f.t_hi}, {"slope", f.slope}, {"stderr", f.std_error}, {"points", f.points}});
        } catch (const FitError& e) {
            add(rep.checks, std::string("final-decade loglog slope of ") + label, false, e.what());
        }
    }

    std::ofstream txt(dir / "fits.txt");
    if (cfg.auto_fits) {
        rep.regimes = detect_regimes(model, series);
        for (const auto& r : rep.regimes) {
            char buf[256];
            std::snprintf(buf, sizeof buf, "%-12s [%10.4g, %10.4g] tau1  n=%3d  slope=%12.5g  target=%12.5g  rel=%.4f\n", r.label().c_str(),
                          r.fit.t_lo / series.tau1, r.fit.t_hi / series.tau1, r.fit.points, r.fit.slope, r.target, r.relative_error());
            txt << buf;
            fits.push_back({{"series", "S"}, {"regime", r.label()}, {"axis", r.fit.axis == Axis::Semilog ? "semilog" : "loglog"}, {"t_lo", r.fit.t_lo},
                            {"t_hi", r.fit.t_hi}, {"slope", r.fit.slope}, {"stderr", r.fit.std_error}, {"points", r.fit.points}, {"target", r.target}});
        }
        // expected regimes in order, each within 5%
        std::size_t pos = 0;
        for (const auto& want : cfg.expected_regimes) {
            bool found = false;
            for (; pos < rep.regimes.size(); ++pos)
                if (rep.regimes[pos].label() == want) {
                    found = true;
                    break;
                }
            if (!found) {
                add(rep.checks, "regime " + want, false, "not detected (in order)");
                pos = 0;
                continue;
            }
            const Regime& r = rep.regimes[pos];
            add(rep.checks, "regime " + want + " slope within 5%", r.relative_error() <= 0.05,
                fmt("slope %.5g", r.fit.slope) + fmt(" vs %.5g", r.target));
        }
        if (cfg.spec.kind == Kind::EntangledAntisymmetric) {
            bool diagonal = false;
            for (const auto& r : rep.regimes) diagonal |= (r.type == Regime::Type::Pair && r.p == r.q);
            add(rep.checks, "no -2 Gamma_p regime (antisymmetric)", !diagonal, diagonal ? "diagonal pair detected" : "none");
        }
    }
    for (const auto& [wlo, whi] : cfg.fit_windows) {
        try {
            const SlopeFit f = fit_slope(t, series.S(), wlo * series.tau1, whi * series.tau1, Axis::Semilog);
            char buf[256];
            std::snprintf(buf, sizeof buf, "window       [%10.4g, %10.4g] tau1  n=%3d  slope=%12.5g  (%.5g Gamma1)\n", wlo, whi, f.points, f.slope,
                          f.slope * series.tau1);
            txt << buf;
            fits.push_back({{"series", "S"}, {"axis", "semilog"}, {"t_lo", f.t_lo}, {"t_hi", f.t_hi}, {"slope", f.slope}, {"stderr", f.std_error}, {"points", f.points}});
        } catch (const FitError& e) {
            txt << "window [" << wlo << ", " << whi << "]: " << e.what() << "\n";
        }
    }
    nlohmann::json j;
    j["scenario"] = cfg.name;
    j["kind"] = kind_name(cfg.spec.kind);
    j["alpha"] = cfg.spec.alpha;
    j["beta"] = cfg.spec.beta;
    j["tau1"] = series.tau1;
    j["fits"] = fits;
    std::ofstream(dir / "fits.json") << j.dump(2) << "\n";

    write_checks(dir, rep.checks);
    for (const auto& c : rep.checks) log << (c.pass ? "PASS " : "FAIL ") << c.name << "  " << c.detail << "\n";
    return rep;
}

}  // namespace decay
