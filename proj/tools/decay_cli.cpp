#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "decay/errors.hpp"
#include "decay/scenario.hpp"

using namespace decay;

namespace {

struct Overrides {
    std::string scenario, config, kind, grid, out, policy;
    double lambda = 0, a = 0;
    int poles = 0, alpha = 0, beta = 0;
    CLI::Option *o_lambda = nullptr, *o_a = nullptr, *o_poles = nullptr, *o_alpha = nullptr, *o_beta = nullptr;
};

void add_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--scenario", o.scenario, "builtin scenario (fig1, fig2, fig3, free)");
    cmd->add_option("--config", o.config, "key = value configuration file");
    o.o_lambda = cmd->add_option("--lambda", o.lambda, "barrier strength");
    o.o_a = cmd->add_option("--a", o.a, "shell radius");
    o.o_poles = cmd->add_option("--poles", o.poles, "number of proper poles N");
    cmd->add_option("--kind", o.kind, "factorized | symmetric | antisymmetric");
    o.o_alpha = cmd->add_option("--alpha", o.alpha, "first box index");
    o.o_beta = cmd->add_option("--beta", o.beta, "second box index");
    cmd->add_option("--grid", o.grid, "lo:hi:points in units of tau1");
    cmd->add_option("--policy", o.policy, "exact | asymptotic | auto");
    cmd->add_option("--out", o.out, "output directory");
}

ScenarioConfig build(const Overrides& o, bool writes_output) {
    ScenarioConfig cfg;
    if (!o.scenario.empty() && !o.config.empty()) throw ConfigError("--scenario and --config are exclusive");
    if (!o.scenario.empty()) cfg = builtin_scenario(o.scenario);
    if (!o.config.empty()) cfg = load_config(o.config);
    if (*o.o_lambda) cfg.params.lambda = o.lambda;
    if (*o.o_a) cfg.params.a = o.a;
    if (*o.o_poles) cfg.params.n_poles = o.poles;
    if (!o.kind.empty()) {
        try {
            cfg.spec.kind = parse_kind(o.kind);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("--kind: ") + e.what());
        }
    }
    if (*o.o_alpha) cfg.spec.alpha = o.alpha;
    if (*o.o_beta) cfg.spec.beta = o.beta;
    if (!o.grid.empty()) parse_grid(o.grid, cfg);
    if (!o.policy.empty()) {
        try {
            cfg.policy = parse_policy(o.policy);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("--policy: ") + e.what());
        }
    }
    if (!o.out.empty()) cfg.out_dir = o.out;
    validate_config(cfg, writes_output);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-particle decay through a delta-shell barrier"};
    app.require_subcommand(1);
    Overrides o;
    auto* run = app.add_subcommand("run", "run a scenario and write CSV/JSON outputs");
    auto* validate = app.add_subcommand("validate", "check a configuration and build pole/overlap tables");
    auto* poles = app.add_subcommand("poles", "print the pole table as CSV");
    app.add_subcommand("list", "list builtin scenarios");
    for (auto* c : {run, validate, poles}) add_options(c, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const std::string verb = app.get_subcommands().front()->get_name();
        if (verb == "list") {
            for (const auto& s : builtin_scenarios())
                std::printf("%-6s %-14s alpha=%d beta=%d lambda=%g grid=%g:%g:%d\n", s.name.c_str(), kind_name(s.spec.kind), s.spec.alpha,
                            s.spec.beta, s.params.lambda, s.grid_lo, s.grid_hi, s.grid_points);
            return 0;
        }
        const ScenarioConfig cfg = build(o, verb != "poles");
        if (verb == "poles") {
            write_pole_table(std::cout, PoleTable(cfg.params));
            return 0;
        }
        if (verb == "validate") {
            bool ok = true;
            for (const auto& c : dry_run(cfg)) {
                std::printf("%s %s  %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
                ok &= c.pass;
            }
            return ok ? 0 : 1;
        }
        const RunReport rep = run_scenario(cfg, std::cout);
        std::cout << "outputs in " << rep.output_dir << "\n";
        return rep.ok() ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
