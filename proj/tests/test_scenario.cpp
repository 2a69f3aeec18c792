#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "decay/errors.hpp"
#include "decay/scenario.hpp"

using namespace decay;
namespace fs = std::filesystem;

namespace {
ScenarioConfig parse(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is, "test.cfg");
}

std::string error_of(const std::string& text) {
    try {
        validate_config(parse(text));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("decay_test_" + name);
    fs::remove_all(p);
    return p;
}
}  // namespace

TEST_CASE("builtin scenarios") {
    const auto all = builtin_scenarios();
    CHECK(all.size() == 4u);
    CHECK(builtin_scenario("fig1").spec.alpha == 6);
    CHECK(builtin_scenario("fig3").spec.kind == Kind::EntangledAntisymmetric);
    CHECK(builtin_scenario("free").free_limit);
    CHECK(builtin_scenario("free").params.lambda == 0.0);
    CHECK_THROWS_AS(builtin_scenario("fig9"), ConfigError);
}

TEST_CASE("config parsing") {
    const ScenarioConfig c = parse(
        "# comment\n"
        "name = trial\n"
        "lambda = 4.5\n"
        "a = 2\n"
        "poles = 12\n"
        "kind = anti   # trailing comment\n"
        "alpha = 2\n"
        "beta = 3\n"
        "grid = 0.01:100:50\n"
        "policy = exact\n"
        "fits = 0.1:1, 2:5\n"
        "expect = exp(1,2);mixed(1)\n");
    CHECK(c.name == "trial");
    CHECK(c.params.lambda == 4.5);
    CHECK(c.params.a == 2.0);
    CHECK(c.params.n_poles == 12);
    CHECK(c.spec.kind == Kind::EntangledAntisymmetric);
    CHECK(c.spec.beta == 3);
    CHECK(c.grid_points == 50);
    CHECK(c.grid_hi == 100.0);
    CHECK(c.policy == FormPolicy::Exact);
    CHECK_FALSE(c.auto_fits);
    REQUIRE(c.fit_windows.size() == 2u);
    CHECK(c.fit_windows[1].second == 5.0);
    REQUIRE(c.expected_regimes.size() == 2u);
    CHECK(c.expected_regimes[1] == "mixed(1)");

    // builtin base, then overrides regardless of order
    const ScenarioConfig d = parse("alpha = 2\nscenario = fig2\n");
    CHECK(d.spec.kind == Kind::EntangledSymmetric);
    CHECK(d.spec.alpha == 2);
    CHECK(d.name == "fig2");
}

TEST_CASE("config rejection names the field") {
    CHECK_THROWS_WITH_AS(parse("lambda = six\n"), doctest::Contains("test.cfg:1: lambda"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("\n\nfoo = 1\n"), doctest::Contains("test.cfg:3: foo"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("no equals sign\n"), doctest::Contains("test.cfg:1"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("grid = 1:2\n"), doctest::Contains("grid"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("kind = boson\n"), doctest::Contains("kind"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("scenario = nope\n"), doctest::Contains("unknown scenario"), ConfigError);
    CHECK(error_of("grid = 10:1:50\n").find("grid") != std::string::npos);
    CHECK(error_of("grid = 0:1:50\n").find("grid") != std::string::npos);
    CHECK(error_of("grid = 1:10:1\n").find("grid") != std::string::npos);
    CHECK(error_of("lambda = 0\n").find("lambda") != std::string::npos);
    CHECK(error_of("lambda = -1\n").find("params") != std::string::npos);
    CHECK(error_of("kind = anti\nalpha = 2\nbeta = 2\n").find("kind") != std::string::npos);
    CHECK(error_of("poles = 0\n").find("params") != std::string::npos);
    CHECK(error_of("r1 = 1.5\n").find("r1") != std::string::npos);
    CHECK(error_of("out = /proc/forbidden/x\n").find("out") != std::string::npos);
    CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("output root from the environment") {
    ::setenv("DECAY_OUTPUT_ROOT", "/tmp/somewhere", 1);
    CHECK(output_root() == "/tmp/somewhere");
    ::unsetenv("DECAY_OUTPUT_ROOT");
    CHECK(output_root() == "out");
}

TEST_CASE("dry run writes nothing but the directory") {
    ScenarioConfig c = builtin_scenario("fig2");
    c.out_dir = scratch("dry").string();
    const auto checks = dry_run(c);
    CHECK(checks.size() >= 3u);
    for (const auto& k : checks) CHECK(k.pass);
    CHECK(fs::is_empty(c.out_dir));
}

TEST_CASE("run writes the documented outputs") {
    ScenarioConfig c = builtin_scenario("fig1");
    c.out_dir = scratch("run").string();
    c.grid_points = 200;
    std::ostringstream log;
    const RunReport r = run_scenario(c, log);
    for (const char* f : {"poles.csv", "series.csv", "series_asymptotic.csv", "exponential_parts.csv", "fits.txt", "fits.json", "summary.txt"})
        CHECK(fs::exists(fs::path(c.out_dir) / f));
    CHECK(r.ok());
    CHECK(log.str().find("FAIL") == std::string::npos);
    std::ifstream js(fs::path(c.out_dir) / "fits.json");
    const auto j = nlohmann::json::parse(js);
    CHECK(j["kind"] == "factorized");
    CHECK(j["fits"].size() >= 3u);
    std::ifstream series(fs::path(c.out_dir) / "series.csv");
    int lines = 0;
    for (std::string l; std::getline(series, l);) ++lines;
    CHECK(lines == 201);
}

TEST_CASE("free-limit run") {
    ScenarioConfig c = builtin_scenario("free");
    c.out_dir = scratch("free").string();
    std::ostringstream log;
    const RunReport r = run_scenario(c, log);
    CHECK(r.ok());
    CHECK(fs::exists(fs::path(c.out_dir) / "free.csv"));
}
