#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "mfg/check.hpp"
#include "mfg/config.hpp"
#include "mfg/params.hpp"

using namespace mfg;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents) {
        path = std::string("test_config_") + std::to_string(rand()) + ".cfg";
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("defaults load when nothing is supplied") {
    const auto prm = load_params(std::nullopt, {});
    CHECK(prm.delta == 1.0);
    CHECK(prm.gamma == 2.0);
    CHECK(prm.r == 3.0);
    CHECK(prm.alpha == 0.6);
    CHECK(prm.lambda == 0.6);
    CHECK(prm.p == 0.5);
    CHECK(prm.c == 1.0);
    CHECK(prm.a0 == 1.0);
    CHECK(prm.a1 == 0.1);
}

TEST_CASE("file values load and flags take precedence") {
    TempFile f("# comment line\nlambda = 0.3\ndelta=0.8  # trailing comment\n\n");
    const auto from_file = load_params(f.path, {});
    CHECK(from_file.lambda == 0.3);
    CHECK(from_file.delta == 0.8);
    CHECK(from_file.gamma == 2.0);  // untouched default

    const auto overridden = load_params(f.path, {{"lambda", 0.6}});
    CHECK(overridden.lambda == 0.6);  // flag wins over file
    CHECK(overridden.delta == 0.8);
}

TEST_CASE("unknown keys and malformed lines are named in the error") {
    TempFile bad_key("unknown_thing = 3\n");
    CHECK_THROWS_WITH_AS(load_params(bad_key.path, {}),
                         doctest::Contains("unknown_thing"), ConfigError);

    TempFile bad_line("delta 0.5\n");
    CHECK_THROWS_AS(load_params(bad_line.path, {}), ConfigError);

    TempFile bad_value("delta = sideways\n");
    CHECK_THROWS_WITH_AS(load_params(bad_value.path, {}), doctest::Contains("delta"),
                         ConfigError);

    CHECK_THROWS_AS(load_params(std::string("no_such_file.cfg"), {}), ConfigError);
    CHECK_THROWS_WITH_AS(load_params(std::nullopt, {{"omega", 1.0}}),
                         doctest::Contains("omega"), ConfigError);
}

TEST_CASE("out-of-range values are rejected naming the invariant") {
    CHECK_THROWS_WITH_AS(load_params(std::nullopt, {{"alpha", 1.2}}),
                         doctest::Contains("alpha in (0,1)"), ConfigError);
    CHECK_THROWS_WITH_AS(load_params(std::nullopt, {{"gamma", -2.0}}),
                         doctest::Contains("gamma > 0"), ConfigError);
    CHECK_THROWS_WITH_AS(load_params(std::nullopt, {{"a1", -0.1}}),
                         doctest::Contains("a1 >= 0"), ConfigError);
}

TEST_CASE("environment variable supplies the default config path") {
    TempFile f("delta = 0.75\n");
    unsetenv(kConfigEnvVar);
    CHECK_FALSE(resolve_config_path(std::nullopt).has_value());

    setenv(kConfigEnvVar, f.path.c_str(), 1);
    const auto from_env = resolve_config_path(std::nullopt);
    REQUIRE(from_env.has_value());
    CHECK(load_params(from_env, {}).delta == 0.75);

    // an explicit path wins over the environment
    TempFile g("delta = 0.25\n");
    const auto explicit_path = resolve_config_path(g.path);
    REQUIRE(explicit_path.has_value());
    CHECK(load_params(explicit_path, {}).delta == 0.25);
    unsetenv(kConfigEnvVar);
}

TEST_CASE("parameter echo covers every field in fixed order") {
    const auto items = param_items(default_params());
    REQUIRE(items.size() == 9);
    CHECK(items.front().first == "delta");
    CHECK(items.back().first == "a1");
}

TEST_CASE("check passes at the defaults with the strictness warning") {
    CheckOptions opt;
    opt.sim_paths = 2000;  // keep the unit test quick
    opt.sim_ks_bound = 0.06;
    const auto rep = run_check(default_params(), opt);
    CHECK(rep.all_pass);
    CHECK(rep.first_failure().empty());
    bool strict_warned = false;
    for (const auto& w : rep.warnings) {
        if (w.find("2*delta+gamma^2") != std::string::npos) strict_warned = true;
    }
    CHECK(strict_warned);
}

TEST_CASE("check fails naming non-degeneracy when alpha collides") {
    ModelParams prm = default_params();
    prm.alpha = prm.nu();
    CheckOptions opt;
    opt.run_simulation = false;
    const auto rep = run_check(prm, opt);
    CHECK_FALSE(rep.all_pass);
    CHECK(rep.first_failure() == "non-degeneracy");
}

TEST_CASE("check fails naming the contraction when demand is too steep") {
    ModelParams prm = default_params();
    prm.a1 = 2.0;
    CheckOptions opt;
    opt.run_simulation = false;
    const auto rep = run_check(prm, opt);
    CHECK_FALSE(rep.all_pass);
    CHECK(rep.first_failure() == "price map contraction");
}

TEST_CASE("check fails on range violations without throwing") {
    ModelParams prm = default_params();
    prm.p = -1.0;
    CheckOptions opt;
    opt.run_simulation = false;
    CheckReport rep;
    CHECK_NOTHROW(rep = run_check(prm, opt));
    CHECK_FALSE(rep.all_pass);
    CHECK(rep.first_failure() == "parameter ranges");
}
