#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mfg/params.hpp"
#include "mfg/rng.hpp"
#include "oracles.hpp"

using namespace mfg;

namespace {

double quad(const ModelParams& prm, double k) {
    return 0.5 * prm.gamma * prm.gamma * k * (k - 1.0) + prm.delta * k - prm.r;
}

ModelParams make(double delta, double gamma, double r) {
    ModelParams prm = default_params();
    prm.delta = delta;
    prm.gamma = gamma;
    prm.r = r;
    return prm;
}

}  // namespace

TEST_CASE("characteristic exponents at the default coefficients") {
    const auto exps = compute_exponents(make(1.0, 2.0, 3.0));
    CHECK(exps.m == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(exps.n == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("roots match a generic quadratic oracle") {
    const auto prm = make(0.5, 1.0, 2.0);
    const auto exps = compute_exponents(prm);
    // (gamma^2/2) k^2 + (delta - gamma^2/2) k - r = 0 via the generic formula
    const auto [lo, hi] = oracle::solve_quadratic(
        0.5 * prm.gamma * prm.gamma, prm.delta - 0.5 * prm.gamma * prm.gamma, -prm.r);
    CHECK(std::abs(exps.m - lo) < 1e-12 * std::max(1.0, std::abs(lo)));
    CHECK(std::abs(exps.n - hi) < 1e-12 * std::max(1.0, std::abs(hi)));
    // this configuration is symmetric: roots are exactly -2 and 2
    CHECK(exps.m == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(exps.n == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("root residual and ordering over random valid parameters") {
    PathRng rng(2024, 1);
    for (int i = 0; i < 200; ++i) {
        const double delta = 0.05 + 1.95 * rng.uniform01();
        const double gamma = 0.3 + 2.7 * rng.uniform01();
        const double r = delta + 0.2 + 3.0 * rng.uniform01();
        const auto prm = make(delta, gamma, r);
        const auto exps = compute_exponents(prm);
        const double tol = 1e-12 * std::max(1.0, r);
        CHECK(std::abs(quad(prm, exps.m)) < tol);
        CHECK(std::abs(quad(prm, exps.n)) < tol);
        CHECK(exps.m < 0.0);
        CHECK(exps.n > 1.0);
    }
}

TEST_CASE("compute_exponents rejects delta >= r and accepts delta just below") {
    CHECK_THROWS_AS(compute_exponents(make(1.0, std::sqrt(2.0), 1.0)), std::domain_error);
    CHECK_THROWS_AS(compute_exponents(make(3.0, 2.0, 3.0)), std::domain_error);
    const auto exps = compute_exponents(make(1.0 - 1e-9, std::sqrt(2.0), 1.0));
    CHECK(exps.n > 1.0);
    CHECK(exps.n < 1.0 + 1e-8);
    CHECK(exps.m == doctest::Approx(-1.0).epsilon(1e-7));
}

TEST_CASE("validate reports the strict assumption as a warning, not a gate") {
    SUBCASE("default coefficients violate it") {
        const auto rep = validate(default_params());
        CHECK_FALSE(rep.strict_ok);   // 2*1 + 4 = 6 >= 3
        CHECK(rep.nondegenerate_ok);  // 2*delta/gamma^2 = 0.5, alpha = 0.6
        CHECK_FALSE(rep.contraction_ok.has_value());
        CHECK(!rep.messages.empty());
    }
    SUBCASE("small coefficients satisfy it") {
        const auto rep = validate(make(0.1, 0.5, 1.0));
        CHECK(rep.strict_ok);  // 0.2 + 0.25 < 1
    }
}

TEST_CASE("degenerate exponent configurations are flagged") {
    ModelParams prm = default_params();
    prm.alpha = prm.nu();  // exactly 2*delta/gamma^2
    CHECK_FALSE(validate(prm).nondegenerate_ok);

    prm = make(2.0, 2.0, 3.0);  // nu = 1 exactly
    CHECK_FALSE(validate(prm).nondegenerate_ok);

    prm = default_params();
    prm.alpha = prm.nu() + 1e-10;  // inside the exclusion tolerance
    CHECK_FALSE(validate(prm).nondegenerate_ok);
    prm.alpha = prm.nu() + 1e-6;
    CHECK(validate(prm).nondegenerate_ok);
}

TEST_CASE("validate never throws and reports range violations") {
    ModelParams prm = default_params();
    prm.gamma = -1.0;
    prm.alpha = 1.2;
    const auto rep = validate(prm);
    CHECK_FALSE(rep.ranges_ok);
    CHECK(!rep.messages.empty());

    prm.gamma = std::nan("");
    CHECK_NOTHROW(validate(prm));
}

TEST_CASE("contraction flag settles once the slope is supplied") {
    const auto prm = default_params();
    const auto ok = validate(prm, 0.07);
    REQUIRE(ok.contraction_ok.has_value());
    CHECK(*ok.contraction_ok);
    const auto bad = validate(prm, 1.3);
    REQUIRE(bad.contraction_ok.has_value());
    CHECK_FALSE(*bad.contraction_ok);
}
