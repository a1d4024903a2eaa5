#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfg/params.hpp"
#include "mfg/rng.hpp"
#include "mfg/single_agent.hpp"
#include "oracles.hpp"

using namespace mfg;

namespace {

// Reference values for the default parameter set at rho = 1, frozen from an
// independent bracketing root-finder and nonlinear-system solve.
constexpr double kY0Ref = 70.0562248627704;
constexpr double kXbRef = 0.0686117266056808;
constexpr double kXsRef = 4.8066785473105;
constexpr double kARef = 0.000560337954783117;
constexpr double kBRef = 0.0270161196880966;
constexpr double kC1Ref = 0.0439203950190375;
constexpr double kC2Ref = 0.214148268217467;

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return g;
}

}  // namespace

TEST_CASE("band-ratio function approaches 1 at the left edge and 0 at infinity") {
    const auto exps = compute_exponents(default_params());
    CHECK(f_ratio(1.0 + 1e-8, exps, 0.6) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(f_ratio(1e6, exps, 0.6) < 0.01);
    CHECK_THROWS_AS(f_ratio(1.0, exps, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(f_ratio(0.5, exps, 0.6), std::invalid_argument);
}

TEST_CASE("solve_y0 satisfies the defining equation to 1e-12") {
    const auto prm = default_params();
    const auto exps = compute_exponents(prm);
    const double y0 = solve_y0(prm.lambda, exps, prm.alpha);
    CHECK(std::abs(f_ratio(y0, exps, prm.alpha) - (1.0 - prm.lambda)) < 1e-12);
    CHECK(std::abs(y0 - kY0Ref) < 1e-7);
}

TEST_CASE("solve_y0 behaves at the lambda boundaries and increases in lambda") {
    const auto exps = compute_exponents(default_params());
    // F approaches 1 cubically at y = 1+ (F - 1 ~ -(y-1)^3/30 here), so tiny
    // lambda still leaves a visible band; reference roots from 50-digit
    // arithmetic.
    CHECK(solve_y0(1e-6, exps, 0.6) == doctest::Approx(1.03156114749302583).epsilon(1e-10));
    CHECK(solve_y0(1e-4, exps, 0.6) == doctest::Approx(1.15526251849744809).epsilon(1e-10));
    CHECK_THROWS_AS(solve_y0(0.0, exps, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(solve_y0(1.0, exps, 0.6), std::invalid_argument);

    double prev = 1.0;
    for (double lambda = 0.1; lambda < 0.95; lambda += 0.1) {
        const double y0 = solve_y0(lambda, exps, 0.6);
        CHECK(y0 > prev);
        prev = y0;
    }
}

TEST_CASE("thresholds at the default parameters and the price power law") {
    const auto prm = default_params();
    const auto exps = compute_exponents(prm);
    const double y0 = solve_y0(prm.lambda, exps, prm.alpha);

    const auto pol1 = solve_thresholds(1.0, prm, exps, y0);
    CHECK(pol1.x_b == doctest::Approx(kXbRef).epsilon(1e-9));
    CHECK(pol1.x_s == doctest::Approx(kXsRef).epsilon(1e-9));
    CHECK(pol1.ratio() == doctest::Approx(y0).epsilon(1e-14));

    const auto pol2 = solve_thresholds(2.0, prm, exps, y0);
    const double expected = std::pow(2.0, 1.0 / (1.0 - prm.alpha));  // 2^2.5
    CHECK(pol2.x_b / pol1.x_b == doctest::Approx(expected).epsilon(1e-12));
    CHECK(pol2.x_s / pol1.x_s == doctest::Approx(expected).epsilon(1e-12));

    CHECK_THROWS_AS(solve_thresholds(0.0, prm, exps, y0), std::invalid_argument);
    CHECK_THROWS_AS(solve_thresholds(-1.0, prm, exps, y0), std::invalid_argument);
}

TEST_CASE("value-function coefficients match the frozen reference") {
    const auto v = solve_single_agent(1.0, default_params());
    CHECK(v.H == doctest::Approx(25.0 / 72.0).epsilon(1e-14));
    CHECK(v.A == doctest::Approx(kARef).epsilon(1e-8));
    CHECK(v.B == doctest::Approx(kBRef).epsilon(1e-9));
    CHECK(v.C1 == doctest::Approx(kC1Ref).epsilon(1e-9));
    CHECK(v.C2 == doctest::Approx(kC2Ref).epsilon(1e-9));
}

TEST_CASE("smooth fit holds at both thresholds") {
    const auto v = solve_single_agent(1.0, default_params());
    for (double res : smooth_fit_relative_residuals(v)) CHECK(res < 1e-8);
    CHECK(v.deriv(v.policy.x_b) == doctest::Approx(v.params.p).epsilon(1e-10));
    CHECK(v.deriv(v.policy.x_s) == doctest::Approx(v.params.sell_gain()).epsilon(1e-10));
}

TEST_CASE("least-squares re-solve of the smooth-fit system reproduces the coefficients") {
    const auto v = solve_single_agent(1.0, default_params());
    const auto sys = oracle::smooth_fit_system(v.exps.m, v.exps.n, v.params.alpha, v.H,
                                               v.params.p, v.params.sell_gain(),
                                               v.policy.x_b, v.policy.x_s);
    const auto coeff = oracle::solve_least_squares(sys.rows, sys.rhs);
    CHECK(coeff[0] == doctest::Approx(v.A).epsilon(1e-8));
    CHECK(coeff[1] == doctest::Approx(v.B).epsilon(1e-8));
    CHECK(coeff[2] == doctest::Approx(v.C1).epsilon(1e-8));
    CHECK(coeff[3] == doctest::Approx(v.C2).epsilon(1e-8));
    for (std::size_t i = 0; i < sys.rows.size(); ++i) {
        double res = -sys.rhs[i];
        for (int k = 0; k < 4; ++k) res += sys.rows[i][k] * coeff[k];
        CHECK(std::abs(res) < 1e-8);  // rows are normalized, residual is relative
    }
}

TEST_CASE("solve_value_function rejects thresholds off the free boundary") {
    const auto prm = default_params();
    const auto exps = compute_exponents(prm);
    const double y0 = solve_y0(prm.lambda, exps, prm.alpha);
    auto pol = solve_thresholds(1.0, prm, exps, y0);
    pol.x_s *= 1.2;
    CHECK_THROWS_AS(solve_value_function(1.0, prm, exps, pol), std::runtime_error);
}

TEST_CASE("piecewise evaluation: knots, origin, and finite-difference agreement") {
    const auto v = solve_single_agent(1.0, default_params());
    const double x_b = v.policy.x_b;
    const double x_s = v.policy.x_s;

    CHECK(v.value(0.0) == v.C1);
    // both branch formulas agree at the knots
    CHECK(v.value(x_b) == doctest::Approx(v.params.p * x_b + v.C1).epsilon(1e-10));
    CHECK(v.value(x_s) ==
          doctest::Approx(v.params.sell_gain() * x_s + v.C2).epsilon(1e-10));
    CHECK_THROWS_AS(v.value(-0.1), std::invalid_argument);

    const auto f = [&](double x) { return v.value(x); };
    for (double x : log_grid(1.01 * x_b, 0.99 * x_s, 41)) {
        const double d1 = oracle::central_first(f, x, 1e-5 * x);
        const double d2 = oracle::central_second(f, x, 1e-4 * x);
        CHECK(v.deriv(x) == doctest::Approx(d1).epsilon(1e-6));
        CHECK(v.second_deriv(x) == doctest::Approx(d2).epsilon(1e-6));
    }
}

TEST_CASE("gradient stays inside the transaction band") {
    const auto v = solve_single_agent(1.0, default_params());
    const double lo = v.params.sell_gain();
    const double hi = v.params.p;
    for (double x : log_grid(v.policy.x_b, v.policy.x_s, 1000)) {
        const double d = v.deriv(x);
        CHECK(d >= lo - 1e-10);
        CHECK(d <= hi + 1e-10);
    }
    // derivative at the geometric midpoint sits strictly inside
    const double mid = std::sqrt(v.policy.x_b * v.policy.x_s);
    CHECK(v.deriv(mid) > lo);
    CHECK(v.deriv(mid) < hi);
}

TEST_CASE("variational-inequality brackets by region") {
    const auto v = solve_single_agent(1.0, default_params());
    const double x_b = v.policy.x_b;
    const double x_s = v.policy.x_s;

    for (double x : log_grid(1.000001 * x_b, 0.999999 * x_s, 100)) {
        const auto h = hjb_residual(v, x);
        CHECK(std::abs(h.ode_term) < 1e-8 * (1.0 + std::abs(v.value(x))));
        CHECK(h.buy_term >= -1e-10);
        CHECK(h.sell_term >= -1e-10);
    }
    {
        const auto h = hjb_residual(v, x_b / 2.0);
        CHECK(h.buy_term == 0.0);  // affine branch has v' = p exactly
        CHECK(h.ode_term > 0.0);
        CHECK(h.sell_term > 0.0);
    }
    for (double x : log_grid(1.000001 * x_s, 10.0 * x_s, 100)) {
        const auto h = hjb_residual(v, x);
        CHECK(h.sell_term == 0.0);
        CHECK(h.ode_term >= -1e-8 * (1.0 + std::abs(v.value(x))));
    }
    CHECK_THROWS_AS(hjb_residual(v, 0.0), std::invalid_argument);
}

TEST_CASE("convenience composition equals the explicit pipeline") {
    const auto prm = default_params();
    const auto exps = compute_exponents(prm);
    const double y0 = solve_y0(prm.lambda, exps, prm.alpha);
    const auto pol = solve_thresholds(0.7, prm, exps, y0);
    const auto manual = solve_value_function(0.7, prm, exps, pol);
    const auto packed = solve_single_agent(0.7, prm);
    CHECK(packed.policy.x_b == manual.policy.x_b);
    CHECK(packed.policy.x_s == manual.policy.x_s);
    CHECK(packed.A == manual.A);
    CHECK(packed.B == manual.B);
    CHECK(packed.C1 == manual.C1);
    CHECK(packed.C2 == manual.C2);
}

TEST_CASE("full pipeline invariants hold over randomized valid parameters") {
    PathRng rng(77, 3);
    int tested = 0;
    int drawn = 0;
    while (tested < 25 && drawn < 80) {
        ++drawn;
        ModelParams prm = default_params();
        prm.delta = 0.1 + 1.4 * rng.uniform01();
        prm.gamma = 0.5 + 2.0 * rng.uniform01();
        prm.r = prm.delta + 0.3 + 2.5 * rng.uniform01();
        prm.alpha = 0.15 + 0.7 * rng.uniform01();
        prm.lambda = 0.1 + 0.8 * rng.uniform01();
        prm.p = 0.2 + 1.5 * rng.uniform01();
        prm.c = 0.3 + 2.0 * rng.uniform01();
        const double rho = 0.3 + 2.0 * rng.uniform01();

        const auto exps = compute_exponents(prm);
        const double y0 = solve_y0(prm.lambda, exps, prm.alpha);
        CHECK(y0 > 1.0);
        CHECK(std::abs(f_ratio(y0, exps, prm.alpha) - (1.0 - prm.lambda)) < 1e-12);

        // Skip draws whose closed-form coefficients cancel beyond double
        // precision (extremely wide bands): no fixed-precision evaluation of
        // the six equations can meet the stated tolerances there.
        {
            const auto pol = solve_thresholds(rho, prm, exps, y0);
            const double H = 2.0 * prm.c * rho /
                             (prm.gamma * prm.gamma * (exps.n - prm.alpha) *
                              (prm.alpha - exps.m));
            const auto cond = [&](double x, double slope, double e1, double c1, double c2,
                                  double d) {
                const double t1 = slope * c1 * x;
                const double t2 = prm.alpha * c2 * H * std::pow(x, prm.alpha);
                return (std::abs(t1) + std::abs(t2)) /
                       (std::abs(d) * std::pow(x, e1) *
                        std::max(std::abs(t1 - t2) / (std::abs(d) * std::pow(x, e1)), 1e-300));
            };
            const double m = exps.m, n = exps.n;
            const double cond_a =
                cond(pol.x_b, prm.p, m, n - 1.0, n - prm.alpha, m * (n - m));
            const double cond_b =
                cond(pol.x_b, prm.p, n, m - 1.0, m - prm.alpha, n * (m - n));
            if (std::max(cond_a, cond_b) > 1e6) continue;
        }
        ++tested;

        const auto v = solve_single_agent(rho, prm);
        CHECK(v.policy.x_b > 0.0);
        CHECK(v.policy.x_b < v.policy.x_s);
        for (double res : smooth_fit_relative_residuals(v)) CHECK(res < 1e-8);

        // price power law
        const auto v2 = solve_single_agent(2.0 * rho, prm);
        const double scale = std::pow(2.0, 1.0 / (1.0 - prm.alpha));
        CHECK(v2.policy.x_b / v.policy.x_b == doctest::Approx(scale).epsilon(1e-12));

        for (double x : log_grid(v.policy.x_b * 1.000001, v.policy.x_s * 0.999999, 25)) {
            const auto h = hjb_residual(v, x);
            const double tol = 1e-8 * (1.0 + std::abs(v.value(x)));
            CHECK(std::abs(h.ode_term) < tol);
            CHECK(h.buy_term >= -tol);
            CHECK(h.sell_term >= -tol);
        }
        for (double x : log_grid(v.policy.x_b / 8.0, 8.0 * v.policy.x_s, 60)) {
            const auto h = hjb_residual(v, x);
            CHECK(h.min_term() >= -1e-8 * (1.0 + std::abs(v.value(x))));
        }
    }
}
