#include "mfg/check.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfg/equilibrium.hpp"
#include "mfg/simulate.hpp"
#include "mfg/single_agent.hpp"

namespace mfg {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                  static_cast<double>(n - 1));
    }
    return g;
}

}  // namespace

std::string CheckReport::first_failure() const {
    for (const auto& item : items) {
        if (!item.pass) return item.name;
    }
    return {};
}

CheckReport run_check(const ModelParams& params, const CheckOptions& options) {
    CheckReport rep;
    const auto add = [&](const std::string& name, bool pass, const std::string& detail) {
        rep.items.push_back(CheckItem{name, pass, detail});
        rep.all_pass = rep.all_pass && pass;
        return pass;
    };

    // validity report: ranges and non-degeneracy gate, strictness only warns
    const auto validity = validate(params);
    for (const auto& msg : validity.messages) rep.warnings.push_back(msg);
    if (!add("parameter ranges", validity.ranges_ok,
             validity.ranges_ok ? "all fields inside their domains"
                                : "see warnings for the violated ranges")) {
        return rep;
    }
    if (!add("non-degeneracy", validity.nondegenerate_ok,
             "2*delta/gamma^2 = " + fmt(params.nu()) + " vs alpha = " + fmt(params.alpha))) {
        return rep;
    }
    if (!(params.delta < params.r)) {
        add("characteristic exponents", false, "delta >= r, no valid root n > 1");
        return rep;
    }

    try {
        const auto exps = compute_exponents(params);
        const double g2 = params.gamma * params.gamma;
        const auto quad = [&](double k) {
            return 0.5 * g2 * k * (k - 1.0) + params.delta * k - params.r;
        };
        const double root_tol = 1e-12 * std::max(1.0, params.r);
        add("characteristic exponents",
            exps.m < 0.0 && exps.n > 1.0 && std::abs(quad(exps.m)) < root_tol &&
                std::abs(quad(exps.n)) < root_tol,
            "m = " + fmt(exps.m) + ", n = " + fmt(exps.n));

        const double y0 = solve_y0(params.lambda, exps, params.alpha);
        const double f_res = std::abs(f_ratio(y0, exps, params.alpha) - (1.0 - params.lambda));
        if (!add("band ratio", y0 > 1.0 && f_res < 1e-12,
                 "y0 = " + fmt(y0) + ", residual = " + fmt(f_res))) {
            return rep;
        }

        const auto single = solve_single_agent(1.0, params);
        const auto res = smooth_fit_relative_residuals(single);
        const double worst = *std::max_element(res.begin(), res.end());
        add("smooth fit", worst < 1e-8, "max relative residual = " + fmt(worst));

        // gradient band on the inaction region
        {
            bool ok = true;
            double lo = 1e300;
            double hi = -1e300;
            for (double x : log_grid(single.policy.x_b, single.policy.x_s, 512)) {
                const double d = single.deriv(x);
                lo = std::min(lo, d);
                hi = std::max(hi, d);
                ok = ok && d >= params.sell_gain() - 1e-10 && d <= params.p + 1e-10;
            }
            add("gradient band", ok,
                "v' in [" + fmt(lo) + ", " + fmt(hi) + "], bounds [" +
                    fmt(params.sell_gain()) + ", " + fmt(params.p) + "]");
        }

        // variational inequality on a wide log grid
        {
            bool ok = true;
            std::string bad;
            for (double x : log_grid(single.policy.x_b / 10.0, 10.0 * single.policy.x_s, 1000)) {
                const auto h = hjb_residual(single, x);
                const double scale = 1.0 + std::abs(single.value(x));
                const double active = single.policy.contains(x) ? std::abs(h.ode_term)
                                      : x < single.policy.x_b   ? std::abs(h.buy_term)
                                                                : std::abs(h.sell_term);
                if (active / scale > 1e-8 || h.min_term() / scale < -1e-8) {
                    ok = false;
                    bad = "x = " + fmt(x);
                    break;
                }
            }
            add("variational inequality", ok,
                ok ? "1000-point grid clean" : "violated at " + bad);
        }

        // threshold scaling in the price
        {
            const double e = 1.0 / (1.0 - params.alpha);
            bool ok = true;
            for (double rho : {0.25, 1.0, 4.0}) {
                const auto pol = solve_thresholds(rho, params, exps, y0);
                const double want = single.policy.x_b * std::pow(rho, e);
                ok = ok && std::abs(pol.x_b - want) <= 1e-12 * want;
            }
            add("threshold scaling", ok, "x_b(rho) = x_b(1) rho^" + fmt(e));
        }

        const double K = contraction_constant(params, exps, y0);
        if (!add("price map contraction", K < 1.0, "K = " + fmt(K))) return rep;

        const auto eq = solve_equilibrium(params);
        const double fixed_res = std::abs(gamma_map(eq.rho_star, params, exps, y0) - eq.rho_star);
        add("equilibrium fixed point", fixed_res < 1e-12,
            "rho* = " + fmt(eq.rho_star) + ", |Gamma(rho*) - rho*| = " + fmt(fixed_res));

        const double rederived = mean_price(eq.law_star, params);
        add("price consistency", std::abs(rederived - eq.rho_star) < 1e-10,
            "law-derived price = " + fmt(rederived));

        {
            bool ok = true;
            for (double rho : {0.3, 0.7, 1.1, 1.9, 3.7}) {
                const auto pol = solve_thresholds(rho, params, exps, y0);
                const double via_law = mean_price(stationary_law(pol, params), params);
                const double via_map = gamma_map(rho, params, exps, y0);
                ok = ok && std::abs(via_law - via_map) <= 1e-10 * std::max(1.0, std::abs(via_map));
            }
            add("price route equivalence", ok, "affine map vs stationary-law route");
        }

        {
            const auto& law = eq.law_star;
            const double mass =
                law.norm * (std::pow(law.policy.x_s, law.nu - 1.0) -
                            std::pow(law.policy.x_b, law.nu - 1.0)) /
                (law.nu - 1.0);
            add("stationary normalization",
                std::abs(mass - 1.0) < 1e-12 && law.cdf(law.policy.x_b) == 0.0 &&
                    law.cdf(law.policy.x_s) == 1.0,
                "closed-form mass = " + fmt(mass));
        }

        if (options.run_simulation) {
            SimConfig cfg;
            cfg.dt = options.sim_dt;
            cfg.horizon = options.sim_horizon;
            cfg.burn_in = 0.5;
            cfg.seed = options.seed;
            cfg.n_paths = options.sim_paths;
            cfg.n_threads = options.n_threads;
            const auto states = sample_terminal_states(eq.policy_star, params, cfg);
            const double d = ks_distance(states, eq.law_star);
            add("stationary-law simulation", d < options.sim_ks_bound,
                "KS = " + fmt(d) + " over " + std::to_string(options.sim_paths) +
                    " paths (reduced bound " + fmt(options.sim_ks_bound) + ")");
        }
    } catch (const std::exception& e) {
        add("solver", false, e.what());
    }
    return rep;
}

}  // namespace mfg
