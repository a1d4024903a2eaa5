#include "mfg/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mfg {

namespace {

void require_nondegenerate(const ModelParams& params, const char* who) {
    const double nu = params.nu();
    if (std::abs(nu - 1.0) <= kDegeneracyTol) {
        std::ostringstream msg;
        msg << who << ": 2*delta/gamma^2 = " << nu << " collides with 1";
        throw std::domain_error(msg.str());
    }
    if (std::abs(nu - params.alpha) <= kDegeneracyTol) {
        std::ostringstream msg;
        msg << who << ": 2*delta/gamma^2 = " << nu << " collides with alpha";
        throw std::domain_error(msg.str());
    }
}

}  // namespace

double StationaryLaw::density(double x) const {
    if (x < policy.x_b || x > policy.x_s) return 0.0;
    return norm * std::pow(x, nu - 2.0);
}

double StationaryLaw::cdf(double x) const {
    if (x <= policy.x_b) return 0.0;
    if (x >= policy.x_s) return 1.0;
    return (std::pow(x, nu - 1.0) - xb_pow_) / (xs_pow_ - xb_pow_);
}

double StationaryLaw::inverse_cdf(double u) const {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw std::invalid_argument("StationaryLaw::inverse_cdf: requires u in [0,1]");
    }
    const double x = std::pow(xb_pow_ + u * (xs_pow_ - xb_pow_), 1.0 / (nu - 1.0));
    return std::clamp(x, policy.x_b, policy.x_s);  // pow can overshoot by an ulp
}

double StationaryLaw::moment_power(double q) const {
    const double e = nu - 1.0 + q;
    if (std::abs(e) < 1e-12) {
        return norm * std::log(policy.x_s / policy.x_b);
    }
    return norm * (std::pow(policy.x_s, e) - std::pow(policy.x_b, e)) / e;
}

StationaryLaw stationary_law(const ThresholdPolicy& policy, const ModelParams& params) {
    if (!(policy.x_b > 0.0) || !(policy.x_b < policy.x_s)) {
        throw std::invalid_argument(
            "stationary_law: requires 0 < x_b < x_s (a collapsed band has no density)");
    }
    const double nu = params.nu();
    if (std::abs(nu - 1.0) <= kDegeneracyTol) {
        throw std::domain_error("stationary_law: 2*delta/gamma^2 too close to 1");
    }
    StationaryLaw law;
    law.policy = policy;
    law.nu = nu;
    law.xb_pow_ = std::pow(policy.x_b, nu - 1.0);
    law.xs_pow_ = std::pow(policy.x_s, nu - 1.0);
    law.norm = (nu - 1.0) / (law.xs_pow_ - law.xb_pow_);
    return law;
}

double mean_price(const StationaryLaw& law, const ModelParams& params) {
    if (std::abs(law.nu - params.alpha) <= kDegeneracyTol) {
        throw std::domain_error("mean_price: 2*delta/gamma^2 too close to alpha");
    }
    if (params.a1 == 0.0) return params.a0;
    return params.a0 - params.a1 * law.moment_power(1.0 - params.alpha);
}

double contraction_constant(const ModelParams& params,
                            const CharacteristicExponents& exps, double y0) {
    if (params.a1 == 0.0) return 0.0;
    require_nondegenerate(params, "contraction_constant");
    const double nu = params.nu();
    const double g2 = params.gamma * params.gamma;
    const double ly = std::log(y0);
    // (y0^(nu-alpha) - 1) / (y0^(nu-1) - 1) via expm1: stable for y0 near 1
    // and for very wide bands alike.
    const double ratio = std::expm1((nu - params.alpha) * ly) / std::expm1((nu - 1.0) * ly);
    // x_b(rho=1)^(1-alpha), same normalized form as solve_thresholds.
    const double base =
        2.0 * params.c * params.alpha * (1.0 - std::pow(y0, params.alpha - exps.n)) /
        (g2 * params.p * (1.0 - exps.m) * (exps.n - params.alpha) *
         (1.0 - (1.0 - params.lambda) * std::pow(y0, 1.0 - exps.n)));
    return params.a1 * (2.0 * params.delta - g2) / (2.0 * params.delta - params.alpha * g2) *
           ratio * base;
}

double gamma_map(double rho, const ModelParams& params,
                 const CharacteristicExponents& exps, double y0) {
    if (!(rho > 0.0)) throw std::invalid_argument("gamma_map: requires rho > 0");
    return params.a0 - contraction_constant(params, exps, y0) * rho;
}

EquilibriumSolution solve_equilibrium(const ModelParams& params) {
    {
        auto bad = params.violations();
        if (!bad.empty()) {
            std::ostringstream msg;
            msg << "solve_equilibrium: invalid parameters:";
            for (const auto& v : bad) msg << " [" << v << "]";
            throw std::invalid_argument(msg.str());
        }
    }
    require_nondegenerate(params, "solve_equilibrium");
    const auto exps = compute_exponents(params);
    const double y0 = solve_y0(params.lambda, exps, params.alpha);
    const double K = contraction_constant(params, exps, y0);
    if (!(K < 1.0)) {
        std::ostringstream msg;
        msg << "solve_equilibrium: price map is not a contraction (K = " << K
            << " >= 1); no equilibrium is guaranteed";
        throw std::runtime_error(msg.str());
    }

    const double rho_closed = params.a0 / (1.0 + K);

    // Picard cross-check through the full route: thresholds -> stationary
    // law -> updated price. Affinity of the map makes this converge at rate K.
    const auto full_map = [&](double rho) {
        if (params.a1 == 0.0) return params.a0;
        const auto pol = solve_thresholds(rho, params, exps, y0);
        return mean_price(stationary_law(pol, params), params);
    };
    double rho = params.a0;
    int iterations = 0;
    constexpr int kMaxIter = 10000;
    for (; iterations < kMaxIter; ++iterations) {
        const double next = full_map(rho);
        const bool done = std::abs(next - rho) < 1e-13;
        rho = next;
        if (done) {
            ++iterations;
            break;
        }
    }
    if (iterations >= kMaxIter) {
        throw std::runtime_error("solve_equilibrium: Picard iteration failed to converge");
    }
    if (std::abs(rho - rho_closed) > 1e-12 * std::max(1.0, std::abs(rho_closed))) {
        std::ostringstream msg;
        msg << "solve_equilibrium: Picard fixed point " << rho
            << " disagrees with closed form " << rho_closed;
        throw std::runtime_error(msg.str());
    }

    EquilibriumSolution eq;
    eq.rho_star = rho_closed;
    eq.policy_star = solve_thresholds(eq.rho_star, params, exps, y0);
    eq.value_star = solve_value_function(eq.rho_star, params, exps, eq.policy_star);
    eq.law_star = stationary_law(eq.policy_star, params);
    eq.contraction_K = K;
    eq.iterations = iterations;

    const double rederived = mean_price(eq.law_star, params);
    if (std::abs(rederived - eq.rho_star) > 1e-10 * std::max(1.0, std::abs(eq.rho_star))) {
        std::ostringstream msg;
        msg << "solve_equilibrium: consistency failure, price re-derived from the "
            << "equilibrium law is " << rederived << " but rho* = " << eq.rho_star;
        throw std::runtime_error(msg.str());
    }
    return eq;
}

}  // namespace mfg
