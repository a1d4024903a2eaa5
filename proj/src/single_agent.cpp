#include "mfg/single_agent.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mfg {

namespace {

void require_ranges(const ModelParams& params, const char* who) {
    auto bad = params.violations();
    if (bad.empty()) return;
    std::ostringstream msg;
    msg << who << ": invalid parameters:";
    for (const auto& v : bad) msg << " [" << v << "]";
    throw std::invalid_argument(msg.str());
}

}  // namespace

double HjbResidual::min_term() const {
    return std::min(ode_term, std::min(buy_term, sell_term));
}

double f_ratio(double y, const CharacteristicExponents& exps, double alpha) {
    if (!(y > 1.0)) throw std::invalid_argument("f_ratio: requires y > 1");
    const double m = exps.m;
    const double n = exps.n;
    const double c1 = (n - 1.0) * (alpha - m);
    const double c2 = (1.0 - m) * (n - alpha);
    // Normalized by y^n so nothing overflows during wide bracketing scans;
    // all remaining exponents except n-1 are negative.
    const double yam = std::pow(y, alpha - n);   // y^alpha / y^n
    const double ymn = std::pow(y, m - n);       // y^m / y^n
    const double num = c1 * std::pow(y, m - 1.0) * (yam - 1.0) +
                       c2 * std::pow(y, n - 1.0) * (ymn - yam);
    const double den = c1 * (yam - 1.0) + c2 * (ymn - yam);
    if (std::abs(den) < 1e-300) {
        throw std::domain_error("f_ratio: vanishing denominator (degenerate exponents)");
    }
    return num / den;
}

double solve_y0(double lambda, const CharacteristicExponents& exps, double alpha) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw std::invalid_argument("solve_y0: requires lambda in (0,1)");
    }
    const double target = 1.0 - lambda;
    const auto g = [&](double y) { return f_ratio(y, exps, alpha) - target; };

    // Geometric scan over (1, 1e9]: F decreases from 1 towards 0, so g starts
    // positive. Record every sign change to detect (unproven) multiplicity.
    constexpr double kScanStart = 1.0 + 1e-6;
    constexpr double kScanCap = 1e9;
    const double step = std::pow(2.0, 1.0 / 8.0);
    double lo = 0.0, hi = 0.0;
    int crossings = 0;
    double prev_y = kScanStart;
    double prev_g = g(prev_y);
    for (double y = prev_y * step; prev_y < kScanCap; y *= step) {
        y = std::min(y, kScanCap);
        const double gy = g(y);
        if ((prev_g > 0.0) != (gy > 0.0)) {
            ++crossings;
            if (crossings == 1) {
                lo = prev_y;
                hi = y;
            }
        }
        if (y >= kScanCap) break;
        prev_y = y;
        prev_g = gy;
    }
    if (crossings == 0) {
        throw std::runtime_error(
            "solve_y0: no sign change of F(y) - (1-lambda) bracketed below 1e9 "
            "(invalid exponent configuration)");
    }
    if (crossings > 1) {
        std::cerr << "warning: solve_y0 detected " << crossings
                  << " crossings of F(y) = 1-lambda; taking the smallest root\n";
    }

    // Bisection until the interval is resolved to a few ulps (the coefficient
    // cross-forms downstream need y0 at close to full precision).
    double glo = g(lo);
    while (hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((glo > 0.0) == (gm > 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    double y0 = 0.5 * (lo + hi);

    // One Newton polish with a central-difference slope; keep it only if it
    // actually reduces the residual and stays inside the bracket.
    const double h = std::max(1e-7 * y0, 1e-9);
    const double dg = (g(y0 + h) - g(y0 - h)) / (2.0 * h);
    if (dg != 0.0) {
        const double polished = y0 - g(y0) / dg;
        if (polished > lo && polished < hi &&
            std::abs(g(polished)) < std::abs(g(y0))) {
            y0 = polished;
        }
    }
    return y0;
}

ThresholdPolicy solve_thresholds(double rho, const ModelParams& params,
                                 const CharacteristicExponents& exps, double y0) {
    if (!(rho > 0.0)) throw std::invalid_argument("solve_thresholds: requires rho > 0");
    if (!(y0 > 1.0)) throw std::invalid_argument("solve_thresholds: requires y0 > 1");
    const double m = exps.m;
    const double n = exps.n;
    const double alpha = params.alpha;
    const double g2 = params.gamma * params.gamma;
    // Bracketed base factor of the threshold formula, written with y0^n
    // divided out of numerator and denominator so large ratios stay finite.
    const double num = 2.0 * params.c * alpha * (1.0 - std::pow(y0, alpha - n));
    const double den = g2 * params.p * (1.0 - m) * (n - alpha) *
                       (1.0 - (1.0 - params.lambda) * std::pow(y0, 1.0 - n));
    const double base = std::pow(num / den, 1.0 / (1.0 - alpha));
    const double x_b = base * std::pow(rho, 1.0 / (1.0 - alpha));
    return ThresholdPolicy{x_b, x_b * y0};
}

ValueFunction solve_value_function(double rho, const ModelParams& params,
                                   const CharacteristicExponents& exps,
                                   const ThresholdPolicy& policy) {
    const double m = exps.m;
    const double n = exps.n;
    const double alpha = params.alpha;
    const double p = params.p;
    const double ps = params.sell_gain();
    const double g2 = params.gamma * params.gamma;
    const double x_b = policy.x_b;
    const double x_s = policy.x_s;

    const double H = 2.0 * params.c * rho / (g2 * (n - alpha) * (alpha - m));

    // Each closed form is (t1 - t2)/d; (|t1|+|t2|)/|d| bounds the rounding
    // level of the result, which matters when the numerator cancels (A is a
    // vanishing x^m correction for very wide bands).
    const auto coeff_A = [&](double x, double slope, double& noise) {
        const double t1 = slope * (n - 1.0) * x;
        const double t2 = alpha * (n - alpha) * H * std::pow(x, alpha);
        const double d = m * (n - m) * std::pow(x, m);
        noise = (std::abs(t1) + std::abs(t2)) / std::abs(d);
        return (t1 - t2) / d;
    };
    const auto coeff_B = [&](double x, double slope, double& noise) {
        const double t1 = slope * (m - 1.0) * x;
        const double t2 = alpha * (m - alpha) * H * std::pow(x, alpha);
        const double d = n * (m - n) * std::pow(x, n);
        noise = (std::abs(t1) + std::abs(t2)) / std::abs(d);
        return (t1 - t2) / d;
    };

    double noise_ab = 0.0, noise_as = 0.0, noise_bb = 0.0, noise_bs = 0.0;
    const double A_b = coeff_A(x_b, p, noise_ab);
    const double A_s = coeff_A(x_s, ps, noise_as);
    const double B_b = coeff_B(x_b, p, noise_bb);
    const double B_s = coeff_B(x_s, ps, noise_bs);

    constexpr double kUlps = 128.0 * std::numeric_limits<double>::epsilon();
    const double a_tol = std::max(1e-8 * std::max(std::abs(A_b), std::abs(A_s)),
                                  kUlps * std::max(noise_ab, noise_as));
    const double b_tol = std::max(1e-8 * std::max(std::abs(B_b), std::abs(B_s)),
                                  kUlps * std::max(noise_bb, noise_bs));
    if (std::abs(A_b - A_s) > a_tol || std::abs(B_b - B_s) > b_tol) {
        std::ostringstream msg;
        msg << "solve_value_function: x_b- and x_s-based coefficient forms disagree "
            << "(A: " << A_b << " vs " << A_s << ", B: " << B_b << " vs " << B_s
            << "); the supplied thresholds do not solve the smooth-fit system";
        throw std::runtime_error(msg.str());
    }

    ValueFunction v;
    v.params = params;
    v.exps = exps;
    v.rho = rho;
    v.policy = policy;
    v.A = A_b;
    v.B = B_b;
    v.H = H;
    v.C1 = A_b * std::pow(x_b, m) + B_b * std::pow(x_b, n) + H * std::pow(x_b, alpha) -
           p * x_b;
    v.C2 = A_b * std::pow(x_s, m) + B_b * std::pow(x_s, n) + H * std::pow(x_s, alpha) -
           ps * x_s;
    return v;
}

double ValueFunction::value(double x) const {
    if (x < 0.0) throw std::invalid_argument("ValueFunction::value: requires x >= 0");
    if (x < policy.x_b) return params.p * x + C1;
    if (x > policy.x_s) return params.sell_gain() * x + C2;
    return A * std::pow(x, exps.m) + B * std::pow(x, exps.n) +
           H * std::pow(x, params.alpha);
}

double ValueFunction::deriv(double x) const {
    if (x < policy.x_b) return params.p;
    if (x > policy.x_s) return params.sell_gain();
    return exps.m * A * std::pow(x, exps.m - 1.0) + exps.n * B * std::pow(x, exps.n - 1.0) +
           params.alpha * H * std::pow(x, params.alpha - 1.0);
}

double ValueFunction::second_deriv(double x) const {
    if (x < policy.x_b || x > policy.x_s) return 0.0;
    const double m = exps.m;
    const double n = exps.n;
    const double alpha = params.alpha;
    return m * (m - 1.0) * A * std::pow(x, m - 2.0) +
           n * (n - 1.0) * B * std::pow(x, n - 2.0) +
           alpha * (alpha - 1.0) * H * std::pow(x, alpha - 2.0);
}

HjbResidual hjb_residual(const ValueFunction& v, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("hjb_residual: requires x > 0");
    const auto& prm = v.params;
    const double val = v.value(x);
    const double d1 = v.deriv(x);
    const double d2 = v.second_deriv(x);
    HjbResidual res;
    res.ode_term = prm.r * val - prm.c * v.rho * std::pow(x, prm.alpha) -
                   prm.delta * x * d1 - 0.5 * prm.gamma * prm.gamma * x * x * d2;
    res.buy_term = prm.p - d1;
    res.sell_term = d1 - prm.sell_gain();
    return res;
}

std::array<double, 6> smooth_fit_relative_residuals(const ValueFunction& v) {
    const double m = v.exps.m;
    const double n = v.exps.n;
    const double alpha = v.params.alpha;
    std::array<double, 6> out{};
    const auto fill = [&](std::size_t base, double x, double slope, double affine) {
        const double tm = v.A * std::pow(x, m);
        const double tn = v.B * std::pow(x, n);
        const double ta = v.H * std::pow(x, alpha);
        const double rhs0 = slope * x + affine;
        double scale = std::max({std::abs(tm), std::abs(tn), std::abs(ta), std::abs(rhs0), 1e-300});
        out[base] = std::abs(tm + tn + ta - rhs0) / scale;

        const double dm = m * tm / x;
        const double dn = n * tn / x;
        const double da = alpha * ta / x;
        scale = std::max({std::abs(dm), std::abs(dn), std::abs(da), std::abs(slope), 1e-300});
        out[base + 1] = std::abs(dm + dn + da - slope) / scale;

        const double cm = m * (m - 1.0) * tm / (x * x);
        const double cn = n * (n - 1.0) * tn / (x * x);
        const double ca = alpha * (alpha - 1.0) * ta / (x * x);
        scale = std::max({std::abs(cm), std::abs(cn), std::abs(ca), 1e-300});
        out[base + 2] = std::abs(cm + cn + ca) / scale;
    };
    fill(0, v.policy.x_b, v.params.p, v.C1);
    fill(3, v.policy.x_s, v.params.sell_gain(), v.C2);
    return out;
}

ValueFunction solve_single_agent(double rho, const ModelParams& params) {
    require_ranges(params, "solve_single_agent");
    const auto exps = compute_exponents(params);
    const double y0 = solve_y0(params.lambda, exps, params.alpha);
    const auto policy = solve_thresholds(rho, params, exps, y0);
    return solve_value_function(rho, params, exps, policy);
}

}  // namespace mfg
