#pragma once

#include <array>

#include "mfg/params.hpp"

namespace mfg {

/// Reflection band of the bang-bang control: expand (buy) whenever the state
/// falls to x_b, contract (sell) whenever it rises to x_s, each time by the
/// minimal amount. 0 < x_b <= x_s.
struct ThresholdPolicy {
    double x_b = 0.0;
    double x_s = 0.0;

    double ratio() const { return x_s / x_b; }
    bool contains(double x) const { return x_b <= x && x <= x_s; }
};

/// Piecewise closed-form value of the fixed-price problem:
///
///   v(x) = p x + C1                        on [0, x_b]
///   v(x) = A x^m + B x^n + H x^alpha       on (x_b, x_s)
///   v(x) = p (1-lambda) x + C2             on [x_s, inf)
///
/// with H = 2 c rho / (gamma^2 (n-alpha)(alpha-m)) and (A, B, C1, C2) pinned
/// by value, gradient and curvature matching at both thresholds. At exactly
/// x = x_b or x = x_s the middle branch is used; all branches agree there.
struct ValueFunction {
    ModelParams params;
    CharacteristicExponents exps;
    double rho = 1.0;
    ThresholdPolicy policy;
    double A = 0.0;
    double B = 0.0;
    double H = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;

    double value(double x) const;
    double deriv(double x) const;
    double second_deriv(double x) const;
};

/// The three brackets of the variational inequality at x:
///   ode_term  = r v - c rho x^alpha - delta x v' - (gamma^2/2) x^2 v''
///   buy_term  = p - v'
///   sell_term = v' - p (1-lambda)
/// The region-appropriate term vanishes and all three are nonnegative for the
/// solved value function.
struct HjbResidual {
    double ode_term = 0.0;
    double buy_term = 0.0;
    double sell_term = 0.0;

    double min_term() const;
};

/// The band-ratio function F(y), defined for y > 1:
///
///          c1 y^(m-1) (y^alpha - y^n) + c2 y^(n-1) (y^m - y^alpha)
///   F(y) = -----------------------------------------------------,
///                 c1 (y^alpha - y^n) + c2 (y^m - y^alpha)
///
/// with c1 = (n-1)(alpha-m), c2 = (1-m)(n-alpha). F(1+) = 1, F(inf) = 0, and
/// the optimal band ratio solves F(y0) = 1 - lambda. Throws for y <= 1 or a
/// vanishing denominator (degenerate exponent configuration).
double f_ratio(double y, const CharacteristicExponents& exps, double alpha);

/// Solves F(y0) = 1 - lambda for y0 > 1 by a geometric scan (detecting and
/// warning about multiple crossings, taking the smallest), bisection, and one
/// Newton polish. The result does not depend on the price rho. Requires
/// lambda in (0,1); throws std::runtime_error when no crossing is bracketed
/// below the scan cap.
double solve_y0(double lambda, const CharacteristicExponents& exps, double alpha);

/// Thresholds under price rho > 0:
///
///   x_b = { 2 c alpha (y0^n - y0^alpha)                                 }^(1/(1-alpha))
///         { ------------------------------------------------ * rho      }
///         { gamma^2 p (1-m)(n-alpha) [y0^n - (1-lambda) y0]            }
///
/// and x_s = y0 x_b, so both scale as rho^(1/(1-alpha)).
ThresholdPolicy solve_thresholds(double rho, const ModelParams& params,
                                 const CharacteristicExponents& exps, double y0);

/// Coefficients of the middle branch from the closed forms evaluated at x_b:
///
///   A = [p (n-1) x_b - alpha (n-alpha) H x_b^alpha] / [m (n-m) x_b^m]
///   B = [p (m-1) x_b - alpha (m-alpha) H x_b^alpha] / [n (m-n) x_b^n]
///
/// The equivalent x_s-based forms (with p replaced by p(1-lambda)) must agree
/// to 1e-8 relative; disagreement signals a bad band ratio and throws.
ValueFunction solve_value_function(double rho, const ModelParams& params,
                                   const CharacteristicExponents& exps,
                                   const ThresholdPolicy& policy);

HjbResidual hjb_residual(const ValueFunction& v, double x);

/// Relative residuals of the six matching conditions (value, gradient,
/// curvature at x_b, then at x_s), each scaled by the largest term entering
/// the equation. All six are ~1e-15 for a correctly solved value function.
std::array<double, 6> smooth_fit_relative_residuals(const ValueFunction& v);

/// compute_exponents -> solve_y0 -> solve_thresholds -> solve_value_function.
ValueFunction solve_single_agent(double rho, const ModelParams& params);

}  // namespace mfg
