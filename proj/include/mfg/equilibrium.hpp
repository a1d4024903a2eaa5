#pragma once

#include "mfg/params.hpp"
#include "mfg/single_agent.hpp"

namespace mfg {

/// Stationary law of the reflected controlled state on [x_b, x_s]. With
/// nu = 2*delta/gamma^2 (nu != 1), the density is the power law
///
///   f(x) = (nu-1) x^(nu-2) / (x_s^(nu-1) - x_b^(nu-1)),
///
/// valid on both sides of nu = 1 since numerator and denominator change sign
/// together. CDF and quantile function are in closed form.
struct StationaryLaw {
    ThresholdPolicy policy;
    double nu = 0.0;
    double norm = 0.0;  ///< (nu-1) / (x_s^(nu-1) - x_b^(nu-1))

    double density(double x) const;
    double cdf(double x) const;
    double inverse_cdf(double u) const;
    /// E[x^q] in closed form.
    double moment_power(double q) const;

  private:
    friend StationaryLaw stationary_law(const ThresholdPolicy&, const ModelParams&);
    double xb_pow_ = 0.0;  // x_b^(nu-1)
    double xs_pow_ = 0.0;  // x_s^(nu-1)
};

/// Fixed point of the price map together with everything evaluated at it.
struct EquilibriumSolution {
    double rho_star = 0.0;
    ThresholdPolicy policy_star;
    ValueFunction value_star;
    StationaryLaw law_star;
    double contraction_K = 0.0;  ///< slope magnitude of the price map, < 1
    int iterations = 0;          ///< Picard steps used by the cross-check
};

/// Requires 0 < x_b < x_s (a collapsed band is rejected rather than treated
/// as a point mass) and nu away from 1.
StationaryLaw stationary_law(const ThresholdPolicy& policy, const ModelParams& params);

/// Average inverse-demand price under the law:
///   a0 - a1 E[x^(1-alpha)]
/// with the moment in closed form. Requires nu away from alpha.
double mean_price(const StationaryLaw& law, const ModelParams& params);

/// The price map Gamma(rho) = a0 - K rho, affine in rho because both
/// thresholds scale as rho^(1/(1-alpha)). Identical by construction to
/// re-deriving the price from the stationary law at the rho-thresholds.
double gamma_map(double rho, const ModelParams& params,
                 const CharacteristicExponents& exps, double y0);

/// Slope magnitude K of the price map:
///
///   K = a1 * (2 delta - gamma^2)/(2 delta - alpha gamma^2)
///          * (y0^(nu-alpha) - 1)/(y0^(nu-1) - 1) * x_b(rho=1)^(1-alpha).
///
/// Gamma is a contraction iff K < 1; K is linear in a1.
double contraction_constant(const ModelParams& params,
                            const CharacteristicExponents& exps, double y0);

/// Computes the equilibrium price both as the closed form a0/(1+K) and by
/// Picard iteration of the full thresholds -> stationary law -> price route
/// from rho = a0; the two must agree to 1e-12. Throws when K >= 1 or when the
/// consistency condition fails.
EquilibriumSolution solve_equilibrium(const ModelParams& params);

}  // namespace mfg
