#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mfg {

/// Exogenous model constants for the partially reversible investment problem.
///
/// The controlled production level follows dx = x(delta dt + gamma dW) + dxi,
/// revenue is c*rho*x^alpha, expanding costs p per unit and contracting
/// salvages p*(1-lambda) per unit. The inverse demand curve used by the
/// mean-field coupling is rho(x) = a0 - a1*x^(1-alpha).
struct ModelParams {
    double delta = 1.0;    ///< drift of production (per unit time, > 0)
    double gamma = 2.0;    ///< volatility of production (per sqrt(time), > 0)
    double r = 3.0;        ///< discount rate (per unit time, > delta)
    double alpha = 0.6;    ///< Cobb-Douglas elasticity, in (0,1)
    double lambda = 0.6;   ///< irreversibility: salvage fraction lost, in (0,1)
    double p = 0.5;        ///< unit expansion cost (> 0)
    double c = 1.0;        ///< revenue scale (> 0)
    double a0 = 1.0;       ///< demand intercept (> 0)
    double a1 = 0.1;       ///< demand slope (>= 0)

    /// Unit cost of raising production.
    double buy_cost() const { return p; }
    /// Unit salvage for lowering production.
    double sell_gain() const { return p * (1.0 - lambda); }
    /// Exponent 2*delta/gamma^2 of the stationary power law.
    double nu() const { return 2.0 * delta / (gamma * gamma); }

    /// Range violations ("alpha in (0,1)" style), empty when all fields are
    /// finite and inside their domains. Does not include the soft
    /// well-posedness conditions reported by validate().
    std::vector<std::string> violations() const;
};

/// Default parameter set used throughout the test-bed and by the CLI when no
/// configuration is supplied.
ModelParams default_params();

/// Roots m < 0 < 1 < n of (gamma^2/2) k (k-1) + delta k - r = 0. The general
/// solution of the pricing ODE on the inaction band is A x^m + B x^n plus a
/// particular term.
struct CharacteristicExponents {
    double m = 0.0;  ///< negative root
    double n = 0.0;  ///< root exceeding 1 (requires delta < r)
};

/// Soft diagnostics; never a gate. strict_ok and nondegenerate_ok mirror the
/// standing assumptions 2*delta+gamma^2 < r and 2*delta/gamma^2 not in
/// {alpha, 1}; contraction_ok is undetermined until the price-map slope is
/// known.
struct ValidityReport {
    bool ranges_ok = true;
    bool strict_ok = true;
    bool nondegenerate_ok = true;
    std::optional<bool> contraction_ok;
    std::vector<std::string> messages;
};

/// Values of 2*delta/gamma^2 closer than this to alpha or 1 are rejected:
/// the stationary-density normalizer has a removable singularity there that
/// the closed forms do not treat.
inline constexpr double kDegeneracyTol = 1e-9;

/// Computes the characteristic exponents. Throws std::domain_error when
/// delta >= r (the positive root would not exceed 1, which breaks every
/// downstream closed form).
CharacteristicExponents compute_exponents(const ModelParams& params);

/// Diagnostic report; never throws. Pass the price-map slope K once known to
/// settle contraction_ok.
ValidityReport validate(const ModelParams& params,
                        std::optional<double> contraction_K = std::nullopt);

}  // namespace mfg
