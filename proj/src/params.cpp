#include "mfg/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mfg {

namespace {

bool pos(double v) { return std::isfinite(v) && v > 0.0; }

bool in_unit(double v) { return std::isfinite(v) && v > 0.0 && v < 1.0; }

}  // namespace

std::vector<std::string> ModelParams::violations() const {
    std::vector<std::string> out;
    if (!pos(delta)) out.push_back("delta > 0");
    if (!pos(gamma)) out.push_back("gamma > 0");
    if (!pos(r)) out.push_back("r > 0");
    if (!in_unit(alpha)) out.push_back("alpha in (0,1)");
    if (!in_unit(lambda)) out.push_back("lambda in (0,1)");
    if (!pos(p)) out.push_back("p > 0");
    if (!pos(c)) out.push_back("c > 0");
    if (!pos(a0)) out.push_back("a0 > 0");
    if (!(std::isfinite(a1) && a1 >= 0.0)) out.push_back("a1 >= 0");
    return out;
}

ModelParams default_params() { return ModelParams{}; }

CharacteristicExponents compute_exponents(const ModelParams& params) {
    if (!(params.delta < params.r)) {
        std::ostringstream msg;
        msg << "compute_exponents: requires delta < r (got delta=" << params.delta
            << ", r=" << params.r << "); the positive root n would not exceed 1";
        throw std::domain_error(msg.str());
    }
    const double g2 = params.gamma * params.gamma;
    const double a = params.delta / g2 - 0.5;
    const double s = std::sqrt(a * a + 2.0 * params.r / g2);
    return CharacteristicExponents{-a - s, -a + s};
}

ValidityReport validate(const ModelParams& params, std::optional<double> contraction_K) {
    ValidityReport rep;
    for (const auto& v : params.violations()) {
        rep.ranges_ok = false;
        rep.messages.push_back("range violation: " + v);
    }
    if (!rep.ranges_ok) {
        rep.strict_ok = false;
        rep.nondegenerate_ok = false;
        return rep;
    }

    const double g2 = params.gamma * params.gamma;
    rep.strict_ok = 2.0 * params.delta + g2 < params.r;
    if (!rep.strict_ok) {
        std::ostringstream msg;
        msg << "warning: 2*delta+gamma^2 = " << 2.0 * params.delta + g2 << " >= r = "
            << params.r << "; the L2 well-posedness assumption fails (closed forms "
            << "remain defined while delta < r)";
        rep.messages.push_back(msg.str());
    }

    const double nu = params.nu();
    rep.nondegenerate_ok =
        std::abs(nu - 1.0) > kDegeneracyTol && std::abs(nu - params.alpha) > kDegeneracyTol;
    if (!rep.nondegenerate_ok) {
        std::ostringstream msg;
        msg << "degenerate exponents: 2*delta/gamma^2 = " << nu
            << " collides with {alpha, 1} within " << kDegeneracyTol;
        rep.messages.push_back(msg.str());
    }

    if (!(params.delta < params.r)) {
        rep.messages.push_back(
            "delta >= r: characteristic root n <= 1, solver formulas unavailable");
    }

    if (contraction_K.has_value()) {
        rep.contraction_ok = *contraction_K < 1.0;
        if (!*rep.contraction_ok) {
            std::ostringstream msg;
            msg << "price map is not a contraction: K = " << *contraction_K << " >= 1";
            rep.messages.push_back(msg.str());
        }
    } else {
        rep.messages.push_back(
            "contraction condition undetermined until the band ratio is solved");
    }
    return rep;
}

}  // namespace mfg
