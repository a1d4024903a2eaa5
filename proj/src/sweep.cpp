#include "mfg/sweep.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "mfg/equilibrium.hpp"
#include "mfg/single_agent.hpp"

namespace mfg {

namespace {

ModelParams with_value(const ModelParams& base, SweepParameter p, double v) {
    ModelParams out = base;
    switch (p) {
        case SweepParameter::Lambda: out.lambda = v; break;
        case SweepParameter::Delta: out.delta = v; break;
        case SweepParameter::Gamma: out.gamma = v; break;
        case SweepParameter::R: out.r = v; break;
        case SweepParameter::Alpha: out.alpha = v; break;
        case SweepParameter::Rho: break;  // exogenous price, parameters unchanged
    }
    return out;
}

double column_value(const SweepRow& row, const std::string& column) {
    if (column == "value") return row.value;
    if (column == "y0") return row.y0;
    if (column == "xb_single") return row.xb_single;
    if (column == "xs_single") return row.xs_single;
    if (column == "rho_star") return row.rho_star;
    if (column == "xb_mfg") return row.xb_mfg;
    if (column == "xs_mfg") return row.xs_mfg;
    if (column == "K") return row.K;
    throw std::invalid_argument("monotonicity_report: unknown column '" + column + "'");
}

}  // namespace

std::string to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::Lambda: return "lambda";
        case SweepParameter::Delta: return "delta";
        case SweepParameter::Gamma: return "gamma";
        case SweepParameter::R: return "r";
        case SweepParameter::Alpha: return "alpha";
        case SweepParameter::Rho: return "rho";
    }
    return "?";
}

SweepParameter sweep_parameter_from_string(const std::string& name) {
    static const std::map<std::string, SweepParameter> lut = {
        {"lambda", SweepParameter::Lambda}, {"delta", SweepParameter::Delta},
        {"gamma", SweepParameter::Gamma},   {"r", SweepParameter::R},
        {"alpha", SweepParameter::Alpha},   {"rho", SweepParameter::Rho},
    };
    const auto it = lut.find(name);
    if (it == lut.end()) {
        throw std::invalid_argument("unknown sweep parameter '" + name +
                                    "' (expected lambda|delta|gamma|r|alpha|rho)");
    }
    return it->second;
}

SweepResult run_sweep(const SweepSpec& spec) {
    if (spec.grid.empty()) throw std::invalid_argument("run_sweep: empty grid");
    for (std::size_t i = 1; i < spec.grid.size(); ++i) {
        if (!(spec.grid[i] > spec.grid[i - 1])) {
            throw std::invalid_argument("run_sweep: grid must be strictly increasing");
        }
    }

    SweepResult result;
    for (const double v : spec.grid) {
        const ModelParams params = with_value(spec.base, spec.parameter, v);
        const double rho_single =
            spec.parameter == SweepParameter::Rho ? v : spec.rho_single;
        try {
            const auto exps = compute_exponents(params);
            const double y0 = solve_y0(params.lambda, exps, params.alpha);
            const auto single = solve_thresholds(rho_single, params, exps, y0);
            const auto eq = solve_equilibrium(params);
            SweepRow row;
            row.value = v;
            row.y0 = y0;
            row.xb_single = single.x_b;
            row.xs_single = single.x_s;
            row.rho_star = eq.rho_star;
            row.xb_mfg = eq.policy_star.x_b;
            row.xs_mfg = eq.policy_star.x_s;
            row.K = eq.contraction_K;
            result.rows.push_back(row);
        } catch (const std::exception& e) {
            result.skips.push_back(SweepSkip{v, e.what()});
        }
    }
    return result;
}

MonotonicityReport monotonicity_report(const std::vector<SweepRow>& rows,
                                       const std::vector<MonotonicityExpectation>& expectations) {
    if (rows.size() < 3) {
        throw std::invalid_argument("monotonicity_report: needs at least 3 rows");
    }
    MonotonicityReport rep;
    for (const auto& exp : expectations) {
        MonotonicityReport::Item item;
        item.column = exp.column;
        item.trend = exp.trend;
        item.pass = true;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const double lo = column_value(rows[i - 1], exp.column);
            const double hi = column_value(rows[i], exp.column);
            const bool ok = exp.trend == Trend::Increasing ? hi > lo : hi < lo;
            if (!ok) {
                item.pass = false;
                item.violation_index = i - 1;
                item.violation_lo = lo;
                item.violation_hi = hi;
                break;
            }
        }
        rep.all_pass = rep.all_pass && item.pass;
        rep.items.push_back(item);
    }
    return rep;
}

std::vector<double> default_sweep_grid(SweepParameter p) {
    const auto linspace = [](double lo, double hi, int n) {
        std::vector<double> g(n);
        for (int i = 0; i < n; ++i) {
            g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        }
        return g;
    };
    switch (p) {
        case SweepParameter::Lambda: return linspace(0.1, 0.9, 17);
        case SweepParameter::Delta: return linspace(0.5, 1.5, 11);
        case SweepParameter::Gamma: return linspace(1.5, 2.5, 11);
        case SweepParameter::R: return linspace(2.0, 4.0, 11);
        case SweepParameter::Alpha: return linspace(0.4, 0.8, 9);
        case SweepParameter::Rho: return linspace(0.5, 2.0, 16);
    }
    return {};
}

}  // namespace mfg
