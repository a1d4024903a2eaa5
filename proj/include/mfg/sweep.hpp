#pragma once

#include <string>
#include <vector>

#include "mfg/params.hpp"

namespace mfg {

/// Parameter swept one at a time; rho varies the exogenous single-agent price
/// only (the equilibrium does not depend on it).
enum class SweepParameter { Lambda, Delta, Gamma, R, Alpha, Rho };

std::string to_string(SweepParameter p);
SweepParameter sweep_parameter_from_string(const std::string& name);

struct SweepSpec {
    SweepParameter parameter = SweepParameter::Lambda;
    std::vector<double> grid;   ///< strictly increasing
    ModelParams base;
    double rho_single = 1.0;    ///< exogenous price for the single-agent columns
};

struct SweepRow {
    double value = 0.0;
    double y0 = 0.0;
    double xb_single = 0.0;
    double xs_single = 0.0;
    double rho_star = 0.0;
    double xb_mfg = 0.0;
    double xs_mfg = 0.0;
    double K = 0.0;
};

struct SweepSkip {
    double value = 0.0;
    std::string reason;
};

struct SweepResult {
    std::vector<SweepRow> rows;    ///< successful grid points, grid order
    std::vector<SweepSkip> skips;  ///< grid points recorded as gaps
};

/// One row per grid value. Grid points that collide with the degenerate
/// exponent set (or otherwise fail) are recorded as skips, never aborts.
SweepResult run_sweep(const SweepSpec& spec);

enum class Trend { Increasing, Decreasing };

struct MonotonicityExpectation {
    std::string column;  ///< one of the SweepRow column names
    Trend trend = Trend::Increasing;
};

struct MonotonicityReport {
    struct Item {
        std::string column;
        Trend trend = Trend::Increasing;
        bool pass = false;
        std::size_t violation_index = 0;  ///< first violating adjacent pair
        double violation_lo = 0.0;
        double violation_hi = 0.0;
    };
    std::vector<Item> items;
    bool all_pass = true;
};

/// Checks strict monotonicity of the named columns across the rows; needs at
/// least 3 rows to be meaningful.
MonotonicityReport monotonicity_report(const std::vector<SweepRow>& rows,
                                       const std::vector<MonotonicityExpectation>& expectations);

/// Documented default grids for each sweep parameter (the base point is the
/// default parameter set; figure-style ranges chosen to bracket it).
std::vector<double> default_sweep_grid(SweepParameter p);

}  // namespace mfg
