#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfg/params.hpp"

namespace mfg {

struct CheckOptions {
    bool run_simulation = true;   ///< reduced stationary-law simulation
    std::size_t sim_paths = 10000;
    double sim_dt = 2.5e-4;
    double sim_horizon = 6.0;
    double sim_ks_bound = 0.035;  ///< looser than the full-size experiment
    std::uint64_t seed = 12345;
    int n_threads = 0;
};

struct CheckItem {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct CheckReport {
    std::vector<CheckItem> items;
    std::vector<std::string> warnings;
    bool all_pass = true;

    /// Name of the first failing item, empty when everything passed.
    std::string first_failure() const;
};

/// Runs the full invariant suite at the given parameters: validity report,
/// single-agent identities, equilibrium identities, and a reduced simulation.
/// Items after a failed prerequisite are not evaluated. Never throws; solver
/// exceptions become failing items.
CheckReport run_check(const ModelParams& params, const CheckOptions& options = {});

}  // namespace mfg
