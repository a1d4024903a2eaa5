#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mfg/params.hpp"

namespace mfg {

/// Configuration problems (unknown keys, parse failures, out-of-range
/// values). The CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Assigns one named model parameter; throws ConfigError naming any unknown
/// key. Keys: delta, gamma, r, alpha, lambda, p, c, a0, a1.
void set_param(ModelParams& params, const std::string& key, double value);

/// Parameters in a fixed order for echoing into output headers.
std::vector<std::pair<std::string, double>> param_items(const ModelParams& params);

/// Parses a flat key=value file ('#' comments, blank lines allowed). Throws
/// ConfigError with the offending line on any problem.
ModelParams parse_config_file(const std::string& path, const ModelParams& defaults);

/// Environment variable naming the default configuration file.
inline constexpr const char* kConfigEnvVar = "MFG_INVEST_CONFIG";

/// The explicitly given path when present, otherwise the environment
/// default, otherwise nothing.
std::optional<std::string> resolve_config_path(std::optional<std::string> explicit_path);

/// Defaults, then the optional file, then the overrides (highest precedence).
/// The merged parameters are range-checked; a violation throws ConfigError
/// naming the violated invariant.
ModelParams load_params(const std::optional<std::string>& config_path,
                        const std::vector<std::pair<std::string, double>>& overrides);

}  // namespace mfg
