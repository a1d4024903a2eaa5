#include "mfg/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mfg {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

void set_param(ModelParams& params, const std::string& key, double value) {
    if (key == "delta") params.delta = value;
    else if (key == "gamma") params.gamma = value;
    else if (key == "r") params.r = value;
    else if (key == "alpha") params.alpha = value;
    else if (key == "lambda") params.lambda = value;
    else if (key == "p") params.p = value;
    else if (key == "c") params.c = value;
    else if (key == "a0") params.a0 = value;
    else if (key == "a1") params.a1 = value;
    else throw ConfigError("unknown parameter key '" + key + "'");
}

std::vector<std::pair<std::string, double>> param_items(const ModelParams& params) {
    return {
        {"delta", params.delta}, {"gamma", params.gamma}, {"r", params.r},
        {"alpha", params.alpha}, {"lambda", params.lambda}, {"p", params.p},
        {"c", params.c},         {"a0", params.a0},         {"a1", params.a1},
    };
}

ModelParams parse_config_file(const std::string& path, const ModelParams& defaults) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    ModelParams params = defaults;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string text = trim(line);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << path << ":" << line_no << ": expected key=value, got '" << text << "'";
            throw ConfigError(msg.str());
        }
        const std::string key = trim(text.substr(0, eq));
        const std::string value_text = trim(text.substr(eq + 1));
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(value_text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != value_text.size() || value_text.empty()) {
            std::ostringstream msg;
            msg << path << ":" << line_no << ": key '" << key
                << "' has a non-numeric value '" << value_text << "'";
            throw ConfigError(msg.str());
        }
        try {
            set_param(params, key, value);
        } catch (const ConfigError& e) {
            std::ostringstream msg;
            msg << path << ":" << line_no << ": " << e.what();
            throw ConfigError(msg.str());
        }
    }
    return params;
}

std::optional<std::string> resolve_config_path(std::optional<std::string> explicit_path) {
    if (explicit_path) return explicit_path;
    if (const char* env = std::getenv(kConfigEnvVar)) return std::string(env);
    return std::nullopt;
}

ModelParams load_params(const std::optional<std::string>& config_path,
                        const std::vector<std::pair<std::string, double>>& overrides) {
    ModelParams params = default_params();
    if (config_path) params = parse_config_file(*config_path, params);
    for (const auto& [key, value] : overrides) set_param(params, key, value);
    const auto bad = params.violations();
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << "parameter out of range:";
        for (const auto& v : bad) msg << " [" << v << "]";
        throw ConfigError(msg.str());
    }
    return params;
}

}  // namespace mfg
