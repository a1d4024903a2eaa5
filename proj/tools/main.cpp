// Command-line front end: closed-form solvers, parameter sweeps, path
// simulation and the equilibrium-approximation experiment. Results go to
// stdout (JSON for scalars, CSV for grids), diagnostics to stderr.
// Exit codes: 0 success, 1 invariant/numeric failure, 2 configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mfg/check.hpp"
#include "mfg/config.hpp"
#include "mfg/equilibrium.hpp"
#include "mfg/params.hpp"
#include "mfg/simulate.hpp"
#include "mfg/single_agent.hpp"
#include "mfg/sweep.hpp"
#include "mfg/version.hpp"

using json = nlohmann::ordered_json;

namespace {

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 0;

    std::vector<double> points() const {
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = n == 1 ? lo
                          : lo + (hi - lo) * static_cast<double>(i) /
                                     static_cast<double>(n - 1);
        }
        return g;
    }
};

GridSpec parse_grid(const std::string& text) {
    GridSpec spec;
    char trailing = '\0';
    long long count = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lld%c", &spec.lo, &spec.hi, &count, &trailing) !=
            3 ||
        count < 1) {
        throw mfg::ConfigError("bad grid spec '" + text + "' (expected lo:hi:n)");
    }
    spec.n = static_cast<std::size_t>(count);
    if (spec.n > 1 && !(spec.hi > spec.lo)) {
        throw mfg::ConfigError("bad grid spec '" + text + "' (hi must exceed lo)");
    }
    return spec;
}

json params_json(const mfg::ModelParams& prm) {
    json j;
    for (const auto& [key, value] : mfg::param_items(prm)) j[key] = value;
    return j;
}

json envelope(const std::string& command, const mfg::ModelParams& prm) {
    json j;
    j["tool"] = std::string(mfg::kToolName);
    j["version"] = std::string(mfg::kVersion);
    j["command"] = command;
    j["params"] = params_json(prm);
    return j;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

std::string csv_header(const std::string& command, const mfg::ModelParams& prm,
                       std::optional<std::uint64_t> seed) {
    std::string line = "# ";
    line += mfg::kToolName;
    line += " ";
    line += mfg::kVersion;
    line += " ";
    line += command;
    for (const auto& [key, value] : mfg::param_items(prm)) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), " %s=%.17g", key.c_str(), value);
        line += buf;
    }
    if (seed) line += " seed=" + std::to_string(*seed);
    line += "\n";
    return line;
}

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw mfg::ConfigError("cannot open output file '" + path + "'");
        }
    }
    std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

void write_row(std::ostream& os, std::initializer_list<double> values) {
    bool first = true;
    char buf[32];
    for (double v : values) {
        if (!first) os << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << buf;
        first = false;
    }
    os << '\n';
}

void print_warnings(const mfg::ModelParams& prm) {
    for (const auto& msg : mfg::validate(prm).messages) {
        std::cerr << "note: " << msg << "\n";
    }
}

struct GlobalOptions {
    std::optional<std::string> config_path;
    std::vector<std::pair<std::string, double>> overrides;

    mfg::ModelParams resolve() const {
        return mfg::load_params(mfg::resolve_config_path(config_path), overrides);
    }
};

void add_param_flags(CLI::App& app, GlobalOptions& global) {
    app.add_option_function<std::string>(
           "--config",
           [&global](const std::string& v) { global.config_path = v; },
           "flat key=value parameter file")
        ->type_name("FILE");
    for (const auto& [key, value] : mfg::param_items(mfg::default_params())) {
        const std::string name = "--" + key;
        const std::string help = "model parameter (default " + std::to_string(value) + ")";
        app.add_option_function<double>(
               name,
               [&global, key = key](double v) { global.overrides.emplace_back(key, v); },
               help)
            ->type_name("REAL");
    }
}

int run_solve_single(const mfg::ModelParams& prm, double rho, const std::string& grid_text,
                     const std::string& out_path) {
    print_warnings(prm);
    const auto v = mfg::solve_single_agent(rho, prm);
    json j = envelope("solve-single", prm);
    j["rho"] = rho;
    j["result"] = {{"m", v.exps.m},          {"n", v.exps.n},
                   {"y0", v.policy.ratio()}, {"x_b", v.policy.x_b},
                   {"x_s", v.policy.x_s},    {"A", v.A},
                   {"B", v.B},               {"H", v.H},
                   {"C1", v.C1},             {"C2", v.C2}};
    emit(j);

    if (!grid_text.empty()) {
        const auto grid = parse_grid(grid_text);
        CsvWriter writer(out_path);
        writer.out() << csv_header("solve-single", prm, std::nullopt);
        writer.out() << "x,v,dv,d2v,ode_term,buy_term,sell_term\n";
        for (double x : grid.points()) {
            const auto h = mfg::hjb_residual(v, x);
            write_row(writer.out(), {x, v.value(x), v.deriv(x), v.second_deriv(x),
                                     h.ode_term, h.buy_term, h.sell_term});
        }
    }
    return 0;
}

int run_solve_mfg(const mfg::ModelParams& prm, const std::string& law_csv,
                  std::size_t law_points) {
    print_warnings(prm);
    const auto eq = mfg::solve_equilibrium(prm);
    json j = envelope("solve-mfg", prm);
    j["result"] = {{"rho_star", eq.rho_star},
                   {"x_b_star", eq.policy_star.x_b},
                   {"x_s_star", eq.policy_star.x_s},
                   {"K", eq.contraction_K},
                   {"iterations", eq.iterations},
                   {"m", eq.value_star.exps.m},
                   {"n", eq.value_star.exps.n},
                   {"y0", eq.policy_star.ratio()}};
    emit(j);

    if (!law_csv.empty()) {
        CsvWriter writer(law_csv);
        writer.out() << csv_header("solve-mfg", prm, std::nullopt);
        writer.out() << "x,density,cdf\n";
        const auto& law = eq.law_star;
        for (std::size_t i = 0; i < law_points; ++i) {
            const double frac =
                static_cast<double>(i) / static_cast<double>(law_points - 1);
            const double x =
                law.policy.x_b * std::pow(law.policy.x_s / law.policy.x_b, frac);
            write_row(writer.out(), {x, law.density(x), law.cdf(x)});
        }
    }
    return 0;
}

int run_sweep_cmd(const mfg::ModelParams& prm, const std::string& param_name,
                  const std::string& grid_text, double rho_single,
                  const std::string& out_path) {
    mfg::SweepSpec spec;
    spec.parameter = mfg::sweep_parameter_from_string(param_name);
    spec.base = prm;
    spec.rho_single = rho_single;
    spec.grid = grid_text.empty() ? mfg::default_sweep_grid(spec.parameter)
                                  : parse_grid(grid_text).points();
    const auto result = mfg::run_sweep(spec);
    for (const auto& skip : result.skips) {
        std::cerr << "note: grid point " << skip.value << " skipped: " << skip.reason
                  << "\n";
    }
    CsvWriter writer(out_path);
    writer.out() << csv_header("sweep " + param_name, prm, std::nullopt);
    writer.out() << "value,y0,xb_single,xs_single,rho_star,xb_mfg,xs_mfg,K\n";
    for (const auto& row : result.rows) {
        write_row(writer.out(), {row.value, row.y0, row.xb_single, row.xs_single,
                                 row.rho_star, row.xb_mfg, row.xs_mfg, row.K});
    }
    return result.rows.empty() ? 1 : 0;
}

int run_simulate(const mfg::ModelParams& prm, mfg::SimConfig cfg, bool policy_from_mfg,
                 double xb_flag, double xs_flag, double rho_flag, bool rho_given,
                 const std::string& out_path) {
    print_warnings(prm);
    mfg::ThresholdPolicy policy;
    double rho = rho_flag;
    if (policy_from_mfg) {
        const auto eq = mfg::solve_equilibrium(prm);
        policy = eq.policy_star;
        if (!rho_given) rho = eq.rho_star;
    } else {
        policy = mfg::ThresholdPolicy{xb_flag, xs_flag};
        if (!(policy.x_b > 0.0 && policy.x_b <= policy.x_s)) {
            throw mfg::ConfigError("requires 0 < xb <= xs");
        }
    }
    const auto summaries = mfg::simulate_ensemble(policy, prm, cfg, rho);
    CsvWriter writer(out_path);
    writer.out() << csv_header("simulate", prm, cfg.seed);
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "# policy x_b=%.17g x_s=%.17g rho=%.17g dt=%.17g horizon=%.17g\n",
                  policy.x_b, policy.x_s, rho, cfg.dt, cfg.horizon);
    writer.out() << buf;
    writer.out() << "path,terminal_state,xi_plus_total,xi_minus_total,discounted_payoff\n";
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        const auto& s = summaries[i];
        write_row(writer.out(), {static_cast<double>(i), s.terminal_state, s.xi_plus_total,
                                 s.xi_minus_total, s.discounted_payoff});
    }
    return 0;
}

int run_nash_gap(const mfg::ModelParams& prm, mfg::SimConfig cfg,
                 const std::vector<std::size_t>& Ns, std::size_t resamples,
                 const std::vector<double>& deviation_scales, const std::string& csv_path) {
    print_warnings(prm);
    const auto eq = mfg::solve_equilibrium(prm);
    std::vector<mfg::ThresholdPolicy> deviations;
    for (double s : deviation_scales) {
        deviations.push_back(
            mfg::ThresholdPolicy{s * eq.policy_star.x_b, s * eq.policy_star.x_s});
    }
    const auto rep = mfg::nash_gap_experiment(prm, eq, Ns, deviations, cfg, resamples);

    json j = envelope("nash-gap", prm);
    j["seed"] = cfg.seed;
    j["resamples"] = resamples;
    j["paths_per_policy"] = cfg.n_paths;
    j["rho_star"] = eq.rho_star;
    json points = json::array();
    for (const auto& pt : rep.points) {
        points.push_back({{"N", pt.N},
                          {"deviation_stat", pt.deviation_stat},
                          {"gap", pt.gap},
                          {"gap_stderr", pt.gap_stderr},
                          {"policy_gaps", pt.policy_gaps},
                          {"policy_stderrs", pt.policy_stderrs}});
    }
    j["result"] = {{"points", points}, {"fitted_slope", rep.fitted_slope}};
    emit(j);

    if (!csv_path.empty()) {
        CsvWriter writer(csv_path);
        writer.out() << csv_header("nash-gap", prm, cfg.seed);
        writer.out() << "N,deviation_stat,gap,stderr\n";
        for (const auto& pt : rep.points) {
            write_row(writer.out(), {static_cast<double>(pt.N), pt.deviation_stat, pt.gap,
                                     pt.gap_stderr});
        }
    }
    return 0;
}

int run_check_cmd(const mfg::ModelParams& prm, const mfg::CheckOptions& options) {
    const auto rep = mfg::run_check(prm, options);
    json j = envelope("check", prm);
    j["seed"] = options.seed;
    json items = json::array();
    for (const auto& item : rep.items) {
        items.push_back({{"name", item.name}, {"pass", item.pass}, {"detail", item.detail}});
    }
    j["result"] = {{"items", items},
                   {"warnings", rep.warnings},
                   {"all_pass", rep.all_pass},
                   {"first_failure", rep.first_failure()}};
    emit(j);
    if (!rep.all_pass) {
        std::cerr << "check failed: " << rep.first_failure() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(mfg::kToolName) +
                 ": thresholds, value functions, mean-field equilibrium and "
                 "path experiments for the partially reversible investment model"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(mfg::kVersion));

    GlobalOptions global;
    add_param_flags(app, global);

    // solve-single
    auto* single = app.add_subcommand("solve-single", "fixed-price threshold solve");
    double rho = 1.0;
    std::string grid_text, out_path;
    single->add_option("--rho", rho, "exogenous price (> 0)");
    single->add_option("--grid", grid_text, "CSV value grid as lo:hi:n");
    single->add_option("--out", out_path, "CSV output path (default stdout)");

    // solve-mfg
    auto* mfg_cmd = app.add_subcommand("solve-mfg", "equilibrium price and thresholds");
    std::string law_csv;
    std::size_t law_points = 200;
    mfg_cmd->add_option("--law-csv", law_csv, "write the stationary law to this CSV");
    mfg_cmd->add_option("--law-points", law_points, "grid size for --law-csv")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "one-parameter comparative statics");
    std::string sweep_param = "lambda";
    std::string sweep_grid, sweep_out;
    double rho_single = 1.0;
    sweep_cmd->add_option("--param", sweep_param, "lambda|delta|gamma|r|alpha|rho")
        ->required();
    sweep_cmd->add_option("--grid", sweep_grid, "grid as lo:hi:n (documented default)");
    sweep_cmd->add_option("--single-rho", rho_single, "price for the single-agent columns");
    sweep_cmd->add_option("--out", sweep_out, "CSV output path (default stdout)");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "reflected controlled paths");
    mfg::SimConfig sim_cfg;
    sim_cfg.dt = 1e-3;
    sim_cfg.horizon = 10.0;
    sim_cfg.n_paths = 1000;
    bool policy_from_mfg = false;
    double xb_flag = 0.0, xs_flag = 0.0, rho_flag = 1.0;
    std::string sim_out;
    sim_cmd->add_option("--paths", sim_cfg.n_paths, "number of paths");
    sim_cmd->add_option("--dt", sim_cfg.dt, "time step");
    sim_cmd->add_option("--horizon", sim_cfg.horizon, "simulated time span");
    sim_cmd->add_option("--seed", sim_cfg.seed, "RNG seed (echoed in the output)");
    sim_cmd->add_option("--burn-in", sim_cfg.burn_in, "transient fraction in [0,1)");
    sim_cmd->add_option("--threads", sim_cfg.n_threads, "worker threads (0 = hardware)");
    auto* from_mfg = sim_cmd->add_flag("--policy-from-mfg", policy_from_mfg,
                                       "use the equilibrium thresholds and price");
    auto* xb_opt = sim_cmd->add_option("--xb", xb_flag, "expansion threshold");
    auto* xs_opt = sim_cmd->add_option("--xs", xs_flag, "contraction threshold");
    auto* rho_opt = sim_cmd->add_option("--rho", rho_flag, "price for the payoff integral");
    sim_cmd->add_option("--out", sim_out, "CSV output path (default stdout)");
    xb_opt->needs(xs_opt);
    xs_opt->needs(xb_opt);
    from_mfg->excludes(xb_opt);

    // nash-gap
    auto* gap_cmd = app.add_subcommand("nash-gap", "equilibrium approximation experiment");
    std::vector<std::size_t> Ns{10, 100, 1000, 10000};
    std::size_t resamples = 10000;
    std::vector<double> deviation_scales;  // empty = built-in defaults
    mfg::SimConfig gap_cfg;
    gap_cfg.dt = 5e-4;
    gap_cfg.horizon = 0.0;  // 0 = derive from the discount rate
    gap_cfg.n_paths = 1500;
    std::string gap_csv;
    gap_cmd->add_option("--N", Ns, "opponent counts")->delimiter(',');
    gap_cmd->add_option("--samples", resamples, "resamples per N for the price deviation");
    gap_cmd->add_option("--paths", gap_cfg.n_paths, "payoff paths per policy");
    gap_cmd->add_option("--dt", gap_cfg.dt, "payoff time step");
    gap_cmd->add_option("--horizon", gap_cfg.horizon,
                        "payoff horizon (0 = sized so e^{-rT} < 1e-6)");
    gap_cmd->add_option("--seed", gap_cfg.seed, "RNG seed (echoed in the output)");
    gap_cmd->add_option("--threads", gap_cfg.n_threads, "worker threads (0 = hardware)");
    gap_cmd->add_option("--deviations", deviation_scales,
                        "threshold scale factors to test (default 0.8,1.25 plus the "
                        "perturbed-price best response)")
        ->delimiter(',');
    gap_cmd->add_option("--csv", gap_csv, "also write (N, deviation_stat, gap, stderr)");

    // check
    auto* check_cmd = app.add_subcommand("check", "run the full invariant suite");
    mfg::CheckOptions check_opt;
    bool no_sim = false;
    check_cmd->add_option("--sim-paths", check_opt.sim_paths, "reduced simulation size");
    check_cmd->add_option("--seed", check_opt.seed, "RNG seed for the simulation item");
    check_cmd->add_option("--threads", check_opt.n_threads, "worker threads");
    check_cmd->add_flag("--no-sim", no_sim, "skip the reduced simulation item");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const auto prm = global.resolve();
        if (single->parsed()) return run_solve_single(prm, rho, grid_text, out_path);
        if (mfg_cmd->parsed()) return run_solve_mfg(prm, law_csv, law_points);
        if (sweep_cmd->parsed()) {
            return run_sweep_cmd(prm, sweep_param, sweep_grid, rho_single, sweep_out);
        }
        if (sim_cmd->parsed()) {
            if (!policy_from_mfg && xb_opt->count() == 0) policy_from_mfg = true;
            return run_simulate(prm, sim_cfg, policy_from_mfg, xb_flag, xs_flag, rho_flag,
                                rho_opt->count() > 0, sim_out);
        }
        if (gap_cmd->parsed()) {
            if (gap_cfg.horizon <= 0.0) {
                gap_cfg.horizon = 14.0 / prm.r;  // e^{-rT} < 1e-6
            }
            return run_nash_gap(prm, gap_cfg, Ns, resamples, deviation_scales, gap_csv);
        }
        if (check_cmd->parsed()) {
            check_opt.run_simulation = !no_sim;
            return run_check_cmd(prm, check_opt);
        }
    } catch (const mfg::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
