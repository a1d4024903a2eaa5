#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mfg/equilibrium.hpp"
#include "mfg/params.hpp"
#include "mfg/single_agent.hpp"

namespace mfg {

/// Initial distribution of the pre-control state x_{0-}.
enum class InitialLawKind {
    BandMidpoint,  ///< point mass at sqrt(x_b * x_s) of the policy in use (default)
    PointMass,     ///< point mass at param1
    LogNormal,     ///< exp(param1 + param2 * Z)
    Uniform,       ///< uniform on [param1, param2]
};

struct InitialLawSpec {
    InitialLawKind kind = InitialLawKind::BandMidpoint;
    double param1 = 0.0;
    double param2 = 0.0;
};

struct SimConfig {
    double dt = 1e-3;
    double horizon = 10.0;
    double burn_in = 0.5;        ///< fraction of the horizon treated as transient
    std::uint64_t seed = 0;
    std::size_t n_paths = 1;
    InitialLawSpec initial_law;
    int n_threads = 0;           ///< 0 = hardware concurrency

    std::size_t n_steps() const;
    /// Enforces dt <= horizon/100, n_paths >= 1, burn_in in [0,1).
    void check() const;
};

/// Full record of one path: states on the time grid after control, cumulative
/// controls, and the realized discounted payoff
///   sum e^{-r t} [c rho x^alpha dt - p dxi+ + p(1-lambda) dxi-]
/// with the revenue accumulated by the left-endpoint rule. Index 0 holds the
/// state right after the t=0 jump.
struct PathResult {
    std::vector<double> times;
    std::vector<double> states;
    std::vector<double> xi_plus;   ///< cumulative, nondecreasing
    std::vector<double> xi_minus;  ///< cumulative, nondecreasing
    double discounted_payoff = 0.0;
};

struct PathSummary {
    double terminal_state = 0.0;
    double xi_plus_total = 0.0;
    double xi_minus_total = 0.0;
    double discounted_payoff = 0.0;
};

/// One Euler path: x <- x (1 + delta dt + gamma sqrt(dt) Z), then projection
/// onto [x_b, x_s] with the clipped amount recorded as the control increment.
/// At t=0 the state jumps to the nearest band edge if it starts outside.
/// Deterministic in (cfg.seed, path_index).
PathResult simulate_reflected_path(const ThresholdPolicy& policy, const ModelParams& params,
                                   const SimConfig& cfg, double rho,
                                   std::uint64_t path_index = 0);

/// Parallel ensemble of path summaries (payoff included), one RNG stream per
/// path index; results are independent of the thread count.
std::vector<PathSummary> simulate_ensemble(const ThresholdPolicy& policy,
                                           const ModelParams& params, const SimConfig& cfg,
                                           double rho);

/// Terminal states only; skips payoff accumulation for speed.
std::vector<double> sample_terminal_states(const ThresholdPolicy& policy,
                                           const ModelParams& params, const SimConfig& cfg);

/// Pooled states recorded at samples_per_path evenly spaced grid times in
/// [burn_in * horizon, horizon] (the last one is the terminal state), ordered
/// by (path, sample).
std::vector<double> collect_stationary_samples(const ThresholdPolicy& policy,
                                               const ModelParams& params,
                                               const SimConfig& cfg,
                                               std::size_t samples_per_path);

/// i.i.d. draws from the closed-form stationary law by inverse-CDF sampling.
std::vector<double> sample_stationary(const StationaryLaw& law, std::size_t n,
                                      std::uint64_t seed);

/// Kolmogorov-Smirnov distance between a sample and the analytic CDF.
double ks_distance(std::vector<double> samples, const StationaryLaw& law);

struct PayoffEstimate {
    double mean = 0.0;
    double stderr_mean = 0.0;
    bool truncation_warning = false;  ///< set when horizon * r < 5
};

/// Monte Carlo payoff of a threshold policy against pre-sampled opponent
/// prices, one price per path (opponent_rho.size() == cfg.n_paths). Paths use
/// streams derived from (cfg.seed, path index) only, so estimates for
/// different policies under the same cfg share Brownian increments.
PayoffEstimate estimate_payoff(const ThresholdPolicy& policy,
                               std::span<const double> opponent_rho,
                               const ModelParams& params, const SimConfig& cfg);

/// Per-path discounted payoffs behind estimate_payoff, for paired comparisons.
std::vector<double> payoff_per_path(const ThresholdPolicy& policy,
                                    std::span<const double> opponent_rho,
                                    const ModelParams& params, const SimConfig& cfg);

struct NashGapPoint {
    std::size_t N = 0;
    double deviation_stat = 0.0;  ///< E | mean_{j != i} rho(x_j) - rho* |
    double gap = 0.0;             ///< max over deviations of payoff improvement, >= 0
    double gap_stderr = 0.0;      ///< paired stderr of the maximizing deviation
    std::vector<double> policy_gaps;     ///< per tested deviation, unclipped
    std::vector<double> policy_stderrs;
};

struct NashGapReport {
    std::vector<std::size_t> N_values;
    std::vector<NashGapPoint> points;
    double fitted_slope = 0.0;  ///< least-squares slope of log(deviation_stat) vs log(N)
};

/// Empirical check of the 1/sqrt(N) equilibrium approximation. For each N:
/// the mean absolute deviation of the (N-1)-opponent average price from rho*
/// over n_resamples resamples of i.i.d. stationary opponents, and the payoff
/// gap of each tested deviation policy against the candidate equilibrium
/// policy under common random numbers. When deviations is empty the defaults
/// are the equilibrium thresholds scaled by 0.8 and 1.25 plus the best
/// response at the deviation_stat-perturbed price.
NashGapReport nash_gap_experiment(const ModelParams& params, const EquilibriumSolution& eq,
                                  std::span<const std::size_t> N_values,
                                  std::span<const ThresholdPolicy> deviations,
                                  const SimConfig& cfg, std::size_t n_resamples);

}  // namespace mfg
