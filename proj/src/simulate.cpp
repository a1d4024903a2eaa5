#include "mfg/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mfg/rng.hpp"

namespace mfg {

namespace {

// Stream-id bases keep the RNG streams of unrelated sampling jobs disjoint.
constexpr std::uint64_t kStreamNashStat = 0x100000000ULL;
constexpr std::uint64_t kStreamNashOpponents = 0x200000000ULL;
constexpr std::uint64_t kStreamStationary = 0x300000000ULL;
constexpr std::uint64_t kStreamBlock = 0x1000000ULL;

void parallel_chunks(std::size_t n, int n_threads,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (n_threads <= 0) {
        n_threads = static_cast<int>(std::thread::hardware_concurrency());
        if (n_threads <= 0) n_threads = 1;
    }
    n_threads = std::min<int>(n_threads, static_cast<int>(n));
    if (n_threads == 1) {
        fn(0, n);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto guarded = [&](std::size_t b, std::size_t e) {
        try {
            fn(b, e);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
        const std::size_t b = static_cast<std::size_t>(t) * chunk;
        if (b >= n) break;
        pool.emplace_back(guarded, b, std::min(n, b + chunk));
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

double draw_initial(const InitialLawSpec& law, const ThresholdPolicy& policy, PathRng& rng) {
    double x = 0.0;
    switch (law.kind) {
        case InitialLawKind::BandMidpoint:
            x = std::sqrt(policy.x_b * policy.x_s);
            break;
        case InitialLawKind::PointMass:
            x = law.param1;
            break;
        case InitialLawKind::LogNormal:
            x = std::exp(law.param1 + law.param2 * rng.normal());
            break;
        case InitialLawKind::Uniform:
            x = law.param1 + (law.param2 - law.param1) * rng.uniform01();
            break;
    }
    if (!(x >= 0.0)) throw std::invalid_argument("simulate: initial state must be >= 0");
    return x;
}

struct NullRecorder {
    void operator()(std::size_t, double, double, double, double) const {}
};

// One path. The recorder sees (step, t, post-control state, dxi+, dxi-) at
// every grid point including the t=0 jump. Payoff accumulation is compiled
// out when unused; the draw sequence is identical either way, so estimates
// for different policies under one seed share their Brownian increments.
template <bool WithPayoff, class Recorder>
PathSummary run_path(const ThresholdPolicy& policy, const ModelParams& params,
                     const SimConfig& cfg, double rho, std::uint64_t path_index,
                     Recorder&& record) {
    PathRng rng(cfg.seed, path_index);
    const double x_b = policy.x_b;
    const double x_s = policy.x_s;
    const double p = params.p;
    const double ps = params.sell_gain();

    double x = draw_initial(cfg.initial_law, policy, rng);
    double du = x < x_b ? x_b - x : 0.0;
    double dd = x > x_s ? x - x_s : 0.0;
    if (du > 0.0) x = x_b;
    if (dd > 0.0) x = x_s;
    double xi_up = du;
    double xi_dn = dd;
    double pay = -p * du + ps * dd;
    record(0, 0.0, x, du, dd);

    const std::size_t n_steps = cfg.n_steps();
    const double dt = cfg.dt;
    const double growth = 1.0 + params.delta * dt;
    const double vol = params.gamma * std::sqrt(dt);
    const double decay = std::exp(-params.r * dt);
    const double revenue_scale = params.c * rho * dt;
    double disc = 1.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        if constexpr (WithPayoff) {
            pay += disc * revenue_scale * std::pow(x, params.alpha);
        }
        double xn = x * (growth + vol * rng.normal());
        if (!(xn > 0.0)) {
            throw std::runtime_error(
                "simulate: state reached a nonpositive value; dt is too large for "
                "these coefficients");
        }
        du = 0.0;
        dd = 0.0;
        if (xn < x_b) {
            du = x_b - xn;
            xn = x_b;
        } else if (xn > x_s) {
            dd = xn - x_s;
            xn = x_s;
        }
        xi_up += du;
        xi_dn += dd;
        disc *= decay;
        if constexpr (WithPayoff) {
            if (du > 0.0 || dd > 0.0) pay += disc * (-p * du + ps * dd);
        }
        x = xn;
        record(k + 1, static_cast<double>(k + 1) * dt, x, du, dd);
    }
    return PathSummary{x, xi_up, xi_dn, pay};
}

double sum_sequential(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_mean = 0.0;
};

MeanStderr mean_stderr(std::span<const double> v) {
    const auto n = static_cast<double>(v.size());
    if (v.empty()) return {};
    const double mean = sum_sequential(v) / n;
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

std::size_t SimConfig::n_steps() const {
    return static_cast<std::size_t>(std::max<long long>(1, std::llround(horizon / dt)));
}

void SimConfig::check() const {
    if (!(dt > 0.0) || !(horizon > 0.0) || !(dt <= horizon / 100.0)) {
        throw std::invalid_argument("SimConfig: requires 0 < dt <= horizon/100");
    }
    if (n_paths < 1) throw std::invalid_argument("SimConfig: requires n_paths >= 1");
    if (!(burn_in >= 0.0 && burn_in < 1.0)) {
        throw std::invalid_argument("SimConfig: requires burn_in in [0,1)");
    }
}

PathResult simulate_reflected_path(const ThresholdPolicy& policy, const ModelParams& params,
                                   const SimConfig& cfg, double rho,
                                   std::uint64_t path_index) {
    cfg.check();
    PathResult out;
    const std::size_t n = cfg.n_steps() + 1;
    out.times.reserve(n);
    out.states.reserve(n);
    out.xi_plus.reserve(n);
    out.xi_minus.reserve(n);
    double cum_up = 0.0;
    double cum_dn = 0.0;
    auto recorder = [&](std::size_t, double t, double x, double du, double dd) {
        cum_up += du;
        cum_dn += dd;
        out.times.push_back(t);
        out.states.push_back(x);
        out.xi_plus.push_back(cum_up);
        out.xi_minus.push_back(cum_dn);
    };
    out.discounted_payoff =
        run_path<true>(policy, params, cfg, rho, path_index, recorder).discounted_payoff;
    return out;
}

std::vector<PathSummary> simulate_ensemble(const ThresholdPolicy& policy,
                                           const ModelParams& params, const SimConfig& cfg,
                                           double rho) {
    cfg.check();
    std::vector<PathSummary> out(cfg.n_paths);
    parallel_chunks(cfg.n_paths, cfg.n_threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            out[i] = run_path<true>(policy, params, cfg, rho, i, NullRecorder{});
        }
    });
    return out;
}

std::vector<double> sample_terminal_states(const ThresholdPolicy& policy,
                                           const ModelParams& params, const SimConfig& cfg) {
    cfg.check();
    std::vector<double> out(cfg.n_paths);
    parallel_chunks(cfg.n_paths, cfg.n_threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            out[i] = run_path<false>(policy, params, cfg, 0.0, i, NullRecorder{}).terminal_state;
        }
    });
    return out;
}

std::vector<double> collect_stationary_samples(const ThresholdPolicy& policy,
                                               const ModelParams& params,
                                               const SimConfig& cfg,
                                               std::size_t samples_per_path) {
    cfg.check();
    if (samples_per_path < 1) {
        throw std::invalid_argument("collect_stationary_samples: samples_per_path >= 1");
    }
    const std::size_t n_steps = cfg.n_steps();
    std::vector<std::size_t> targets(samples_per_path);
    for (std::size_t j = 0; j < samples_per_path; ++j) {
        const double frac =
            cfg.burn_in + (1.0 - cfg.burn_in) * static_cast<double>(j + 1) /
                              static_cast<double>(samples_per_path);
        targets[j] = static_cast<std::size_t>(std::llround(frac * static_cast<double>(n_steps)));
    }
    targets.back() = n_steps;

    std::vector<double> out(cfg.n_paths * samples_per_path);
    parallel_chunks(cfg.n_paths, cfg.n_threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            std::size_t next = 0;
            auto recorder = [&](std::size_t step, double, double x, double, double) {
                while (next < targets.size() && step == targets[next]) {
                    out[i * samples_per_path + next] = x;
                    ++next;
                }
            };
            run_path<false>(policy, params, cfg, 0.0, i, recorder);
        }
    });
    return out;
}

std::vector<double> sample_stationary(const StationaryLaw& law, std::size_t n,
                                      std::uint64_t seed) {
    std::vector<double> out(n);
    PathRng rng(seed, kStreamStationary);
    for (std::size_t i = 0; i < n; ++i) out[i] = law.inverse_cdf(rng.uniform01());
    return out;
}

double ks_distance(std::vector<double> samples, const StationaryLaw& law) {
    if (samples.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = law.cdf(samples[i]);
        const double hi = (static_cast<double>(i) + 1.0) / n - f;
        const double lo = f - static_cast<double>(i) / n;
        d = std::max(d, std::max(hi, lo));
    }
    return d;
}

std::vector<double> payoff_per_path(const ThresholdPolicy& policy,
                                    std::span<const double> opponent_rho,
                                    const ModelParams& params, const SimConfig& cfg) {
    cfg.check();
    if (opponent_rho.size() != cfg.n_paths) {
        throw std::invalid_argument(
            "payoff_per_path: opponent_rho must supply one price per path");
    }
    std::vector<double> out(cfg.n_paths);
    parallel_chunks(cfg.n_paths, cfg.n_threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            out[i] = run_path<true>(policy, params, cfg, opponent_rho[i], i, NullRecorder{})
                         .discounted_payoff;
        }
    });
    return out;
}

PayoffEstimate estimate_payoff(const ThresholdPolicy& policy,
                               std::span<const double> opponent_rho,
                               const ModelParams& params, const SimConfig& cfg) {
    const auto payoffs = payoff_per_path(policy, opponent_rho, params, cfg);
    const auto ms = mean_stderr(payoffs);
    PayoffEstimate est;
    est.mean = ms.mean;
    est.stderr_mean = ms.stderr_mean;
    est.truncation_warning = cfg.horizon * params.r < 5.0;
    return est;
}

NashGapReport nash_gap_experiment(const ModelParams& params, const EquilibriumSolution& eq,
                                  std::span<const std::size_t> N_values,
                                  std::span<const ThresholdPolicy> deviations,
                                  const SimConfig& cfg, std::size_t n_resamples) {
    cfg.check();
    if (N_values.empty()) throw std::invalid_argument("nash_gap_experiment: empty N_values");
    if (n_resamples < 2) throw std::invalid_argument("nash_gap_experiment: n_resamples >= 2");
    const auto exps = compute_exponents(params);
    const double rho_star = eq.rho_star;
    const double y0 = eq.policy_star.ratio();

    // Inverse-demand price of one stationary draw, as a single power of the
    // uniform variate.
    const auto& law = eq.law_star;
    const double pow_b = std::pow(law.policy.x_b, law.nu - 1.0);
    const double pow_span = std::pow(law.policy.x_s, law.nu - 1.0) - pow_b;
    const double price_expo = (1.0 - params.alpha) / (law.nu - 1.0);
    const auto draw_price = [&](PathRng& rng) {
        return params.a0 - params.a1 * std::pow(pow_b + rng.uniform01() * pow_span, price_expo);
    };

    // Every tested policy must start from the same initial distribution or
    // the payoffs are not comparable; resolve the policy-relative default
    // against the candidate equilibrium band once.
    SimConfig path_cfg = cfg;
    if (path_cfg.initial_law.kind == InitialLawKind::BandMidpoint) {
        path_cfg.initial_law = {InitialLawKind::PointMass,
                                std::sqrt(eq.policy_star.x_b * eq.policy_star.x_s), 0.0};
    }

    NashGapReport rep;
    rep.N_values.assign(N_values.begin(), N_values.end());
    rep.points.resize(N_values.size());

    for (std::size_t iN = 0; iN < N_values.size(); ++iN) {
        const std::size_t N = N_values[iN];
        if (N < 2) throw std::invalid_argument("nash_gap_experiment: requires N >= 2");
        auto& point = rep.points[iN];
        point.N = N;

        // (a) mean absolute deviation of the opponent-average price from rho*.
        std::vector<double> abs_dev(n_resamples);
        parallel_chunks(n_resamples, cfg.n_threads, [&](std::size_t b, std::size_t e) {
            for (std::size_t k = b; k < e; ++k) {
                PathRng rng(cfg.seed, kStreamNashStat + iN * kStreamBlock + k);
                double sum = 0.0;
                for (std::size_t j = 0; j + 1 < N; ++j) sum += draw_price(rng);
                abs_dev[k] = std::abs(sum / static_cast<double>(N - 1) - rho_star);
            }
        });
        point.deviation_stat = sum_sequential(abs_dev) / static_cast<double>(n_resamples);

        // (b) payoff gaps under common random numbers: per-path opponent
        // price averages are shared by every tested policy.
        std::vector<double> rho_bar(cfg.n_paths);
        parallel_chunks(cfg.n_paths, cfg.n_threads, [&](std::size_t b, std::size_t e) {
            for (std::size_t k = b; k < e; ++k) {
                PathRng rng(cfg.seed, kStreamNashOpponents + iN * kStreamBlock + k);
                double sum = 0.0;
                for (std::size_t j = 0; j + 1 < N; ++j) sum += draw_price(rng);
                rho_bar[k] = sum / static_cast<double>(N - 1);
            }
        });

        std::vector<ThresholdPolicy> tested(deviations.begin(), deviations.end());
        if (tested.empty()) {
            tested.push_back(ThresholdPolicy{0.8 * eq.policy_star.x_b, 0.8 * eq.policy_star.x_s});
            tested.push_back(
                ThresholdPolicy{1.25 * eq.policy_star.x_b, 1.25 * eq.policy_star.x_s});
            // Best response to the typical perturbed opponent price.
            tested.push_back(
                solve_thresholds(rho_star + point.deviation_stat, params, exps, y0));
        }

        const auto base_pay = payoff_per_path(eq.policy_star, rho_bar, params, path_cfg);
        std::size_t best = 0;
        for (std::size_t d = 0; d < tested.size(); ++d) {
            const auto dev_pay = payoff_per_path(tested[d], rho_bar, params, path_cfg);
            std::vector<double> diff(dev_pay.size());
            for (std::size_t k = 0; k < dev_pay.size(); ++k) diff[k] = dev_pay[k] - base_pay[k];
            const auto ms = mean_stderr(diff);
            point.policy_gaps.push_back(ms.mean);
            point.policy_stderrs.push_back(ms.stderr_mean);
            if (ms.mean > point.policy_gaps[best]) best = d;
        }
        point.gap = std::max(0.0, point.policy_gaps[best]);
        point.gap_stderr = point.policy_stderrs[best];
    }

    // Least-squares slope of log(deviation_stat) against log(N).
    const auto n_pts = static_cast<double>(rep.points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& pt : rep.points) {
        const double lx = std::log(static_cast<double>(pt.N));
        const double ly = std::log(pt.deviation_stat);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n_pts * sxx - sx * sx;
    rep.fitted_slope = denom != 0.0 ? (n_pts * sxy - sx * sy) / denom : 0.0;
    return rep;
}

}  // namespace mfg
