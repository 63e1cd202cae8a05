#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "renewopt/controller.hpp"
#include "renewopt/environment.hpp"
#include "renewopt/oracle.hpp"
#include "renewopt/policy.hpp"

namespace renewopt {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    EnvSpec env;  // env.seed is the base seed; path i draws substream(seed, i)
    std::vector<std::string> policies{"proposed"};
    std::uint64_t frames = 1000;
    std::uint64_t paths = 1;
    std::optional<ThetaBracket> bracket;  // default: the moment bracket
    std::optional<double> theta0;         // default: bracket.theta_min
    std::vector<std::uint64_t> checkpoints;  // empty -> geometric grid
    std::uint64_t record_stride = 1;         // trajectory sink only
    std::uint64_t workers = 0;               // 0 -> hardware concurrency
    std::size_t mc_samples = 200000;  // per-evaluation budget for the MC oracle
    double tol = 1e-9;
    // Invoked once per finished (policy, path), possibly from worker threads;
    // calls for distinct paths may interleave.
    std::function<void(std::string_view policy, std::uint64_t path, const RunRecord&)>
        trajectory_sink;
};

// Power-of-two grid {1, 2, 4, ...} up to `frames`, plus `frames` itself.
// Geometric spacing keeps log-log rate fits well conditioned.
inline std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t frames) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t k = 1; k < frames; k *= 2) out.push_back(k);
    out.push_back(frames);
    return out;
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

// Per-path running state captured at a checkpoint: the sums over frames
// 0..k-1 and the policy's auxiliary value after k updates (NaN if none).
struct PathCheckpoint {
    double sum_t = 0.0;
    double sum_r = 0.0;
    double theta = 0.0;
};

struct CheckpointStats {
    std::uint64_t k = 0;
    double mean_ratio = 0.0;  // mean over paths of the running ratio
    double stderr_ratio = 0.0;
    double gap = 0.0;  // mean over paths of |theta* - running ratio|
    double stderr_gap = 0.0;
    double mse = 0.0;  // mean over paths of (theta[k] - theta*)^2
    double stderr_mse = 0.0;
    // Ratio of pooled sums across paths: the estimator of the ratio of
    // expectations, which is what the decay bounds govern.
    double exp_ratio = 0.0;
    double exp_gap = 0.0;
    double stderr_exp_gap = 0.0;  // delta-method standard error
};

struct RejectionStats {
    std::uint64_t offered = 0;   // frames with at least one real option
    std::uint64_t rejected = 0;  // of those, frames where the idle option won
    double rate = std::numeric_limits<double>::quiet_NaN();
    double std_error = std::numeric_limits<double>::quiet_NaN();
};

struct PolicyOutcome {
    std::string policy;
    std::vector<CheckpointStats> checkpoints;
    std::vector<double> final_ratios;  // per path, after all frames
    RejectionStats rejection;          // meaningful for the project system only
};

struct RunSummary {
    EnvSpec env;
    ThetaBracket bracket;
    double theta0 = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t paths = 0;
    std::vector<std::uint64_t> checkpoints;
    OracleResult oracle;
    std::vector<PolicyOutcome> policies;
};

// ---------------------------------------------------------------------------
// Golden optimal ratios for the project system
// ---------------------------------------------------------------------------

// The project system has no closed-form optimal ratio. These values were
// produced by the committed high-budget Monte-Carlo bisection below and are
// regenerable with the `golden` build target:
//   renewopt solve --env systemC --p <param> --seed 424242
//       --mc-samples 10000000 --theta-min 0 --theta-max 50
struct GoldenTheta {
    double param;
    double theta_star;
    double std_error;
    std::uint64_t seed;
    std::size_t samples;
};

inline constexpr std::array<GoldenTheta, 4> kGoldenProjectTheta{{
    {0.0, 30.8898926, 0.00487429201, 424242, 10000000},
    {0.3, 33.7463379, 0.0043149506, 424242, 10000000},
    {0.6, 36.0168457, 0.00375062681, 424242, 10000000},
    {0.9, 37.8723145, 0.00324128535, 424242, 10000000},
}};

inline std::optional<OracleResult> golden_theta(const EnvSpec& spec) {
    if (spec.kind != SystemKind::SystemC) return std::nullopt;
    for (const GoldenTheta& g : kGoldenProjectTheta) {
        if (std::abs(g.param - spec.param) <= 1e-12) {
            OracleResult res;
            res.theta_star = g.theta_star;
            res.method = SolveMethod::MonteCarloBisection;
            res.std_error = g.std_error;
            res.tolerance = 0.0;
            return res;
        }
    }
    return std::nullopt;
}

// Closed forms where available; otherwise the golden table, falling back to a
// fresh Monte-Carlo bisection with the configured budget.
inline OracleResult resolve_theta_star(const EnvSpec& spec, const ThetaBracket& bracket,
                                       double tol, std::size_t mc_samples) {
    if (spec.kind == SystemKind::SystemC) {
        if (auto g = golden_theta(spec)) return *g;
        return bisect_theta_star_mc(spec, bracket, mc_samples, spec.seed, tol);
    }
    return solve_theta_star(spec, tol, bracket);
}

// ---------------------------------------------------------------------------
// Aggregation helpers (shared with tests that recompute from raw CSVs)
// ---------------------------------------------------------------------------

struct MeanStderr {
    double mean = 0.0;
    double std_error = 0.0;
};

inline MeanStderr mean_stderr(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(n);
    if (n == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double variance = ss / static_cast<double>(n - 1);
    return {mean, std::sqrt(variance / static_cast<double>(n))};
}

inline CheckpointStats aggregate_checkpoint(std::uint64_t k,
                                            std::span<const PathCheckpoint> paths,
                                            double theta_star) {
    const std::size_t n = paths.size();
    std::vector<double> ratios(n), gaps(n), mses(n);
    double pooled_t = 0.0, pooled_r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ratios[i] = paths[i].sum_r / paths[i].sum_t;
        gaps[i] = std::abs(theta_star - ratios[i]);
        const double d = paths[i].theta - theta_star;
        mses[i] = d * d;
        pooled_t += paths[i].sum_t;
        pooled_r += paths[i].sum_r;
    }
    CheckpointStats s;
    s.k = k;
    const MeanStderr mr = mean_stderr(ratios);
    s.mean_ratio = mr.mean;
    s.stderr_ratio = mr.std_error;
    const MeanStderr mg = mean_stderr(gaps);
    s.gap = mg.mean;
    s.stderr_gap = mg.std_error;
    const MeanStderr mm = mean_stderr(mses);
    s.mse = mm.mean;
    s.stderr_mse = mm.std_error;

    s.exp_ratio = pooled_r / pooled_t;
    s.exp_gap = std::abs(theta_star - s.exp_ratio);
    if (n > 1) {
        // Delta method for var(mean_r / mean_t) from the per-path sums.
        const double mean_t = pooled_t / static_cast<double>(n);
        const double mean_r = pooled_r / static_cast<double>(n);
        double s_tt = 0.0, s_rr = 0.0, s_rt = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dt = paths[i].sum_t - mean_t;
            const double dr = paths[i].sum_r - mean_r;
            s_tt += dt * dt;
            s_rr += dr * dr;
            s_rt += dr * dt;
        }
        const double denom = static_cast<double>(n - 1);
        s_tt /= denom;
        s_rr /= denom;
        s_rt /= denom;
        const double rho = s.exp_ratio;
        const double var =
            (s_rr - 2.0 * rho * s_rt + rho * rho * s_tt) / static_cast<double>(n);
        s.stderr_exp_gap = var > 0.0 ? std::sqrt(var) / mean_t : 0.0;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Experiment runner
// ---------------------------------------------------------------------------

namespace detail {

inline void parallel_for(std::uint64_t count, std::uint64_t workers,
                         const std::function<void(std::uint64_t)>& body) {
    std::uint64_t n = workers == 0 ? std::thread::hardware_concurrency() : workers;
    n = std::clamp<std::uint64_t>(n, 1, count == 0 ? 1 : count);
    if (n <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto work = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::scoped_lock lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (std::uint64_t w = 0; w < n; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline Policy make_policy(std::string_view name, const ThetaBracket& bracket, double t_min,
                          double theta0, double theta_star) {
    if (name == "proposed")
        return Policy::proposed(ControllerState::initial(bracket, t_min, theta0));
    if (name == "greedy") return Policy::greedy();
    if (name == "theta-empirical") return Policy::theta_empirical(bracket);
    if (name == "fixed-theta") return Policy::fixed_theta(theta_star);
    throw std::invalid_argument("unknown policy: " + std::string(name));
}

struct PathResult {
    std::vector<PathCheckpoint> checkpoints;
    double final_ratio = 0.0;
    std::uint64_t offered = 0;
    std::uint64_t rejected = 0;
};

}  // namespace detail

inline void validate(const ExperimentConfig& cfg) {
    validate(cfg.env);
    if (cfg.frames < 1) throw std::invalid_argument("ExperimentConfig: frames must be >= 1");
    if (cfg.paths < 1) throw std::invalid_argument("ExperimentConfig: paths must be >= 1");
    if (cfg.record_stride < 1)
        throw std::invalid_argument("ExperimentConfig: record_stride must be >= 1");
    if (cfg.policies.empty())
        throw std::invalid_argument("ExperimentConfig: need at least one policy");
    for (std::uint64_t k : cfg.checkpoints)
        if (k < 1 || k > cfg.frames)
            throw std::invalid_argument("ExperimentConfig: checkpoints must lie in [1, frames]");
}

// Runs `paths` independent seeded sample paths per policy and aggregates at
// the checkpoints. All policies see identical frame streams (path i uses
// substream(seed, i) regardless of policy), which makes pairwise policy
// comparisons common-random-number comparisons. Deterministic given the
// config: worker scheduling never affects results because aggregation order
// is fixed by path index.
inline RunSummary run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    const MomentConstants m = moments(cfg.env);
    const ThetaBracket bracket =
        cfg.bracket ? *cfg.bracket : default_bracket(m.t_min, m.t_max, m.r_min, m.r_max);
    const double theta0 = cfg.theta0 ? *cfg.theta0 : bracket.theta_min;
    if (!(theta0 >= bracket.theta_min && theta0 <= bracket.theta_max))
        throw std::invalid_argument("run_experiment: theta0 must lie in the bracket");

    std::vector<std::uint64_t> checkpoints =
        cfg.checkpoints.empty() ? geometric_checkpoints(cfg.frames) : cfg.checkpoints;
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

    OracleResult oracle;
    try {
        oracle = resolve_theta_star(cfg.env, bracket, cfg.tol, cfg.mc_samples);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("run_experiment: cannot resolve theta*: ") +
                                 e.what());
    }
    const double theta_star = oracle.theta_star;

    RunSummary summary;
    summary.env = cfg.env;
    summary.bracket = bracket;
    summary.theta0 = theta0;
    summary.frames = cfg.frames;
    summary.paths = cfg.paths;
    summary.checkpoints = checkpoints;
    summary.oracle = oracle;

    for (const std::string& name : cfg.policies) {
        // Fail fast on unknown names before spawning workers.
        detail::make_policy(name, bracket, m.t_min, theta0, theta_star);

        std::vector<detail::PathResult> results(cfg.paths);
        detail::parallel_for(cfg.paths, cfg.workers, [&](std::uint64_t path) {
            Environment env(cfg.env, path);
            Policy policy = detail::make_policy(name, bracket, m.t_min, theta0, theta_star);
            detail::PathResult& res = results[path];
            res.checkpoints.resize(checkpoints.size());
            RunRecord record;
            const bool tracing = static_cast<bool>(cfg.trajectory_sink);

            Frame frame;
            double sum_t = 0.0, sum_r = 0.0;
            std::size_t next_cp = 0;
            for (std::uint64_t k = 0; k < cfg.frames; ++k) {
                env.next_frame(frame);
                const double theta_pre = policy.working_theta();
                const Decision d = policy.act(frame.set);
                sum_t += d.t;
                sum_r += d.r;
                if (cfg.env.kind == SystemKind::SystemC && frame.task_type >= 1) {
                    ++res.offered;
                    if (d == kIdleOption) ++res.rejected;
                }
                if (tracing && (k % cfg.record_stride == 0 || k + 1 == cfg.frames))
                    record.push_back({k, theta_pre, d.t, d.r, sum_r / sum_t});
                if (next_cp < checkpoints.size() && k + 1 == checkpoints[next_cp]) {
                    res.checkpoints[next_cp] = {sum_t, sum_r, policy.working_theta()};
                    ++next_cp;
                }
            }
            res.final_ratio = sum_r / sum_t;
            if (tracing) cfg.trajectory_sink(name, path, record);
        });

        PolicyOutcome outcome;
        outcome.policy = name;
        outcome.checkpoints.reserve(checkpoints.size());
        std::vector<PathCheckpoint> column(cfg.paths);
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
            for (std::uint64_t i = 0; i < cfg.paths; ++i)
                column[i] = results[i].checkpoints[c];
            outcome.checkpoints.push_back(
                aggregate_checkpoint(checkpoints[c], column, theta_star));
        }
        outcome.final_ratios.reserve(cfg.paths);
        for (const auto& r : results) outcome.final_ratios.push_back(r.final_ratio);

        if (cfg.env.kind == SystemKind::SystemC) {
            RejectionStats rej;
            std::vector<double> path_rates;
            path_rates.reserve(cfg.paths);
            for (const auto& r : results) {
                rej.offered += r.offered;
                rej.rejected += r.rejected;
                if (r.offered > 0)
                    path_rates.push_back(static_cast<double>(r.rejected) /
                                         static_cast<double>(r.offered));
            }
            if (rej.offered > 0) {
                rej.rate =
                    static_cast<double>(rej.rejected) / static_cast<double>(rej.offered);
                rej.std_error = mean_stderr(path_rates).std_error;
            }
            outcome.rejection = rej;
        }
        summary.policies.push_back(std::move(outcome));
    }
    return summary;
}

// ---------------------------------------------------------------------------
// Decay-bound verification
// ---------------------------------------------------------------------------

struct BoundConstants {
    double b = 0.0;   // (1/2) E[(R - theta T)^2] <= b for every theta in the bracket
    double c1 = 0.0;  // E[T^2] <= c1
};

// Valid (not necessarily tight) constants for the bound formulas. For the
// closed-form systems the worst |r - theta t| is exact: per decision it is
// convex in theta, so only the bracket ends matter, and on the concave curve
// the extremes sit at the domain ends or the interior stationary point. The
// project system uses the conservative moment-envelope bound.
inline BoundConstants derive_constants(const EnvSpec& spec, const ThetaBracket& bracket) {
    validate(spec);
    const MomentConstants m = moments(spec);
    double worst = 0.0;
    const double ends[2] = {bracket.theta_min, bracket.theta_max};
    switch (spec.kind) {
        case SystemKind::SystemA: {
            const Decision opts[] = {{1.0, 3.0}, {2.0, 3.0}, {1.0, 1.0}};
            for (double theta : ends)
                for (const Decision& d : opts)
                    worst = std::max(worst, std::abs(d.r - theta * d.t));
            break;
        }
        case SystemKind::SystemB: {
            const Curve c{CurveKind::ConcaveQuadratic, 1.0, 2.0};
            for (double theta : ends) {
                worst = std::max(worst, std::abs(1.0 - theta));  // inflexible type
                const double xs[3] = {c.x_lo, c.x_hi,
                                      std::clamp(2.0 - theta / 2.0, c.x_lo, c.x_hi)};
                for (double x : xs) {
                    const Decision d = c.at(x);
                    worst = std::max(worst, std::abs(d.r - theta * d.t));
                }
            }
            break;
        }
        case SystemKind::SystemC: {
            const double r_abs = std::max(std::abs(m.r_min), std::abs(m.r_max));
            const double theta_abs =
                std::max(std::abs(bracket.theta_min), std::abs(bracket.theta_max));
            worst = r_abs + theta_abs * m.t_max;
            break;
        }
    }
    return {0.5 * worst * worst, m.c1};
}

// Which proved envelope a report row checks. GapSqrt is the general
// O(1/sqrt(K)) gap bound, GapLog the strongly-concave O(log K / K) bound,
// ThetaMse the O(1/k) mean-squared-error bound on the auxiliary variable.
enum class BoundKind { GapSqrt, GapLog, ThetaMse };

inline std::string_view bound_name(BoundKind k) {
    switch (k) {
        case BoundKind::GapSqrt: return "gap-sqrt";
        case BoundKind::GapLog: return "gap-log";
        case BoundKind::ThetaMse: return "theta-mse";
    }
    return "?";
}

struct BoundRow {
    std::uint64_t k = 0;
    BoundKind kind = BoundKind::GapSqrt;
    // Empirical estimate lowered by four standard errors (the uniform
    // statistical slack), floored at zero since the true quantity is
    // nonnegative.
    double empirical = 0.0;
    double bound = 0.0;
    double slack = 0.0;  // bound - empirical
};

struct BoundReport {
    double b = 0.0;
    double c1 = 0.0;
    double curvature = std::numeric_limits<double>::quiet_NaN();  // GapLog only
    double t_min = 0.0;
    double theta0 = 0.0;
    double theta_star = 0.0;
    std::vector<BoundRow> rows;

    bool all_hold() const {
        for (const BoundRow& r : rows)
            if (!(r.slack >= 0.0)) return false;
        return true;
    }
};

// Evaluates every applicable proved bound at every checkpoint of the proposed
// policy's outcome. The gap bounds govern the ratio of expected sums, so they
// are compared against the pooled-ratio gap; the MSE bound is compared
// against the mean squared deviation of the auxiliary variable. The
// strongly-concave bound applies only to the curve system, whose certified
// curvature constant is 1/q.
inline BoundReport check_bounds(const RunSummary& summary, const BoundConstants& constants) {
    const PolicyOutcome* proposed = nullptr;
    for (const PolicyOutcome& p : summary.policies)
        if (p.policy == "proposed") proposed = &p;
    if (!proposed)
        throw std::invalid_argument("check_bounds: summary has no proposed-policy outcome");

    const MomentConstants m = moments(summary.env);
    BoundReport report;
    report.b = constants.b;
    report.c1 = constants.c1;
    report.t_min = m.t_min;
    report.theta0 = summary.theta0;
    report.theta_star = summary.oracle.theta_star;
    const bool strongly_concave = summary.env.kind == SystemKind::SystemB;
    if (strongly_concave) report.curvature = 1.0 / summary.env.param;

    const double b = constants.b;
    const double t = m.t_min;
    const double dev0 = std::abs(summary.theta0 - report.theta_star);

    for (const CheckpointStats& s : proposed->checkpoints) {
        const double k = static_cast<double>(s.k);
        {
            BoundRow row;
            row.k = s.k;
            row.kind = BoundKind::ThetaMse;
            row.empirical = std::max(s.mse - 4.0 * s.stderr_mse, 0.0);
            row.bound = 2.0 * b / (k * t * t);
            row.slack = row.bound - row.empirical;
            report.rows.push_back(row);
        }
        if (s.k >= 2) {
            const double gap_lcb = std::max(s.exp_gap - 4.0 * s.stderr_exp_gap, 0.0);
            {
                BoundRow row;
                row.k = s.k;
                row.kind = BoundKind::GapSqrt;
                row.empirical = gap_lcb;
                row.bound = std::sqrt(2.0 * constants.c1) / (k * t) *
                            (dev0 + (-std::sqrt(2.0 * b) + std::sqrt(8.0 * b * (k - 1.0))) / t);
                row.slack = row.bound - row.empirical;
                report.rows.push_back(row);
            }
            if (strongly_concave) {
                BoundRow row;
                row.k = s.k;
                row.kind = BoundKind::GapLog;
                row.empirical = gap_lcb;
                row.bound = (2.0 * dev0 * dev0 +
                             (4.0 * b / (t * t)) * (1.0 + std::log(k - 1.0))) /
                            (k * report.curvature * t);
                row.slack = row.bound - row.empirical;
                report.rows.push_back(row);
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Rate fitting and the near-threshold probe
// ---------------------------------------------------------------------------

enum class RateMetric { Gap, Mse };

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n_points = 0;
};

// Least-squares slope of log(metric) versus log(k) over checkpoints inside
// [k_lo, k_hi]. Zero or non-finite metric values are excluded; fewer than
// five usable points is an error.
inline RateFit fit_rate(const PolicyOutcome& outcome, RateMetric metric, std::uint64_t k_lo,
                        std::uint64_t k_hi) {
    std::vector<double> xs, ys;
    for (const CheckpointStats& s : outcome.checkpoints) {
        if (s.k < k_lo || s.k > k_hi) continue;
        const double v = metric == RateMetric::Gap ? s.gap : s.mse;
        if (!(v > 0.0) || !std::isfinite(v)) continue;
        xs.push_back(std::log(static_cast<double>(s.k)));
        ys.push_back(std::log(v));
    }
    if (xs.size() < 5)
        throw std::runtime_error("fit_rate: fewer than 5 positive metric points in range");
    const std::size_t n = xs.size();
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double resid = ys[i] - (fit.intercept + fit.slope * xs[i]);
        sse += resid * resid;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    fit.n_points = n;
    return fit;
}

struct ProbeRow {
    double delta = 0.0;
    double p = 0.0;
    std::uint64_t k = 0;
    double mean_gap = 0.0;
    double stderr_gap = 0.0;
    std::uint64_t n_paths = 0;
};

// Paired sweep around the two-choice system's decision threshold p = 1/2:
// for each delta, runs the proposed policy at p = 1/2 - delta and
// p = 1/2 + delta and tabulates the mean gap at every checkpoint.
inline std::vector<ProbeRow> near_threshold_probe(std::span<const double> deltas,
                                                  std::uint64_t frames, std::uint64_t paths,
                                                  std::uint64_t seed,
                                                  std::optional<ThetaBracket> bracket = {},
                                                  std::uint64_t workers = 0) {
    std::vector<ProbeRow> table;
    for (double delta : deltas) {
        if (!(delta >= 0.0 && delta <= 0.5))
            throw std::invalid_argument("near_threshold_probe: need p = 1/2 +- delta in [0, 1]");
        const double lo = 0.5 - delta;
        const double hi = 0.5 + delta;
        for (double p : {lo, hi}) {
            if (p == hi && delta == 0.0) continue;
            ExperimentConfig cfg;
            cfg.env = {SystemKind::SystemA, p, seed};
            cfg.policies = {"proposed"};
            cfg.frames = frames;
            cfg.paths = paths;
            cfg.bracket = bracket;
            cfg.workers = workers;
            const RunSummary summary = run_experiment(cfg);
            for (const CheckpointStats& s : summary.policies.front().checkpoints)
                table.push_back({delta, p, s.k, s.gap, s.stderr_gap, paths});
        }
    }
    return table;
}

}  // namespace renewopt
