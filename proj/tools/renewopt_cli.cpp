// Command-line front end for the renewal-reward optimization laboratory.
//
// Subcommands:
//   solve    compute the optimal reward-per-unit-time ratio for a system
//   run      simulate policies and write per-path trajectories + summaries
//   compare  multi-path policy comparison (summaries only)
//   rate     fit the decay rate of a convergence metric on a log-log grid
//   probe    paired sweep around the two-choice decision threshold p = 1/2
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "renewopt/csv.hpp"
#include "renewopt/harness.hpp"

namespace {

using namespace renewopt;

struct CommonOpts {
    std::string env;
    std::optional<double> p;
    std::optional<double> q;
    std::optional<std::uint64_t> seed;
    std::uint64_t frames = 1000;
    std::uint64_t paths = 1;
    std::vector<std::string> policies{"proposed"};
    std::optional<double> theta_min;
    std::optional<double> theta_max;
    std::optional<double> theta0;
    std::string checkpoints = "geometric";
    std::uint64_t record_stride = 1;
    std::string out = ".";
    std::uint64_t workers = 0;
    double tol = 1e-9;
    std::size_t mc_samples = 200000;
};

void add_env_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--env", o.env, "system to simulate")
        ->required()
        ->check(CLI::IsMember({"systemA", "systemB", "systemC"}));
    cmd->add_option("--p", o.p, "type probability (systemA) or project parameter (systemC)");
    cmd->add_option("--q", o.q, "flexible-type probability (systemB)");
    cmd->add_option("--theta-min", o.theta_min, "bracket override, lower end");
    cmd->add_option("--theta-max", o.theta_max, "bracket override, upper end");
    cmd->add_option("--tol", o.tol, "oracle tolerance");
    cmd->add_option("--mc-samples", o.mc_samples,
                    "samples per Monte-Carlo oracle evaluation (systemC)");
}

void add_experiment_flags(CLI::App* cmd, CommonOpts& o) {
    add_env_flags(cmd, o);
    cmd->add_option("--seed", o.seed, "base seed; all randomness flows from it")->required();
    cmd->add_option("--frames", o.frames, "frames per sample path");
    cmd->add_option("--paths", o.paths, "independent sample paths");
    cmd->add_option("--policies", o.policies,
                    "comma list of proposed,greedy,theta-empirical,fixed-theta")
        ->delimiter(',');
    cmd->add_option("--theta0", o.theta0, "initial auxiliary value (default: theta_min)");
    cmd->add_option("--checkpoints", o.checkpoints,
                    "comma list of frames, 'geometric', or 'all'");
    cmd->add_option("--record-stride", o.record_stride, "log every n-th trajectory frame");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--workers", o.workers, "max parallel paths (0 = hardware)");
}

EnvSpec make_env_spec(const CommonOpts& o, bool need_seed) {
    EnvSpec spec;
    if (o.env == "systemA") {
        spec.kind = SystemKind::SystemA;
        if (!o.p || o.q) throw CLI::ValidationError("systemA takes --p (and not --q)");
        spec.param = *o.p;
    } else if (o.env == "systemB") {
        spec.kind = SystemKind::SystemB;
        if (!o.q || o.p) throw CLI::ValidationError("systemB takes --q (and not --p)");
        spec.param = *o.q;
    } else {
        spec.kind = SystemKind::SystemC;
        if (!o.p || o.q) throw CLI::ValidationError("systemC takes --p (and not --q)");
        spec.param = *o.p;
    }
    if (o.seed) {
        spec.seed = *o.seed;
    } else if (need_seed) {
        throw CLI::ValidationError("--seed is required (no wall-clock seeding)");
    }
    validate(spec);
    return spec;
}

std::optional<ThetaBracket> make_bracket(const CommonOpts& o) {
    if (!o.theta_min && !o.theta_max) return std::nullopt;
    if (!o.theta_min || !o.theta_max)
        throw CLI::ValidationError("--theta-min and --theta-max must be given together");
    return ThetaBracket::make(*o.theta_min, *o.theta_max);
}

std::vector<std::uint64_t> parse_checkpoints(const std::string& text, std::uint64_t frames) {
    if (text == "geometric") return {};
    if (text == "all") {
        if (frames > 100000)
            throw CLI::ValidationError("--checkpoints all is limited to 100000 frames");
        std::vector<std::uint64_t> out(frames);
        for (std::uint64_t k = 0; k < frames; ++k) out[k] = k + 1;
        return out;
    }
    std::vector<std::uint64_t> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string token = text.substr(pos, comma - pos);
        try {
            out.push_back(std::stoull(token));
        } catch (const std::exception&) {
            throw CLI::ValidationError("bad checkpoint value: " + token);
        }
        pos = comma + 1;
    }
    if (out.empty()) throw CLI::ValidationError("empty --checkpoints list");
    return out;
}

ExperimentConfig make_config(const CommonOpts& o) {
    ExperimentConfig cfg;
    cfg.env = make_env_spec(o, /*need_seed=*/true);
    cfg.policies = o.policies;
    cfg.frames = o.frames;
    cfg.paths = o.paths;
    cfg.bracket = make_bracket(o);
    cfg.theta0 = o.theta0;
    cfg.checkpoints = parse_checkpoints(o.checkpoints, o.frames);
    cfg.record_stride = o.record_stride;
    cfg.workers = o.workers;
    cfg.mc_samples = o.mc_samples;
    cfg.tol = o.tol;
    return cfg;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void write_experiment_outputs(const CommonOpts& o, const RunSummary& summary) {
    std::filesystem::create_directories(o.out);
    for (const PolicyOutcome& outcome : summary.policies) {
        csv::write_summary(join_path(o.out, "summary_" + outcome.policy + ".csv"), outcome,
                           summary.paths);
        csv::write_expected_summary(
            join_path(o.out, "expected_" + outcome.policy + ".csv"), outcome, summary.paths);
        if (outcome.policy == "proposed") {
            const BoundConstants constants = derive_constants(summary.env, summary.bracket);
            csv::write_bounds(join_path(o.out, "bounds_proposed.csv"),
                              check_bounds(summary, constants));
        }
    }
    if (summary.env.kind == SystemKind::SystemC)
        csv::write_rejection(join_path(o.out, "rejection.csv"), summary);
}

void print_experiment_report(const RunSummary& summary) {
    std::printf("theta_star=%.9g (%s", summary.oracle.theta_star,
                std::string(method_name(summary.oracle.method)).c_str());
    if (summary.oracle.method == SolveMethod::MonteCarloBisection)
        std::printf(", std_error=%.3g", summary.oracle.std_error);
    std::printf(")\n");
    for (const PolicyOutcome& outcome : summary.policies) {
        const CheckpointStats& last = outcome.checkpoints.back();
        std::printf("%s: final mean ratio=%.6g (stderr %.3g), gap=%.6g, mse=%.6g\n",
                    outcome.policy.c_str(), last.mean_ratio, last.stderr_ratio, last.gap,
                    last.mse);
        if (summary.env.kind == SystemKind::SystemC && outcome.rejection.offered > 0)
            std::printf("%s: conditional rejection rate=%.4f (stderr %.4f)\n",
                        outcome.policy.c_str(), outcome.rejection.rate,
                        outcome.rejection.std_error);
    }
}

void cmd_solve(const CommonOpts& o) {
    const bool mc = o.env == "systemC";
    const EnvSpec spec = make_env_spec(o, /*need_seed=*/mc);
    const OracleResult res =
        solve_theta_star(spec, o.tol, make_bracket(o), o.mc_samples);
    std::printf("theta_star=%.9g\n", res.theta_star);
    if (res.t_star) std::printf("t_star=%.9g\n", *res.t_star);
    if (res.r_star) std::printf("r_star=%.9g\n", *res.r_star);
    std::printf("method=%s\n", std::string(method_name(res.method)).c_str());
    if (res.method == SolveMethod::MonteCarloBisection)
        std::printf("std_error=%.9g\n", res.std_error);
}

void cmd_run(const CommonOpts& o, bool with_trajectories) {
    ExperimentConfig cfg = make_config(o);
    std::filesystem::create_directories(o.out);
    if (with_trajectories) {
        const std::string dir = o.out;
        cfg.trajectory_sink = [dir](std::string_view policy, std::uint64_t path,
                                    const RunRecord& record) {
            char name[128];
            std::snprintf(name, sizeof name, "trajectory_%s_path%" PRIu64 ".csv",
                          std::string(policy).c_str(), path);
            csv::write_trajectory(join_path(dir, name), record);
        };
    }
    const RunSummary summary = run_experiment(cfg);
    write_experiment_outputs(o, summary);
    print_experiment_report(summary);
}

void cmd_rate(const CommonOpts& o, const std::string& metric, std::uint64_t k_lo,
              std::uint64_t k_hi) {
    ExperimentConfig cfg = make_config(o);
    const RunSummary summary = run_experiment(cfg);
    write_experiment_outputs(o, summary);
    const RateMetric m = metric == "gap" ? RateMetric::Gap : RateMetric::Mse;
    if (k_hi == 0) k_hi = cfg.frames;
    const RateFit fit = fit_rate(summary.policies.front(), m, k_lo, k_hi);
    csv::write_rate_fit(join_path(o.out, "rate_fit.csv"), metric, k_lo, k_hi, fit);
    std::printf("metric=%s k_range=[%" PRIu64 ",%" PRIu64 "]\n", metric.c_str(), k_lo, k_hi);
    std::printf("slope=%.9g\nintercept=%.9g\nr_squared=%.9g\nn_points=%zu\n", fit.slope,
                fit.intercept, fit.r_squared, fit.n_points);
}

void cmd_probe(const CommonOpts& o, const std::vector<double>& deltas) {
    const std::uint64_t seed = o.seed.value();  // enforced required by CLI
    const auto table = near_threshold_probe(deltas, o.frames, o.paths, seed,
                                            make_bracket(o), o.workers);
    std::filesystem::create_directories(o.out);
    csv::write_probe(join_path(o.out, "probe.csv"), table);
    std::printf("delta       p  checkpoint  mean_gap      stderr\n");
    for (const ProbeRow& r : table)
        std::printf("%5.3g  %6.3g  %10" PRIu64 "  %.6g  %.3g\n", r.delta, r.p, r.k,
                    r.mean_gap, r.stderr_gap);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online renewal-reward ratio optimization laboratory"};
    app.require_subcommand(1);

    CommonOpts solve_opts;
    auto* solve = app.add_subcommand("solve", "compute the optimal ratio theta*");
    add_env_flags(solve, solve_opts);
    solve->add_option("--seed", solve_opts.seed, "seed for the systemC Monte-Carlo oracle");
    solve->callback([&] { cmd_solve(solve_opts); });

    CommonOpts run_opts;
    auto* run = app.add_subcommand("run", "simulate and write trajectories + summaries");
    add_experiment_flags(run, run_opts);
    run->callback([&] { cmd_run(run_opts, /*with_trajectories=*/true); });

    CommonOpts compare_opts;
    auto* compare = app.add_subcommand("compare", "multi-path policy comparison");
    add_experiment_flags(compare, compare_opts);
    compare->callback([&] { cmd_run(compare_opts, /*with_trajectories=*/false); });

    CommonOpts rate_opts;
    std::string rate_metric = "mse";
    std::uint64_t rate_k_lo = 1;
    std::uint64_t rate_k_hi = 0;
    auto* rate = app.add_subcommand("rate", "fit the decay rate of gap or mse");
    add_experiment_flags(rate, rate_opts);
    rate->add_option("--metric", rate_metric, "metric to fit")
        ->check(CLI::IsMember({"gap", "mse"}));
    rate->add_option("--k-min", rate_k_lo, "lower end of the fit range");
    rate->add_option("--k-max", rate_k_hi, "upper end of the fit range (0 = frames)");
    rate->callback([&] { cmd_rate(rate_opts, rate_metric, rate_k_lo, rate_k_hi); });

    CommonOpts probe_opts;
    std::vector<double> probe_deltas;
    auto* probe = app.add_subcommand("probe", "near-threshold sweep on the two-choice system");
    probe->add_option("--deltas", probe_deltas, "comma list; runs p = 1/2 +- delta")
        ->required()
        ->delimiter(',');
    probe->add_option("--seed", probe_opts.seed, "base seed")->required();
    probe->add_option("--frames", probe_opts.frames, "frames per sample path");
    probe->add_option("--paths", probe_opts.paths, "independent sample paths");
    probe->add_option("--theta-min", probe_opts.theta_min, "bracket override, lower end");
    probe->add_option("--theta-max", probe_opts.theta_max, "bracket override, upper end");
    probe->add_option("--out", probe_opts.out, "output directory");
    probe->add_option("--workers", probe_opts.workers, "max parallel paths (0 = hardware)");
    probe->callback([&] { cmd_probe(probe_opts, probe_deltas); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
