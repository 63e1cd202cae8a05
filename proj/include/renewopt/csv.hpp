#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "renewopt/controller.hpp"
#include "renewopt/harness.hpp"

// CSV emission. All files are self-describing (header row, stable column
// order), UTF-8 with LF line endings, and locale-independent: doubles are
// printed with %.17g so every value round-trips bit-exactly.

namespace renewopt::csv {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt(std::uint64_t v) { return std::to_string(v); }

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: LF regardless of platform
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

// Schema: frame,theta,t,r,cum_ratio  (one file per sample path)
inline void write_trajectory(const std::string& path, const RunRecord& record) {
    auto out = open_out(path);
    out << "frame,theta,t,r,cum_ratio\n";
    for (const FrameRecord& f : record)
        out << fmt(f.frame) << ',' << fmt(f.theta) << ',' << fmt(f.t) << ',' << fmt(f.r)
            << ',' << fmt(f.cum_ratio) << '\n';
}

// Schema: checkpoint,mean_ratio,gap,mse,stderr_ratio,stderr_mse,n_paths
inline void write_summary(const std::string& path, const PolicyOutcome& outcome,
                          std::uint64_t n_paths) {
    auto out = open_out(path);
    out << "checkpoint,mean_ratio,gap,mse,stderr_ratio,stderr_mse,n_paths\n";
    for (const CheckpointStats& s : outcome.checkpoints)
        out << fmt(s.k) << ',' << fmt(s.mean_ratio) << ',' << fmt(s.gap) << ',' << fmt(s.mse)
            << ',' << fmt(s.stderr_ratio) << ',' << fmt(s.stderr_mse) << ',' << fmt(n_paths)
            << '\n';
}

// Ratio-of-pooled-sums companion to the summary file (the estimator the decay
// bounds govern). Schema: checkpoint,exp_ratio,exp_gap,stderr_exp_gap,n_paths
inline void write_expected_summary(const std::string& path, const PolicyOutcome& outcome,
                                   std::uint64_t n_paths) {
    auto out = open_out(path);
    out << "checkpoint,exp_ratio,exp_gap,stderr_exp_gap,n_paths\n";
    for (const CheckpointStats& s : outcome.checkpoints)
        out << fmt(s.k) << ',' << fmt(s.exp_ratio) << ',' << fmt(s.exp_gap) << ','
            << fmt(s.stderr_exp_gap) << ',' << fmt(n_paths) << '\n';
}

// Schema: checkpoint,bound_name,empirical,bound,slack
// `empirical` is the estimate lowered by four standard errors.
inline void write_bounds(const std::string& path, const BoundReport& report) {
    auto out = open_out(path);
    out << "checkpoint,bound_name,empirical,bound,slack\n";
    for (const BoundRow& r : report.rows)
        out << fmt(r.k) << ',' << bound_name(r.kind) << ',' << fmt(r.empirical) << ','
            << fmt(r.bound) << ',' << fmt(r.slack) << '\n';
}

// Schema: delta,p,checkpoint,mean_gap,stderr_gap,n_paths
inline void write_probe(const std::string& path, std::span<const ProbeRow> rows) {
    auto out = open_out(path);
    out << "delta,p,checkpoint,mean_gap,stderr_gap,n_paths\n";
    for (const ProbeRow& r : rows)
        out << fmt(r.delta) << ',' << fmt(r.p) << ',' << fmt(r.k) << ',' << fmt(r.mean_gap)
            << ',' << fmt(r.stderr_gap) << ',' << fmt(r.n_paths) << '\n';
}

// Schema: policy,param,frames,paths,offered,rejected,rate,stderr
inline void write_rejection(const std::string& path, const RunSummary& summary) {
    auto out = open_out(path);
    out << "policy,param,frames,paths,offered,rejected,rate,stderr\n";
    for (const PolicyOutcome& p : summary.policies)
        out << p.policy << ',' << fmt(summary.env.param) << ',' << fmt(summary.frames) << ','
            << fmt(summary.paths) << ',' << fmt(p.rejection.offered) << ','
            << fmt(p.rejection.rejected) << ',' << fmt(p.rejection.rate) << ','
            << fmt(p.rejection.std_error) << '\n';
}

// Schema: metric,k_min,k_max,slope,intercept,r_squared,n_points
inline void write_rate_fit(const std::string& path, const std::string& metric,
                           std::uint64_t k_lo, std::uint64_t k_hi, const RateFit& fit) {
    auto out = open_out(path);
    out << "metric,k_min,k_max,slope,intercept,r_squared,n_points\n";
    out << metric << ',' << fmt(k_lo) << ',' << fmt(k_hi) << ',' << fmt(fit.slope) << ','
        << fmt(fit.intercept) << ',' << fmt(fit.r_squared) << ','
        << fmt(static_cast<std::uint64_t>(fit.n_points)) << '\n';
}

}  // namespace renewopt::csv
