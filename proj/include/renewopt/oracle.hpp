#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "renewopt/controller.hpp"
#include "renewopt/decision.hpp"
#include "renewopt/environment.hpp"
#include "renewopt/rng.hpp"

namespace renewopt {

enum class SolveMethod { ClosedForm, Bisection, MonteCarloBisection };

inline std::string_view method_name(SolveMethod m) {
    switch (m) {
        case SolveMethod::ClosedForm: return "closed-form";
        case SolveMethod::Bisection: return "bisection";
        case SolveMethod::MonteCarloBisection: return "mc-bisection";
    }
    return "?";
}

struct OracleResult {
    double theta_star = 0.0;
    std::optional<double> t_star;
    std::optional<double> r_star;
    SolveMethod method = SolveMethod::ClosedForm;
    double tolerance = 0.0;
    // MonteCarloBisection only: residual one-sigma uncertainty of theta_star.
    double std_error = 0.0;
};

// Root function whose unique zero is the optimal ratio:
//   M(theta) = E[ sup over the frame's decision set of (r - theta * t) ].
// Strictly decreasing because every duration is positive. Exact evaluation is
// available for the two closed-form systems; the project system is estimated
// by m_function_mc instead.
inline double m_function(const EnvSpec& spec, double theta) {
    validate(spec);
    switch (spec.kind) {
        case SystemKind::SystemA: {
            const double p = spec.param;
            return (1.0 - p) * (3.0 - theta) +
                   p * std::max(3.0 - 2.0 * theta, 1.0 - theta);
        }
        case SystemKind::SystemB: {
            const double q = spec.param;
            const DecisionSet flexible =
                DecisionSet::curve({CurveKind::ConcaveQuadratic, 1.0, 2.0});
            return (1.0 - q) * (1.0 - theta) + q * best_response(flexible, theta).value;
        }
        case SystemKind::SystemC:
            throw std::invalid_argument(
                "m_function: project system has no exact form; use m_function_mc");
    }
    throw std::invalid_argument("m_function: unknown system kind");
}

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// Substream index reserved for oracle sampling so Monte-Carlo root finding
// never shares draws with experiment paths (paths use small indices).
inline constexpr std::uint64_t kOracleStream = 1ULL << 63;

// Sample mean and standard error of sup{r - theta t} over n independent
// frames. Supplying the same seed across theta values yields common random
// numbers: every evaluation regenerates the identical frame sequence.
inline McEstimate m_function_mc(const EnvSpec& spec, double theta, std::size_t n_samples,
                                std::uint64_t seed) {
    if (n_samples < 100)
        throw std::invalid_argument("m_function_mc: need at least 100 samples");
    EnvSpec sampling = spec;
    sampling.seed = seed;
    Environment env(sampling, kOracleStream);
    Frame frame;
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        env.next_frame(frame);
        const double v = best_response(frame.set, theta).value;
        const double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
    }
    const double n = static_cast<double>(n_samples);
    const double variance = m2 / (n - 1.0);
    return {mean, std::sqrt(variance / n)};
}

// Bisection on the exact root function. The bracket must straddle the root:
// M(theta_min) >= 0 >= M(theta_max); anything else signals wrong bounds.
inline OracleResult bisect_theta_star(const EnvSpec& spec, const ThetaBracket& bracket,
                                      double tol = 1e-9) {
    if (!(tol > 0.0)) throw std::invalid_argument("bisect_theta_star: tol must be positive");
    double lo = bracket.theta_min;
    double hi = bracket.theta_max;
    const double m_lo = m_function(spec, lo);
    const double m_hi = m_function(spec, hi);
    if (!(m_lo >= 0.0) || !(m_hi <= 0.0))
        throw std::domain_error("bisect_theta_star: bracket does not straddle the root");
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (m_function(spec, mid) >= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return {0.5 * (lo + hi), std::nullopt, std::nullopt, SolveMethod::Bisection, tol, 0.0};
}

// Bisection on the Monte-Carlo estimate of M with common random numbers.
// Stops once the bracket is narrower than max(tol, 4 * residual sigma), where
// the residual sigma converts the estimator's standard error to the theta
// scale through the secant slope of the current bracket.
inline OracleResult bisect_theta_star_mc(const EnvSpec& spec, const ThetaBracket& bracket,
                                         std::size_t n_samples, std::uint64_t seed,
                                         double tol = 1e-9) {
    if (!(tol > 0.0))
        throw std::invalid_argument("bisect_theta_star_mc: tol must be positive");
    double lo = bracket.theta_min;
    double hi = bracket.theta_max;
    McEstimate at_lo = m_function_mc(spec, lo, n_samples, seed);
    McEstimate at_hi = m_function_mc(spec, hi, n_samples, seed);
    if (!(at_lo.estimate >= -4.0 * at_lo.std_error) ||
        !(at_hi.estimate <= 4.0 * at_hi.std_error))
        throw std::domain_error("bisect_theta_star_mc: bracket does not straddle the root");

    double sigma_theta = hi - lo;
    for (int it = 0; it < 200; ++it) {
        const double slope = (at_lo.estimate - at_hi.estimate) / (hi - lo);
        const double mid = 0.5 * (lo + hi);
        const McEstimate at_mid = m_function_mc(spec, mid, n_samples, seed);
        sigma_theta = slope > 0.0 ? at_mid.std_error / slope : hi - lo;
        if (at_mid.estimate >= 0.0) {
            lo = mid;
            at_lo = at_mid;
        } else {
            hi = mid;
            at_hi = at_mid;
        }
        if (hi - lo < std::max(tol, 4.0 * sigma_theta)) break;
    }
    return {0.5 * (lo + hi), std::nullopt, std::nullopt, SolveMethod::MonteCarloBisection,
            tol,            sigma_theta};
}

namespace detail {

inline OracleResult solve_system_a(double p, double tol) {
    // The two stationary extremes: always take the short option (ratio
    // 3 - 2p) or always take the long one (ratio 3 / (1 + p)). The optimum is
    // whichever is larger; the switch happens at p = 1/2.
    const double ratio_short = 3.0 - 2.0 * p;
    const double ratio_long = 3.0 / (1.0 + p);
    OracleResult res;
    res.method = SolveMethod::ClosedForm;
    res.tolerance = tol;
    if (ratio_long >= ratio_short) {
        res.theta_star = ratio_long;
        res.t_star = 1.0 + p;
        res.r_star = 3.0;
    } else {
        res.theta_star = ratio_short;
        res.t_star = 1.0;
        res.r_star = 3.0 - 2.0 * p;
    }
    return res;
}

inline OracleResult solve_system_b(double q, double tol) {
    if (!(q >= 0.25 && q <= 0.75))
        throw std::domain_error(
            "solve_theta_star: curve-system closed form requires q in [1/4, 3/4]");
    const double root = std::sqrt(1.0 + q);
    OracleResult res;
    res.method = SolveMethod::ClosedForm;
    res.tolerance = tol;
    res.theta_star = 2.0 - (2.0 / q) * (root - 1.0);
    res.t_star = root;
    res.r_star = 2.0 * (q + 1.0) * (root - 1.0) / q;
    return res;
}

}  // namespace detail

// Independent computation of the optimal ratio. The closed-form systems also
// run a bisection cross-check on the supplied bracket (default: the moment
// bracket) and refuse to return silently disagreeing answers. The project
// system falls back to Monte-Carlo bisection with the given per-evaluation
// sample budget.
inline OracleResult solve_theta_star(const EnvSpec& spec, double tol = 1e-9,
                                     std::optional<ThetaBracket> bracket = std::nullopt,
                                     std::size_t mc_samples = 200000) {
    validate(spec);
    if (!(tol > 0.0)) throw std::invalid_argument("solve_theta_star: tol must be positive");
    const MomentConstants m = moments(spec);
    const ThetaBracket b =
        bracket ? *bracket : default_bracket(m.t_min, m.t_max, m.r_min, m.r_max);

    if (spec.kind == SystemKind::SystemC)
        return bisect_theta_star_mc(spec, b, mc_samples, spec.seed, tol);

    const OracleResult res = spec.kind == SystemKind::SystemA
                                 ? detail::solve_system_a(spec.param, tol)
                                 : detail::solve_system_b(spec.param, tol);
    const OracleResult cross = bisect_theta_star(spec, b, tol);
    if (std::abs(cross.theta_star - res.theta_star) > tol)
        throw std::logic_error("solve_theta_star: closed form and bisection disagree");
    return res;
}

}  // namespace renewopt
