#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "renewopt/decision.hpp"

namespace renewopt {

// Closed interval the auxiliary variable is projected onto.
struct ThetaBracket {
    double theta_min = 0.0;
    double theta_max = 0.0;

    static ThetaBracket make(double lo, double hi) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo <= hi))
            throw std::invalid_argument("ThetaBracket: need finite theta_min <= theta_max");
        return {lo, hi};
    }
};

inline double clamp_theta(double x, const ThetaBracket& b) {
    if (x < b.theta_min) return b.theta_min;
    if (x > b.theta_max) return b.theta_max;
    return x;
}

// Safe interval when only the moment envelope of the environment is known:
//   theta_min = min{r_min/t_min, r_min/t_max}
//   theta_max = max{r_max/t_min, r_max/t_max}
// Tighter brackets may be supplied when system structure allows.
inline ThetaBracket default_bracket(double t_min, double t_max, double r_min, double r_max) {
    if (!(t_min > 0.0) || !(t_min <= t_max))
        throw std::domain_error("default_bracket: need 0 < t_min <= t_max");
    if (!(r_min <= r_max))
        throw std::domain_error("default_bracket: need r_min <= r_max");
    const double lo = std::min(r_min / t_min, r_min / t_max);
    const double hi = std::max(r_max / t_min, r_max / t_max);
    return ThetaBracket::make(lo, hi);
}

// Decreasing schedule eta[k] = 1 / ((k + 2) * t_min). The minimum frame
// duration, not any curvature constant, sizes the steps; this is what makes
// the controller usable without structural knowledge of the reward geometry.
inline double stepsize(std::uint64_t k, double t_min) {
    if (!(t_min > 0.0))
        throw std::domain_error("stepsize: t_min must be positive");
    return 1.0 / (static_cast<double>(k + 2) * t_min);
}

// Auxiliary-variable state. theta always lies inside the bracket; the frame
// index drives the stepsize schedule.
struct ControllerState {
    double theta = 0.0;
    std::uint64_t frame = 0;
    ThetaBracket bracket;
    double t_min = 1.0;

    // theta0 defaults to the bracket's lower end.
    static ControllerState initial(const ThetaBracket& bracket, double t_min) {
        return initial(bracket, t_min, bracket.theta_min);
    }

    static ControllerState initial(const ThetaBracket& bracket, double t_min, double theta0) {
        if (!(t_min > 0.0))
            throw std::invalid_argument("ControllerState: t_min must be positive");
        if (!std::isfinite(theta0) || theta0 < bracket.theta_min || theta0 > bracket.theta_max)
            throw std::invalid_argument("ControllerState: theta0 must lie in the bracket");
        return {theta0, 0, bracket, t_min};
    }
};

struct StepOutcome {
    Decision decision;
    ControllerState next;
};

// One frame: best response at the current theta, then the projected update
//   theta' = clamp(theta + eta[k] * (r - theta * t)).
inline StepOutcome step(const ControllerState& state, const DecisionSet& set) {
    const BestResponse br = best_response(set, state.theta);
    const double eta = stepsize(state.frame, state.t_min);
    ControllerState next = state;
    next.theta = clamp_theta(state.theta + eta * br.value, state.bracket);
    next.frame = state.frame + 1;
    return {br.decision, next};
}

// theta is the value used for the decision at this frame (pre-update);
// cum_ratio is the running sum ratio over frames 0..frame.
struct FrameRecord {
    std::uint64_t frame = 0;
    double theta = 0.0;
    double t = 0.0;
    double r = 0.0;
    double cum_ratio = 0.0;
};

using RunRecord = std::vector<FrameRecord>;

// Drives the controller for `frames` frames against a stream of decision
// sets. The source is invoked exactly once per frame, in frame order.
template <class SetSource>
RunRecord run(ControllerState state, SetSource&& source, std::uint64_t frames) {
    if (frames < 1)
        throw std::invalid_argument("run: need at least one frame");
    RunRecord record;
    record.reserve(frames);
    double sum_t = 0.0;
    double sum_r = 0.0;
    for (std::uint64_t k = 0; k < frames; ++k) {
        const DecisionSet& set = source();
        const double theta_used = state.theta;
        StepOutcome out = step(state, set);
        sum_t += out.decision.t;
        sum_r += out.decision.r;
        record.push_back({k, theta_used, out.decision.t, out.decision.r, sum_r / sum_t});
        state = out.next;
    }
    return record;
}

inline RunRecord run(ControllerState state, std::span<const DecisionSet> sets) {
    std::size_t i = 0;
    return run(std::move(state), [&]() -> const DecisionSet& { return sets[i++]; },
               sets.size());
}

}  // namespace renewopt
