#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <utility>

#include "renewopt/controller.hpp"
#include "renewopt/decision.hpp"
#include "renewopt/rng.hpp"

namespace renewopt {

// The three shipped task generators.
//
// SystemA  two task types: an inflexible type with the single option (1, 3)
//          and a flexible type offering (2, 3) or (1, 1); param = probability
//          of the flexible type.
// SystemB  inflexible type (1, 1) plus a flexible type whose options form the
//          concave curve (x, 2 - (2-x)^2), x in [1, 2]; param = probability
//          of the flexible type.
// SystemC  project selection: a random batch of up to three projects with
//          uniform durations and rates, plus an always-available idle option
//          (1, 0); param controls the batch-size distribution.
enum class SystemKind { SystemA, SystemB, SystemC };

inline std::string_view system_name(SystemKind k) {
    switch (k) {
        case SystemKind::SystemA: return "systemA";
        case SystemKind::SystemB: return "systemB";
        case SystemKind::SystemC: return "systemC";
    }
    return "?";
}

struct EnvSpec {
    SystemKind kind = SystemKind::SystemA;
    double param = 0.5;
    std::uint64_t seed = 0;
};

inline void validate(const EnvSpec& spec) {
    switch (spec.kind) {
        case SystemKind::SystemA:
        case SystemKind::SystemB:
            if (!(spec.param >= 0.0 && spec.param <= 1.0))
                throw std::invalid_argument("EnvSpec: type probability must lie in [0, 1]");
            return;
        case SystemKind::SystemC:
            // Keeps every batch-size probability nonnegative.
            if (!(spec.param >= 0.0 && spec.param <= 0.9))
                throw std::invalid_argument("EnvSpec: project parameter must lie in [0, 0.9]");
            return;
    }
    throw std::invalid_argument("EnvSpec: unknown system kind");
}

// Declared moment envelope: bounds that hold under every admissible decision.
struct MomentConstants {
    double t_min, t_max;  // T_min <= E[T] <= T_max, with T_min > 0
    double r_min, r_max;  // R_min <= E[R] <= R_max
    double c1, c2;        // E[T^2] <= C1, E[R^2] <= C2
};

inline MomentConstants moments(const EnvSpec& spec) {
    switch (spec.kind) {
        case SystemKind::SystemA: return {1.0, 2.0, 1.0, 3.0, 4.0, 9.0};
        case SystemKind::SystemB: return {1.0, 2.0, 1.0, 2.0, 4.0, 4.0};
        case SystemKind::SystemC: return {1.0, 10.0, 0.0, 500.0, 100.0, 250000.0};
    }
    throw std::invalid_argument("moments: unknown system kind");
}

// task_type is a logging/statistics label only (the controller never reads
// it): the flexible-type indicator for SystemA/SystemB, the number of offered
// projects for SystemC.
struct Frame {
    int task_type = 0;
    DecisionSet set;
};

inline constexpr Decision kIdleOption{1.0, 0.0};  // SystemC "work on nothing"

// Seeded per-frame generator. One instance per sample path; instances are
// values and can be moved between workers. Path substreams are derived as
// SplitMix64::substream(spec.seed, path), so parallel paths reproduce
// independently of scheduling.
class Environment {
  public:
    explicit Environment(EnvSpec spec, std::uint64_t path = 0)
        : spec_(spec), rng_(SplitMix64::substream(spec.seed, path)) {
        validate(spec_);
    }

    const EnvSpec& spec() const { return spec_; }
    MomentConstants moments() const { return renewopt::moments(spec_); }

    ThetaBracket default_bracket() const {
        const MomentConstants m = moments();
        return renewopt::default_bracket(m.t_min, m.t_max, m.r_min, m.r_max);
    }

    Frame next_frame() {
        Frame f;
        next_frame(f);
        return f;
    }

    // In-place variant for hot loops; reuses the frame's option storage.
    void next_frame(Frame& out) {
        switch (spec_.kind) {
            case SystemKind::SystemA: {
                const bool flexible = rng_.bernoulli(spec_.param);
                out.task_type = flexible ? 1 : 0;
                if (flexible) {
                    const Decision opts[] = {{2.0, 3.0}, {1.0, 1.0}};
                    out.set.assign_finite(opts);
                } else {
                    const Decision opts[] = {{1.0, 3.0}};
                    out.set.assign_finite(opts);
                }
                return;
            }
            case SystemKind::SystemB: {
                const bool flexible = rng_.bernoulli(spec_.param);
                out.task_type = flexible ? 1 : 0;
                if (flexible) {
                    out.set.assign_curve({CurveKind::ConcaveQuadratic, 1.0, 2.0});
                } else {
                    const Decision opts[] = {{1.0, 1.0}};
                    out.set.assign_finite(opts);
                }
                return;
            }
            case SystemKind::SystemC: {
                // Draw order is part of the reproducibility contract: batch
                // size first, then duration and rate for each project in turn.
                const double p = spec_.param;
                const std::array<double, 4> weights{0.1, 0.9 - p, p / 2.0, p / 2.0};
                const std::size_t n = rng_.weighted_index(weights);
                out.task_type = static_cast<int>(n);
                std::array<Decision, 4> opts;
                opts[0] = kIdleOption;
                for (std::size_t j = 0; j < n; ++j) {
                    const double t = rng_.uniform(1.0, 10.0);
                    const double rate = rng_.uniform(0.0, 50.0);
                    opts[j + 1] = {t, rate * t};
                }
                out.set.assign_finite(std::span<const Decision>(opts.data(), n + 1));
                return;
            }
        }
        throw std::logic_error("Environment: unknown system kind");
    }

  private:
    EnvSpec spec_;
    SplitMix64 rng_;
};

// A per-type fixed rule for the closed-form systems: whether the flexible
// SystemA task takes its long high-reward option, or the fixed SystemB curve
// coordinate.
struct StationaryChoice {
    static StationaryChoice quality(bool take_long) { return {take_long, 0.0}; }
    static StationaryChoice curve_x(double x) { return {false, x}; }

    bool take_long = false;
    double x = 1.0;
};

// Exact one-shot expectation (E[T], E[R]) under a stationary per-type rule.
// SystemC has no closed form and is served by Monte-Carlo paths instead.
inline std::pair<double, double> stationary_expectation(const EnvSpec& spec,
                                                        const StationaryChoice& choice) {
    validate(spec);
    switch (spec.kind) {
        case SystemKind::SystemA: {
            const double p = spec.param;
            if (choice.take_long) return {1.0 + p, 3.0};
            return {1.0, 3.0 - 2.0 * p};
        }
        case SystemKind::SystemB: {
            const double q = spec.param;
            const double x = choice.x;
            if (!(x >= 1.0 && x <= 2.0))
                throw std::invalid_argument("stationary_expectation: curve x must lie in [1, 2]");
            return {1.0 - q + q * x, 1.0 + q - q * (2.0 - x) * (2.0 - x)};
        }
        case SystemKind::SystemC:
            throw std::invalid_argument(
                "stationary_expectation: no closed form for the project system");
    }
    throw std::invalid_argument("stationary_expectation: unknown system kind");
}

}  // namespace renewopt
