#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string_view>
#include <variant>

#include "renewopt/controller.hpp"
#include "renewopt/decision.hpp"

namespace renewopt {

// Grid resolution for the greedy baseline on curve sets (documented
// approximation; only the shipped concave curve uses it).
inline constexpr std::size_t kGreedyCurveGrid = 10000;

// Uniform decision-making interface over the proposed controller and the
// baselines it is compared against:
//
//   proposed         best response at the controller's auxiliary variable,
//                    then the projected stochastic update.
//   greedy           picks the option with the largest reward rate r / t
//                    (ties -> smallest duration).
//   theta-empirical  best response at the running empirical ratio
//                    clamp(sum_r / sum_t); starts from the bracket's lower
//                    end until the first frame completes.
//   fixed-theta      best response at a pinned theta, no state. Used with the
//                    oracle's optimal ratio as a clairvoyant reference.
class Policy {
  public:
    static Policy proposed(ControllerState state) { return Policy(Proposed{state}); }
    static Policy greedy() { return Policy(Greedy{}); }
    static Policy theta_empirical(ThetaBracket bracket) {
        return Policy(ThetaEmpirical{0.0, 0.0, bracket});
    }
    static Policy fixed_theta(double theta) {
        if (!std::isfinite(theta))
            throw std::invalid_argument("Policy::fixed_theta: theta must be finite");
        return Policy(FixedTheta{theta});
    }

    // Picks a decision from the set and advances internal state.
    Decision act(const DecisionSet& set) {
        if (auto* p = std::get_if<Proposed>(&impl_)) {
            StepOutcome out = step(p->state, set);
            p->state = out.next;
            return out.decision;
        }
        if (std::holds_alternative<Greedy>(impl_)) return greedy_pick(set);
        if (auto* p = std::get_if<ThetaEmpirical>(&impl_)) {
            const Decision d = best_response(set, empirical_theta(*p)).decision;
            p->sum_r += d.r;
            p->sum_t += d.t;
            return d;
        }
        return best_response(set, std::get<FixedTheta>(impl_).theta).decision;
    }

    // Stable machine-readable name used in CSV headers and CLI flags.
    std::string_view describe() const {
        if (std::holds_alternative<Proposed>(impl_)) return "proposed";
        if (std::holds_alternative<Greedy>(impl_)) return "greedy";
        if (std::holds_alternative<ThetaEmpirical>(impl_)) return "theta-empirical";
        return "fixed-theta";
    }

    // Current auxiliary value the next decision would use; NaN for greedy,
    // which carries none.
    double working_theta() const {
        if (auto* p = std::get_if<Proposed>(&impl_)) return p->state.theta;
        if (std::holds_alternative<Greedy>(impl_))
            return std::numeric_limits<double>::quiet_NaN();
        if (auto* p = std::get_if<ThetaEmpirical>(&impl_)) return empirical_theta(*p);
        return std::get<FixedTheta>(impl_).theta;
    }

  private:
    struct Proposed {
        ControllerState state;
    };
    struct Greedy {};
    struct ThetaEmpirical {
        double sum_r = 0.0;
        double sum_t = 0.0;
        ThetaBracket bracket;
    };
    struct FixedTheta {
        double theta;
    };

    template <class T>
    explicit Policy(T impl) : impl_(std::move(impl)) {}

    static double empirical_theta(const ThetaEmpirical& p) {
        if (p.sum_t <= 0.0) return p.bracket.theta_min;
        return clamp_theta(p.sum_r / p.sum_t, p.bracket);
    }

    static Decision greedy_pick(const DecisionSet& set) {
        if (set.is_finite()) {
            const auto& opts = set.options();
            Decision best = opts.front();
            double best_ratio = best.r / best.t;
            for (std::size_t i = 1; i < opts.size(); ++i) {
                const double ratio = opts[i].r / opts[i].t;
                if (ratio > best_ratio || (ratio == best_ratio && opts[i].t < best.t)) {
                    best = opts[i];
                    best_ratio = ratio;
                }
            }
            return best;
        }
        // Curve sets: maximize the reward rate over a fixed grid. Scanning in
        // increasing x keeps the smallest duration among grid ties.
        const auto grid = enumerate_grid(set, kGreedyCurveGrid);
        Decision best = grid.front();
        double best_ratio = best.r / best.t;
        for (const Decision& d : grid) {
            const double ratio = d.r / d.t;
            if (ratio > best_ratio) {
                best = d;
                best_ratio = ratio;
            }
        }
        return best;
    }

    std::variant<Proposed, Greedy, ThetaEmpirical, FixedTheta> impl_;
};

}  // namespace renewopt
