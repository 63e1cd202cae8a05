#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace renewopt {

// One (duration, reward) option. Durations are strictly positive so running
// time averages are always well defined.
struct Decision {
    double t = 1.0;
    double r = 0.0;

    friend bool operator==(const Decision& a, const Decision& b) {
        return a.t == b.t && a.r == b.r;
    }
};

// Named curve families. Carrying a name instead of an arbitrary callable keeps
// best responses closed-form and reproducible across runs and platforms.
//
// ConcaveQuadratic: t(x) = x, r(x) = 2 - (2-x)^2 on a sub-interval of (0, 2].
enum class CurveKind {
    ConcaveQuadratic,
};

struct Curve {
    CurveKind kind = CurveKind::ConcaveQuadratic;
    double x_lo = 1.0;
    double x_hi = 2.0;

    Decision at(double x) const {
        switch (kind) {
            case CurveKind::ConcaveQuadratic:
                return {x, 2.0 - (2.0 - x) * (2.0 - x)};
        }
        throw std::logic_error("Curve::at: unknown curve kind");
    }
};

// The per-frame option set: either an explicit nonempty list of decisions or a
// parametric curve. Invariants (t > 0 everywhere, nonempty, x_lo <= x_hi) are
// enforced on every construction/assignment path.
class DecisionSet {
  public:
    // Placeholder singleton {(1, 0)}; valid, so default-constructed frames can
    // be reused as write targets.
    DecisionSet() : impl_(std::vector<Decision>{{1.0, 0.0}}) {}

    static DecisionSet finite(std::vector<Decision> options) {
        validate_finite(options);
        DecisionSet s;
        s.impl_ = std::move(options);
        return s;
    }

    static DecisionSet curve(const Curve& c) {
        validate_curve(c);
        DecisionSet s;
        s.impl_ = c;
        return s;
    }

    // Overwrites in place, reusing any existing vector capacity.
    void assign_finite(std::span<const Decision> options) {
        if (options.empty())
            throw std::invalid_argument("DecisionSet: finite variant must be nonempty");
        for (const auto& d : options)
            if (!(d.t > 0.0))
                throw std::invalid_argument("DecisionSet: durations must be strictly positive");
        if (auto* v = std::get_if<std::vector<Decision>>(&impl_)) {
            v->assign(options.begin(), options.end());
        } else {
            impl_ = std::vector<Decision>(options.begin(), options.end());
        }
    }

    void assign_curve(const Curve& c) {
        validate_curve(c);
        impl_ = c;
    }

    bool is_finite() const { return std::holds_alternative<std::vector<Decision>>(impl_); }
    bool is_curve() const { return !is_finite(); }

    const std::vector<Decision>& options() const {
        if (!is_finite())
            throw std::logic_error("DecisionSet::options: not a finite set");
        return std::get<std::vector<Decision>>(impl_);
    }

    const Curve& curve() const {
        if (!is_curve())
            throw std::logic_error("DecisionSet::curve: not a curve set");
        return std::get<Curve>(impl_);
    }

  private:
    static void validate_finite(const std::vector<Decision>& options) {
        if (options.empty())
            throw std::invalid_argument("DecisionSet: finite variant must be nonempty");
        for (const auto& d : options)
            if (!(d.t > 0.0))
                throw std::invalid_argument("DecisionSet: durations must be strictly positive");
    }

    static void validate_curve(const Curve& c) {
        if (!(c.x_lo <= c.x_hi))
            throw std::invalid_argument("DecisionSet: curve needs x_lo <= x_hi");
        switch (c.kind) {
            case CurveKind::ConcaveQuadratic:
                if (!(c.x_lo > 0.0) || !(c.x_hi <= 2.0))
                    throw std::invalid_argument(
                        "DecisionSet: ConcaveQuadratic domain must lie in (0, 2]");
                return;
        }
        throw std::invalid_argument("DecisionSet: unknown curve kind");
    }

    std::variant<std::vector<Decision>, Curve> impl_;
};

struct BestResponse {
    Decision decision;
    double value = 0.0;  // attained maximum of r - theta * t
};

// Exact-comparison tie tolerance for finite sets. The tie rule is stated for
// exact ties; near-ties in the shipped systems occur only at measure-zero
// theta values, so no epsilon is applied.
inline constexpr double kFiniteTieEps = 0.0;

// Maximizes r - theta * t over the set. Among maximizers (values equal within
// kFiniteTieEps) the decision with the smallest duration wins. Curve sets use
// the registered closed form; for ConcaveQuadratic the interior stationary
// point is x = 2 - theta/2, clamped to the domain.
inline BestResponse best_response(const DecisionSet& set, double theta) {
    if (!std::isfinite(theta))
        throw std::invalid_argument("best_response: theta must be finite");

    if (set.is_finite()) {
        const auto& opts = set.options();
        BestResponse best{opts.front(), opts.front().r - theta * opts.front().t};
        for (std::size_t i = 1; i < opts.size(); ++i) {
            const double v = opts[i].r - theta * opts[i].t;
            if (v - best.value > kFiniteTieEps ||
                (std::abs(v - best.value) <= kFiniteTieEps && opts[i].t < best.decision.t)) {
                best = {opts[i], v};
            }
        }
        return best;
    }

    const Curve& c = set.curve();
    switch (c.kind) {
        case CurveKind::ConcaveQuadratic: {
            const double x = std::clamp(2.0 - theta / 2.0, c.x_lo, c.x_hi);
            const Decision d = c.at(x);
            return {d, d.r - theta * d.t};
        }
    }
    throw std::invalid_argument("best_response: no closed form registered for this curve");
}

// Test oracle for curve best responses: n samples at evenly spaced curve
// coordinates, both endpoints included so boundary maximizers are never
// missed. Finite sets pass through unchanged.
inline std::vector<Decision> enumerate_grid(const DecisionSet& set, std::size_t n) {
    if (set.is_finite()) return set.options();
    if (n < 2)
        throw std::invalid_argument("enumerate_grid: curve sets need n >= 2");
    const Curve& c = set.curve();
    std::vector<Decision> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = (i + 1 == n)
                             ? c.x_hi
                             : c.x_lo + (c.x_hi - c.x_lo) * static_cast<double>(i) /
                                            static_cast<double>(n - 1);
        out.push_back(c.at(x));
    }
    return out;
}

}  // namespace renewopt
