#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "renewopt/decision.hpp"
#include "renewopt/rng.hpp"

using namespace renewopt;

namespace {

DecisionSet system_b_curve() {
    return DecisionSet::curve({CurveKind::ConcaveQuadratic, 1.0, 2.0});
}

// Brute-force oracle for finite sets, including the smallest-duration tie
// rule, written independently of best_response.
BestResponse brute_force(const DecisionSet& set, double theta) {
    const auto& opts = set.options();
    BestResponse best{opts[0], opts[0].r - theta * opts[0].t};
    for (const Decision& d : opts) {
        const double v = d.r - theta * d.t;
        if (v > best.value || (v == best.value && d.t < best.decision.t)) best = {d, v};
    }
    return best;
}

}  // namespace

TEST_CASE("best response on finite sets") {
    const auto set = DecisionSet::finite({{2.0, 3.0}, {1.0, 1.0}});

    SECTION("picks the strict maximizer") {
        const auto br = best_response(set, 1.0);
        CHECK(br.decision == Decision{2.0, 3.0});
        CHECK(br.value == 1.0);
    }
    SECTION("ties break toward the smallest duration") {
        const auto br = best_response(set, 2.0);  // both options give -1
        CHECK(br.decision == Decision{1.0, 1.0});
        CHECK(br.value == -1.0);
    }
    SECTION("singleton sets are forced") {
        const auto single = DecisionSet::finite({{1.0, 3.0}});
        for (double theta : {-5.0, 0.0, 2.5, 100.0})
            CHECK(best_response(single, theta).decision == Decision{1.0, 3.0});
    }
}

TEST_CASE("best response on the concave curve") {
    const auto set = system_b_curve();

    SECTION("interior stationary point") {
        const auto br = best_response(set, 1.0);  // x* = 2 - 1/2 = 1.5
        CHECK(br.decision.t == Catch::Approx(1.5));
        CHECK(br.decision.r == Catch::Approx(1.75));
        CHECK(br.value == Catch::Approx(0.25));
    }
    SECTION("clamps to the domain ends") {
        CHECK(best_response(set, 0.0).decision.t == 2.0);   // x* = 2
        CHECK(best_response(set, 10.0).decision.t == 1.0);  // x* clamped to 1
    }
    SECTION("matches a dense grid within 1e-6") {
        const auto grid = enumerate_grid(set, 100000);
        SplitMix64 rng(7);
        for (int i = 0; i < 200; ++i) {
            const double theta = rng.uniform(0.0, 4.0);
            double grid_best = -std::numeric_limits<double>::infinity();
            for (const Decision& d : grid)
                grid_best = std::max(grid_best, d.r - theta * d.t);
            const double closed = best_response(set, theta).value;
            CHECK(std::abs(closed - grid_best) <= 1e-6);
            CHECK(closed >= grid_best - 1e-6);
        }
    }
}

TEST_CASE("best response equals brute force on random finite sets") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 1 + rng.next_u64() % 8;
        std::vector<Decision> opts;
        for (std::size_t i = 0; i < n; ++i)
            opts.push_back({rng.uniform(0.1, 10.0), rng.uniform(-5.0, 5.0)});
        const auto set = DecisionSet::finite(opts);
        const double theta = rng.uniform(-2.0, 4.0);
        const auto got = best_response(set, theta);
        const auto want = brute_force(set, theta);
        REQUIRE(got.value == want.value);
        REQUIRE(got.decision == want.decision);
    }
}

TEST_CASE("constructed exact ties return the smaller duration") {
    // Both options attain r - theta t = v at theta = 1.25.
    const double theta = 1.25, v = 0.5;
    const auto set = DecisionSet::finite({{4.0, v + theta * 4.0}, {2.0, v + theta * 2.0}});
    const auto br = best_response(set, theta);
    CHECK(br.decision.t == 2.0);
    CHECK(br.value == v);
}

TEST_CASE("best response value is nonincreasing in theta") {
    const auto finite = DecisionSet::finite({{1.0, 3.0}, {2.0, 3.0}, {0.5, -1.0}});
    const auto curve = system_b_curve();
    for (const auto* set : {&finite, &curve}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double theta = -1.0; theta <= 5.0; theta += 0.01) {
            const double v = best_response(*set, theta).value;
            CHECK(v <= prev);
            prev = v;
        }
    }
}

TEST_CASE("enumerate_grid") {
    const auto curve = system_b_curve();

    SECTION("samples both endpoints") {
        const auto pts = enumerate_grid(curve, 3);
        REQUIRE(pts.size() == 3);
        CHECK(pts[0] == Decision{1.0, 1.0});
        CHECK(pts[1].t == Catch::Approx(1.5));
        CHECK(pts[1].r == Catch::Approx(1.75));
        CHECK(pts[2] == Decision{2.0, 2.0});
    }
    SECTION("n=2 gives exactly the endpoints") {
        const auto pts = enumerate_grid(curve, 2);
        REQUIRE(pts.size() == 2);
        CHECK(pts[0] == Decision{1.0, 1.0});
        CHECK(pts[1] == Decision{2.0, 2.0});
    }
    SECTION("finite sets pass through unchanged") {
        const auto set = DecisionSet::finite({{1.0, 3.0}});
        CHECK(enumerate_grid(set, 10) == set.options());
    }
    SECTION("curve sets need n >= 2") {
        CHECK_THROWS_AS(enumerate_grid(curve, 1), std::invalid_argument);
    }
}

TEST_CASE("structural validation") {
    CHECK_THROWS_AS(DecisionSet::finite({}), std::invalid_argument);
    CHECK_THROWS_AS(DecisionSet::finite({{0.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(DecisionSet::finite({{-1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(DecisionSet::curve({CurveKind::ConcaveQuadratic, 2.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(DecisionSet::curve({CurveKind::ConcaveQuadratic, 0.0, 2.0}),
                    std::invalid_argument);
    const auto set = DecisionSet::finite({{1.0, 1.0}});
    CHECK_THROWS_AS(best_response(set, std::numeric_limits<double>::quiet_NaN()),
                    std::invalid_argument);
    CHECK_THROWS_AS(best_response(set, std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
}
