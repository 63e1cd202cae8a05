#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "renewopt/harness.hpp"

using namespace renewopt;

namespace {

ExperimentConfig small_config(SystemKind kind, double param, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.env = {kind, param, seed};
    cfg.frames = 1024;
    cfg.paths = 200;
    cfg.mc_samples = 20000;
    return cfg;
}

bool same_stats(const CheckpointStats& a, const CheckpointStats& b) {
    return a.k == b.k && a.mean_ratio == b.mean_ratio && a.stderr_ratio == b.stderr_ratio &&
           a.gap == b.gap && a.stderr_gap == b.stderr_gap &&
           ((a.mse == b.mse) || (std::isnan(a.mse) && std::isnan(b.mse))) &&
           a.exp_ratio == b.exp_ratio && a.exp_gap == b.exp_gap &&
           a.stderr_exp_gap == b.stderr_exp_gap;
}

}  // namespace

TEST_CASE("geometric checkpoint grid") {
    CHECK(geometric_checkpoints(1) == std::vector<std::uint64_t>{1});
    CHECK(geometric_checkpoints(8) == std::vector<std::uint64_t>{1, 2, 4, 8});
    CHECK(geometric_checkpoints(2000) ==
          std::vector<std::uint64_t>{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2000});
}

TEST_CASE("experiments are deterministic") {
    auto cfg = small_config(SystemKind::SystemA, 0.25, 1001);
    cfg.policies = {"proposed", "greedy"};
    cfg.bracket = ThetaBracket::make(1.0, 3.0);
    const RunSummary a = run_experiment(cfg);
    const RunSummary b = run_experiment(cfg);
    REQUIRE(a.policies.size() == b.policies.size());
    for (std::size_t p = 0; p < a.policies.size(); ++p) {
        REQUIRE(a.policies[p].final_ratios == b.policies[p].final_ratios);
        REQUIRE(a.policies[p].checkpoints.size() == b.policies[p].checkpoints.size());
        for (std::size_t c = 0; c < a.policies[p].checkpoints.size(); ++c)
            REQUIRE(same_stats(a.policies[p].checkpoints[c], b.policies[p].checkpoints[c]));
    }
}

TEST_CASE("worker count never changes results") {
    auto cfg = small_config(SystemKind::SystemC, 0.6, 1002);
    cfg.paths = 64;
    cfg.frames = 256;
    cfg.workers = 1;
    const RunSummary serial = run_experiment(cfg);
    cfg.workers = 4;
    const RunSummary pooled = run_experiment(cfg);
    REQUIRE(serial.policies[0].final_ratios == pooled.policies[0].final_ratios);
    for (std::size_t c = 0; c < serial.policies[0].checkpoints.size(); ++c)
        REQUIRE(same_stats(serial.policies[0].checkpoints[c],
                           pooled.policies[0].checkpoints[c]));
}

TEST_CASE("bound constants") {
    SECTION("two-choice system, simulation bracket") {
        const auto c = derive_constants({SystemKind::SystemA, 0.25, 0},
                                        ThetaBracket::make(1.0, 3.0));
        CHECK(c.b == 4.5);  // worst |r - theta t| is |3 - 3*2| = 3
        CHECK(c.c1 == 4.0);
    }
    SECTION("curve system, simulation bracket") {
        const auto c = derive_constants({SystemKind::SystemB, 0.7, 0},
                                        ThetaBracket::make(1.0, 2.0));
        CHECK(c.b == 2.0);  // worst is |2 - 2*2| = 2 at the curve's upper end
        CHECK(c.c1 == 4.0);
    }
    SECTION("project system, conservative envelope") {
        const auto c = derive_constants({SystemKind::SystemC, 0.6, 0},
                                        ThetaBracket::make(0.0, 50.0));
        CHECK(c.b == 0.5 * (500.0 + 50.0 * 10.0) * (500.0 + 50.0 * 10.0));
        CHECK(c.c1 == 100.0);
    }
    SECTION("numeric sweep never exceeds the certified constant") {
        const EnvSpec specs[] = {{SystemKind::SystemA, 0.25, 0},
                                 {SystemKind::SystemB, 0.7, 0}};
        const ThetaBracket brackets[] = {ThetaBracket::make(1.0, 3.0),
                                         ThetaBracket::make(1.0, 2.0)};
        for (int i = 0; i < 2; ++i) {
            const auto constants = derive_constants(specs[i], brackets[i]);
            double worst = 0.0;
            for (double theta = brackets[i].theta_min; theta <= brackets[i].theta_max;
                 theta += 0.001) {
                if (specs[i].kind == SystemKind::SystemA) {
                    for (const Decision& d :
                         {Decision{1.0, 3.0}, Decision{2.0, 3.0}, Decision{1.0, 1.0}})
                        worst = std::max(worst, std::abs(d.r - theta * d.t));
                } else {
                    const Curve c{CurveKind::ConcaveQuadratic, 1.0, 2.0};
                    worst = std::max(worst, std::abs(1.0 - theta));
                    for (double x = 1.0; x <= 2.0; x += 0.001) {
                        const Decision d = c.at(x);
                        worst = std::max(worst, std::abs(d.r - theta * d.t));
                    }
                }
            }
            CHECK(0.5 * worst * worst <= constants.b + 1e-9);
        }
    }
}

TEST_CASE("decay bounds hold on small runs") {
    SECTION("two-choice system") {
        auto cfg = small_config(SystemKind::SystemA, 0.25, 1003);
        cfg.bracket = ThetaBracket::make(1.0, 3.0);
        const RunSummary summary = run_experiment(cfg);
        const auto report = check_bounds(summary, derive_constants(cfg.env, *cfg.bracket));
        CHECK(report.rows.size() > 0);
        for (const BoundRow& row : report.rows) {
            INFO("k=" << row.k << " kind=" << static_cast<int>(row.kind) << " empirical="
                      << row.empirical << " bound=" << row.bound);
            CHECK(row.slack >= 0.0);
        }
        CHECK(report.all_hold());
        CHECK(std::isnan(report.curvature));  // strongly-concave bound not applicable
    }
    SECTION("curve system includes the strongly-concave bound") {
        auto cfg = small_config(SystemKind::SystemB, 0.7, 1004);
        cfg.bracket = ThetaBracket::make(1.0, 2.0);
        const RunSummary summary = run_experiment(cfg);
        const auto report = check_bounds(summary, derive_constants(cfg.env, *cfg.bracket));
        CHECK(report.curvature == 1.0 / 0.7);
        bool saw_log_bound = false;
        for (const BoundRow& row : report.rows) {
            saw_log_bound |= row.kind == BoundKind::GapLog;
            CHECK(row.slack >= 0.0);
        }
        CHECK(saw_log_bound);
    }
    SECTION("single-frame runs only check the mse bound at k=1") {
        auto cfg = small_config(SystemKind::SystemA, 0.25, 1005);
        cfg.frames = 1;
        cfg.paths = 50;
        cfg.bracket = ThetaBracket::make(1.0, 3.0);
        const RunSummary summary = run_experiment(cfg);
        const auto report = check_bounds(summary, derive_constants(cfg.env, *cfg.bracket));
        REQUIRE(report.rows.size() == 1);
        CHECK(report.rows[0].kind == BoundKind::ThetaMse);
        CHECK(report.rows[0].k == 1);
        CHECK(report.rows[0].slack >= 0.0);
    }
    SECTION("requires a proposed-policy outcome") {
        auto cfg = small_config(SystemKind::SystemA, 0.25, 1006);
        cfg.frames = 16;
        cfg.paths = 4;
        cfg.policies = {"greedy"};
        const RunSummary summary = run_experiment(cfg);
        CHECK_THROWS_AS(check_bounds(summary, derive_constants(cfg.env, summary.bracket)),
                        std::invalid_argument);
    }
}

TEST_CASE("mean ratio never exceeds the optimal ratio") {
    const EnvSpec specs[] = {{SystemKind::SystemA, 0.25, 1007},
                             {SystemKind::SystemB, 0.7, 1008},
                             {SystemKind::SystemC, 0.6, 1009}};
    for (const EnvSpec& spec : specs) {
        auto cfg = small_config(spec.kind, spec.param, spec.seed);
        const RunSummary summary = run_experiment(cfg);
        const double allowance = 4.0 * summary.oracle.std_error;  // MC oracle uncertainty
        for (const CheckpointStats& s : summary.policies[0].checkpoints) {
            INFO("param " << spec.param << " k=" << s.k);
            CHECK(s.mean_ratio <= summary.oracle.theta_star + 4.0 * s.stderr_ratio +
                                      allowance);
        }
    }
}

TEST_CASE("golden optimal ratios for the project system") {
    SECTION("known parameters resolve from the table") {
        const auto g = golden_theta({SystemKind::SystemC, 0.6, 12345});
        REQUIRE(g.has_value());
        CHECK(g->theta_star == 36.0168457);
        CHECK(g->method == SolveMethod::MonteCarloBisection);
        CHECK(g->std_error > 0.0);
    }
    SECTION("other parameters and systems miss") {
        CHECK_FALSE(golden_theta({SystemKind::SystemC, 0.45, 0}).has_value());
        CHECK_FALSE(golden_theta({SystemKind::SystemA, 0.6, 0}).has_value());
    }
    SECTION("experiments consult the table") {
        ExperimentConfig cfg;
        cfg.env = {SystemKind::SystemC, 0.6, 77};
        cfg.frames = 16;
        cfg.paths = 2;
        cfg.bracket = ThetaBracket::make(0.0, 50.0);
        const RunSummary summary = run_experiment(cfg);
        CHECK(summary.oracle.theta_star == 36.0168457);
    }
}

TEST_CASE("a single curve-system path lands near the optimal ratio") {
    ExperimentConfig cfg;
    cfg.env = {SystemKind::SystemB, 0.7, 1014};
    cfg.frames = 1000;
    cfg.paths = 1;
    cfg.bracket = ThetaBracket::make(1.0, 2.0);
    const RunSummary summary = run_experiment(cfg);
    const CheckpointStats& last = summary.policies[0].checkpoints.back();
    CHECK(std::abs(last.mean_ratio - summary.oracle.theta_star) <= 0.05);
    CHECK(last.stderr_ratio == 0.0);  // one path: no spread to estimate
}

TEST_CASE("rate fitting") {
    PolicyOutcome outcome;
    for (std::uint64_t k : geometric_checkpoints(100000)) {
        CheckpointStats s;
        s.k = k;
        s.gap = 3.0 / std::sqrt(static_cast<double>(k));
        s.mse = 0.5 / static_cast<double>(k);
        outcome.checkpoints.push_back(s);
    }
    SECTION("recovers exact power laws") {
        const RateFit gap = fit_rate(outcome, RateMetric::Gap, 1, 100000);
        CHECK(gap.slope == Catch::Approx(-0.5).margin(1e-6));
        CHECK(gap.r_squared == Catch::Approx(1.0).margin(1e-9));
        const RateFit mse = fit_rate(outcome, RateMetric::Mse, 1, 100000);
        CHECK(mse.slope == Catch::Approx(-1.0).margin(1e-6));
        CHECK(mse.intercept == Catch::Approx(std::log(0.5)).margin(1e-6));
    }
    SECTION("zero values are dropped; too few points is an error") {
        PolicyOutcome sparse = outcome;
        for (auto& s : sparse.checkpoints) s.gap = 0.0;
        CHECK_THROWS_AS(fit_rate(sparse, RateMetric::Gap, 1, 100000), std::runtime_error);
        CHECK_THROWS_AS(fit_rate(outcome, RateMetric::Mse, 1, 8), std::runtime_error);
    }
}

TEST_CASE("near-threshold probe") {
    SECTION("empty delta list gives an empty table") {
        CHECK(near_threshold_probe({}, 10, 5, 1).empty());
    }
    SECTION("degenerate type streams are learned immediately") {
        const double deltas[] = {0.5};  // p in {0, 1}
        const auto table = near_threshold_probe(deltas, 10, 20, 1010,
                                                ThetaBracket::make(1.0, 3.0));
        REQUIRE_FALSE(table.empty());
        std::map<double, double> final_gap;
        for (const ProbeRow& r : table)
            if (r.k == 10) final_gap[r.p] = r.mean_gap;
        REQUIRE(final_gap.size() == 2);
        CHECK(final_gap[0.0] <= 1e-12);
        CHECK(final_gap[1.0] <= 1e-12);
    }
    SECTION("rejects deltas outside [0, 1/2]") {
        const double bad[] = {0.6};
        CHECK_THROWS_AS(near_threshold_probe(bad, 10, 5, 1), std::invalid_argument);
    }
}

TEST_CASE("project-system rejection statistics") {
    auto cfg = small_config(SystemKind::SystemC, 0.0, 1011);
    cfg.frames = 500;
    cfg.paths = 100;
    cfg.bracket = ThetaBracket::make(0.0, 50.0);
    const RunSummary summary = run_experiment(cfg);
    const RejectionStats& rej = summary.policies[0].rejection;
    // With p = 0 a batch arrives with probability 0.9.
    const double total = static_cast<double>(cfg.frames * cfg.paths);
    const double se = std::sqrt(0.9 * 0.1 / total);
    CHECK(std::abs(static_cast<double>(rej.offered) / total - 0.9) <= 4.0 * se);
    CHECK(rej.rejected <= rej.offered);
    CHECK(rej.rate >= 0.0);
    CHECK(rej.rate <= 1.0);
    CHECK(rej.std_error > 0.0);
}

TEST_CASE("the closed-form systems report no rejection statistics") {
    auto cfg = small_config(SystemKind::SystemA, 0.25, 1012);
    cfg.frames = 32;
    cfg.paths = 8;
    const RunSummary summary = run_experiment(cfg);
    CHECK(summary.policies[0].rejection.offered == 0);
    CHECK(std::isnan(summary.policies[0].rejection.rate));
}

TEST_CASE("config validation") {
    auto cfg = small_config(SystemKind::SystemA, 0.25, 1);
    cfg.policies = {"nonsense"};
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

    cfg = small_config(SystemKind::SystemA, 0.25, 1);
    cfg.checkpoints = {0};
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

    cfg = small_config(SystemKind::SystemA, 0.25, 1);
    cfg.checkpoints = {cfg.frames + 1};
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

    cfg = small_config(SystemKind::SystemA, 0.25, 1);
    cfg.paths = 0;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

    cfg = small_config(SystemKind::SystemA, 0.25, 1);
    cfg.theta0 = 99.0;  // outside every bracket in use
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("trajectory sink sees strided rows plus the final frame") {
    auto cfg = small_config(SystemKind::SystemA, 0.25, 1013);
    cfg.frames = 10;
    cfg.paths = 2;
    cfg.record_stride = 4;
    std::map<std::uint64_t, RunRecord> records;
    cfg.trajectory_sink = [&](std::string_view, std::uint64_t path, const RunRecord& rec) {
        records[path] = rec;
    };
    cfg.workers = 1;
    run_experiment(cfg);
    REQUIRE(records.size() == 2);
    for (const auto& [path, rec] : records) {
        REQUIRE(rec.size() == 4);  // frames 0, 4, 8 and the final frame 9
        CHECK(rec[0].frame == 0);
        CHECK(rec[1].frame == 4);
        CHECK(rec[2].frame == 8);
        CHECK(rec[3].frame == 9);
    }
}
