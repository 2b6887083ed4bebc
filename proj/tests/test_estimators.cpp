#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "svf/estimators.hpp"
#include "svf/theory.hpp"

using namespace svf;

namespace {

ReplicationPlan ma_plan(std::int64_t reps, double c, std::int64_t t, std::uint64_t seed,
                        const KernelPsi& kernel, double alpha = 2.0, double p_xi = 1.0) {
    ReplicationPlan plan(reps, TailModel(alpha, p_xi),
                         IndexSetGeometry(ShapeC::unit_box(1), {c}, {t}), seed);
    plan.kernel = kernel;
    return plan;
}

}  // namespace

TEST_CASE("plan validation demands exactly one volatility model") {
    IndexSetGeometry geom(ShapeC::unit_box(1), {100.0}, {10});
    ReplicationPlan none(10, TailModel(2.0, 1.0), geom, 1);
    CHECK_THROWS(none.validate());

    ReplicationPlan both = none;
    both.kernel = KernelPsi::delta(1);
    both.garch = GarchParams(0.1, 0.1, 0.85);
    both.garch_norming = GarchNorming{8.8, 1.0};
    CHECK_THROWS(both.validate());

    ReplicationPlan bad_thresholds = none;
    bad_thresholds.kernel = KernelPsi::delta(1);
    bad_thresholds.thresholds = {2.0, 1.0};
    CHECK_THROWS(bad_thresholds.validate());

    ReplicationPlan garch_no_norming = none;
    garch_no_norming.garch = GarchParams(0.1, 0.1, 0.85);
    CHECK_THROWS(garch_no_norming.validate());
}

TEST_CASE("norming level uses the kernel tail constant") {
    ReplicationPlan plan = ma_plan(10, 10000.0, 100, 1, KernelPsi::line({1.0, 0.5}));
    CHECK(plan.rv_index() == 2.0);
    CHECK(plan.norming() == doctest::Approx(std::sqrt(12500.0)).epsilon(1e-12));

    ReplicationPlan garch(10, TailModel(2.0, 1.0),
                          IndexSetGeometry(ShapeC::unit_box(1), {10000.0}, {100}), 1);
    garch.garch = GarchParams(0.1, 0.1, 0.85);
    garch.garch_norming = GarchNorming{8.0, 2.0};
    CHECK(garch.rv_index() == 8.0);
    CHECK(garch.norming() == doctest::Approx(std::pow(20000.0, 1.0 / 8.0)).epsilon(1e-12));
}

TEST_CASE("plan fields multiply volatility by the multiplier sample") {
    ReplicationPlan plan = ma_plan(4, 100.0, 10, 3, KernelPsi::line({1.0, 0.5}));
    Box window = plan.geometry.bounding();
    FieldSample unit = simulate_plan_field(plan, window, 0);

    ReplicationPlan doubled = plan;
    doubled.y = VolModelY::constant(2.0);
    FieldSample twice = simulate_plan_field(doubled, window, 0);
    for (std::size_t i = 0; i < unit.values.size(); ++i) {
        CHECK(twice.values[i] == doctest::Approx(2.0 * unit.values[i]).epsilon(1e-14));
    }
}

TEST_CASE("max cdf estimate reaches one at huge thresholds") {
    ReplicationPlan plan = ma_plan(50, 500.0, 10, 5, KernelPsi::line({1.0, 0.5}));
    plan.thresholds = {1000.0};
    EstimateTable table = empirical_max_cdf(plan);
    CHECK(table.find("max_cdf", 1000.0).estimate == 1.0);
}

TEST_CASE("iid max cdf approaches its double-exponential limit") {
    ReplicationPlan plan = ma_plan(1000, 10000.0, 100, 7, KernelPsi::delta(1));
    EstimateTable table = empirical_max_cdf(plan);
    const EstimateRow& row = table.find("max_cdf", 1.0);
    double se = std::sqrt(std::exp(-1.0) * (1.0 - std::exp(-1.0)) /
                          static_cast<double>(row.reps));
    CHECK(row.reps == 1000);
    CHECK(row.n_sites == 10000);
    CHECK(std::fabs(row.estimate - std::exp(-1.0)) < 4.0 * se);
}

TEST_CASE("estimator rows share one sweep and se definitions") {
    ReplicationPlan plan = ma_plan(200, 1000.0, 20, 9, KernelPsi::line({1.0, 0.5}));
    plan.thresholds = {1.0, 2.0};
    EstimateTable table = run_plan(plan);
    for (const char* name : {"max_cdf", "blocks_inner", "blocks_outer", "runs"}) {
        for (double x : {1.0, 2.0}) {
            const EstimateRow& row = table.find(name, x);
            CHECK(row.reps == 200);
            CHECK(row.se >= 0.0);
        }
    }
    // Higher thresholds keep fewer exceedances but more non-exceeding maxima.
    CHECK(table.find("runs", 2.0).estimate <= table.find("runs", 1.0).estimate);
    CHECK(table.find("max_cdf", 2.0).estimate >= table.find("max_cdf", 1.0).estimate);
    CHECK(table.find("blocks_outer", 1.0).estimate >=
          table.find("blocks_inner", 1.0).estimate);
    CHECK_THROWS(table.find("max_cdf", 3.0));
}

TEST_CASE("outer and inner blocks sums straddle the tiling remainder") {
    // c/t leaves a remainder so P_n is a strict subset of Q_n.
    ReplicationPlan plan = ma_plan(400, 1000.0, 30, 11, KernelPsi::line({1.0, 0.5}));
    EstimateTable table = run_plan(plan);
    double inner = table.find("blocks_inner", 1.0).estimate;
    double outer = table.find("blocks_outer", 1.0).estimate;
    double se = table.find("blocks_inner", 1.0).se + table.find("blocks_outer", 1.0).se;
    double ratio = approximation_ratio(plan.geometry);
    CHECK(outer >= inner);
    CHECK((outer - inner) / inner <= 2.0 * ratio + 3.0 * se);
}

TEST_CASE("stratified rows mix back into the unconditional row exactly") {
    ReplicationPlan plan = ma_plan(400, 2000.0, 40, 13, KernelPsi::line({1.0, 0.5}));
    plan.y = VolModelY::regime({1.0, 2.0}, {0.5, 0.5}, VolModelY::constant(1.0));
    EstimateTable table = run_plan(plan);
    const EstimateRow& all = table.find("max_cdf", 1.0);
    const EstimateRow& s0 = table.find("max_cdf", 1.0, 0);
    const EstimateRow& s1 = table.find("max_cdf", 1.0, 1);
    CHECK(s0.reps + s1.reps == all.reps);
    // Sample-count identity: the unconditional success count splits by stratum.
    double all_hits = all.estimate * static_cast<double>(all.reps);
    double strat_hits = s0.estimate * static_cast<double>(s0.reps) +
                        s1.estimate * static_cast<double>(s1.reps);
    CHECK(std::llround(all_hits) == std::llround(strat_hits));
}

TEST_CASE("csv table lists every row with its regime tag") {
    ReplicationPlan plan = ma_plan(20, 100.0, 10, 15, KernelPsi::delta(1));
    plan.y = VolModelY::regime({1.0, 2.0}, {0.5, 0.5}, VolModelY::constant(1.0));
    EstimateTable table = run_plan(plan);
    std::string csv = table.to_csv();
    CHECK(csv.find("estimator,x,estimate,se,reps,n_sites,regime") == 0);
    CHECK(csv.find("max_cdf") != std::string::npos);
    CHECK(csv.find(",all") != std::string::npos);
    CHECK(csv.find(",0\n") != std::string::npos);
}

TEST_CASE("ergodic average reproduces the lognormal mean") {
    VolModelY y = VolModelY::iid_lognormal(0.0, 0.5);
    IndexSetGeometry geom(ShapeC::unit_box(1), {100000.0}, {100});
    FieldSample f = y.sample_field(geom.bounding(), 17);
    ErgodicAverage avg =
        ergodic_average(WindowFunctional::value_at_origin(1), f, geom);
    CHECK(avg.count == 100000);
    CHECK(std::fabs(avg.value - std::exp(0.125)) < 3.0 * avg.se);
}

TEST_CASE("ergodic average of a regime field is its realized scale") {
    VolModelY y = VolModelY::regime({1.0, 2.0}, {0.5, 0.5}, VolModelY::constant(1.0));
    IndexSetGeometry geom(ShapeC::unit_box(1), {1000.0}, {10});
    FieldSample f = y.sample_field(geom.bounding(), 19, 4);
    ErgodicAverage avg = ergodic_average(WindowFunctional::value_at_origin(1), f, geom);
    REQUIRE(f.regime.has_value());
    CHECK(avg.value == f.regime->scale);
    CHECK(avg.se == 0.0);
}

TEST_CASE("ergodic tail indicator matches the marginal tail probability") {
    VolModelY y = VolModelY::iid_lognormal(0.0, 1.0);
    IndexSetGeometry geom(ShapeC::unit_box(1), {200000.0}, {100});
    FieldSample f = y.sample_field(geom.bounding(), 21);
    WindowFunctional h;
    h.window = Box{1, Site{}, Site{}};
    h.h = [](const std::vector<double>& v) { return v[0] > 2.0 ? 1.0 : 0.0; };
    ErgodicAverage avg = ergodic_average(h, f, geom);
    // P(exp(N) > 2) = P(N > log 2).
    double target = 1.0 - 0.5 * std::erfc(-std::log(2.0) / std::sqrt(2.0));
    CHECK(std::fabs(avg.value - target) < 3.0 * avg.se);
}

TEST_CASE("ergodic window must stay inside the sampled field") {
    VolModelY y = VolModelY::constant(1.0);
    IndexSetGeometry geom(ShapeC::unit_box(1), {100.0}, {10});
    FieldSample f = y.sample_field(geom.bounding(), 23);
    WindowFunctional wide;
    wide.window = Box{1, make_site({-1}), make_site({1})};
    wide.h = [](const std::vector<double>& v) { return v[0]; };
    CHECK_THROWS(ergodic_average(wide, f, geom));
}

TEST_CASE("spectral histogram piles onto the single iid atom") {
    ReplicationPlan plan(200000, TailModel(2.0, 1.0),
                         IndexSetGeometry(ShapeC::unit_box(1), {100.0}, {10}), 25);
    plan.kernel = KernelPsi::delta(1);
    SpectralComparison cmp = empirical_spectral_measure(plan, 0, 0.99);
    CHECK(cmp.windows == 200000);
    CHECK(cmp.kept == 2000);
    REQUIRE(cmp.weights.size() == 2);
    CHECK(cmp.weights[0] == doctest::Approx(1.0));
    CHECK(cmp.other_weight == 0.0);
    CHECK(cmp.total_variation < 1e-12);
    double sum = cmp.other_weight;
    for (double w : cmp.weights) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("balanced noise splits the sign atoms evenly") {
    ReplicationPlan plan(200000, TailModel(2.0, 0.5),
                         IndexSetGeometry(ShapeC::unit_box(1), {100.0}, {10}), 27);
    plan.kernel = KernelPsi::delta(1);
    SpectralComparison cmp = empirical_spectral_measure(plan, 0, 0.99);
    REQUIRE(cmp.weights.size() == 2);
    double se = std::sqrt(0.25 / static_cast<double>(cmp.kept));
    CHECK(std::fabs(cmp.weights[0] - 0.5) < 3.0 * se);
    CHECK(std::fabs(cmp.weights[1] - 0.5) < 3.0 * se);
}

TEST_CASE("two-tap spectral histogram converges to the atom weights") {
    // u deep enough that O(radius^-1) contamination stays inside the atom
    // tolerance; alpha = 2 makes shallow cutoffs noisy.
    ReplicationPlan plan(1000000, TailModel(2.0, 1.0),
                         IndexSetGeometry(ShapeC::unit_box(1), {100.0}, {10}), 29);
    plan.kernel = KernelPsi::line({1.0, 0.5});
    SpectralComparison cmp = empirical_spectral_measure(plan, 1, 0.999);
    CHECK(cmp.total_variation < 0.1);
    CHECK(cmp.kept == 1000);
    CHECK_THROWS(empirical_spectral_measure(plan, -1, 0.99));
    CHECK_THROWS(empirical_spectral_measure(plan, 1, 0.5));
}

TEST_CASE("window tail check vanishes with a zero window") {
    ReplicationPlan plan = ma_plan(200, 1000.0, 10, 31, KernelPsi::line({1.0, 0.5}));
    auto rows = window_tail_check(*plan.kernel, {0.0, 0.0}, 1, plan);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].left == 0.0);
    CHECK(rows[0].right == 0.0);
    CHECK(rows[0].ratio == 1.0);
}

TEST_CASE("window tail check matches the iid enumeration") {
    ReplicationPlan plan = ma_plan(2000, 10000.0, 10, 33, KernelPsi::delta(1));
    auto rows = window_tail_check(*plan.kernel, {0.0, 1.0}, 1, plan);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].right == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(rows[0].left - rows[0].right) < 0.1);
    CHECK(rows[0].ratio > 0.9);
    CHECK(rows[0].ratio < 1.1);
}

TEST_CASE("window tail check validates the window length") {
    ReplicationPlan plan = ma_plan(10, 100.0, 5, 35, KernelPsi::delta(1));
    CHECK_THROWS(window_tail_check(*plan.kernel, {0.0, 1.0, 1.0}, 1, plan));
}
