#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "svf/rng.hpp"
#include "svf/stats.hpp"
#include "svf/tail_models.hpp"
#include "test_support.hpp"

using namespace svf;
using svf::test::test_u01;

TEST_CASE("counter rng is a pure function of its key") {
    CounterKey k{7, streams::kNoise, 3, 2, make_site({5, -1})};
    CHECK(u01(k) == u01(k));
    CounterKey k2 = k;
    k2.stream = streams::kVolY;
    CHECK(u01(k) != u01(k2));
    CounterKey k3 = k;
    k3.site = make_site({5, 0});
    CHECK(u01(k) != u01(k3));
}

TEST_CASE("u01 stays inside the open unit interval") {
    for (std::uint64_t i = 0; i < 20000; ++i) {
        double u = u01(1, streams::kScratch, 0, i);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("normal quantile matches tabulated points") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
    CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-9));
    CHECK(normal_quantile(0.8413447460685429) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("running stats agree with direct formulas") {
    RunningStats s;
    std::vector<double> x{1.0, 4.0, -2.0, 7.5, 0.25};
    for (double v : x) s.add(v);
    CHECK(s.count() == 5);
    CHECK(s.mean() == doctest::Approx(sample_mean(x)).epsilon(1e-14));
    CHECK(s.variance() == doctest::Approx(sample_variance(x)).epsilon(1e-14));
    CHECK(s.min() == -2.0);
    CHECK(s.max() == 7.5);
    CHECK(s.std_error() == doctest::Approx(s.stddev() / std::sqrt(5.0)).epsilon(1e-14));
}

TEST_CASE("empirical quantile returns the lower order statistic") {
    std::vector<double> x{5.0, 1.0, 3.0, 2.0, 4.0};
    CHECK(empirical_quantile(x, 0.5) == 3.0);
    CHECK(empirical_quantile(x, 0.2) == 1.0);
    CHECK(empirical_quantile(x, 1.0) == 5.0);
}

TEST_CASE("chi-square upper tail matches tabulated critical values") {
    CHECK(chisq_upper_tail(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-8));
    CHECK(chisq_upper_tail(5.991464547107979, 2) == doctest::Approx(0.05).epsilon(1e-8));
    CHECK(chisq_upper_tail(18.307038053275146, 10) == doctest::Approx(0.05).epsilon(1e-8));
    CHECK(chisq_upper_tail(0.0, 3) == doctest::Approx(1.0));
}

TEST_CASE("gauss-hermite rule integrates normal moments") {
    QuadratureRule rule = gauss_hermite(64);
    double mass = 0.0;
    for (double w : rule.weights) mass += w;
    CHECK(mass == doctest::Approx(std::sqrt(std::acos(-1.0))).epsilon(1e-12));
    CHECK(normal_expectation(rule, [](double z) { return z * z; }) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(normal_expectation(rule, [](double z) { return z * z * z * z; }) ==
          doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("bisection finds the square root of two") {
    double r = bisect_root([](double x) { return x * x - 2.0; }, 0.0, 2.0);
    CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("hill estimator recovers an exact pareto index") {
    TailModel model(2.0, 1.0);
    std::vector<double> values;
    for (std::int64_t i = 0; i < 200000; ++i) {
        values.push_back(std::fabs(model.quantile(test_u01(0, static_cast<std::uint64_t>(i)))));
    }
    double idx = hill_tail_index(values, 2000);
    CHECK(idx == doctest::Approx(2.0).epsilon(0.08));
}

TEST_CASE("poisson pmf sums to one") {
    double total = 0.0;
    for (std::int64_t k = 0; k <= 60; ++k) total += poisson_pmf(k, 7.5);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(poisson_pmf(0, 0.0) == 1.0);
}

TEST_CASE("tail model enforces parameter ranges") {
    CHECK_THROWS(TailModel(0.0, 1.0));
    CHECK_THROWS(TailModel(2.0, 0.0));
    CHECK_THROWS(TailModel(2.0, 1.5));
}

TEST_CASE("tail probabilities follow the exact power law") {
    TailModel m1(2.0, 1.0);
    auto [right, left] = m1.tail_prob(10.0);
    CHECK(right == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(left == 0.0);

    TailModel m2(2.0, 0.5);
    auto [r2, l2] = m2.tail_prob(1.0);
    CHECK(r2 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(l2 == doctest::Approx(0.5).epsilon(1e-14));
    auto [r3, l3] = m2.tail_prob(7.25);
    CHECK(l3 / r3 == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS(m1.tail_prob(0.5));
}

TEST_CASE("quantile inverts the cdf on the support") {
    TailModel model(2.0, 1.0);
    CHECK(model.quantile(0.99) == doctest::Approx(10.0).epsilon(1e-12));
    // The balanced cdf is flat on (-1, 1), so only strictly interior support
    // points invert cleanly.
    TailModel balanced(1.5, 0.4);
    for (double x : {-8.0, -1.5, 2.5, 40.0}) {
        CHECK(balanced.quantile(balanced.cdf(x)) == doctest::Approx(x).epsilon(1e-10));
    }
}

TEST_CASE("empirical tail matches p_xi x^-alpha") {
    TailModel model(2.0, 1.0);
    const std::int64_t n = 1000000;
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        if (model.quantile(test_u01(1, static_cast<std::uint64_t>(i))) > 2.0) ++hits;
    }
    double p = static_cast<double>(hits) / static_cast<double>(n);
    double se = std::sqrt(0.25 * 0.75 / static_cast<double>(n));
    CHECK(std::fabs(p - 0.25) < 3.0 * se);
}

TEST_CASE("balanced model splits signs evenly") {
    TailModel model(1.0, 0.5);
    const std::int64_t n = 1000000;
    std::int64_t negative = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        if (model.quantile(test_u01(2, static_cast<std::uint64_t>(i))) < 0.0) ++negative;
    }
    double p = static_cast<double>(negative) / static_cast<double>(n);
    double se = std::sqrt(0.25 / static_cast<double>(n));
    CHECK(std::fabs(p - 0.5) < 3.0 * se);
}

TEST_CASE("constant multiplier field is all ones without a regime") {
    VolModelY y = VolModelY::constant(1.0);
    Box window{1, make_site({0}), make_site({9})};
    FieldSample f = y.sample_field(window, 11);
    for (double v : f.values) CHECK(v == 1.0);
    CHECK_FALSE(f.regime.has_value());
    CHECK(y.deterministic());
}

TEST_CASE("regime of constants freezes one scale per realization") {
    VolModelY y = VolModelY::regime({1.0, 2.0}, {0.5, 0.5}, VolModelY::constant(1.0));
    CHECK(y.regime_of_constants());
    Box window{2, make_site({0, 0}), make_site({4, 4})};
    std::set<double> seen;
    for (std::uint64_t rep = 0; rep < 40; ++rep) {
        FieldSample f = y.sample_field(window, 5, rep);
        REQUIRE(f.regime.has_value());
        double s = f.regime->scale;
        CHECK((s == 1.0 || s == 2.0));
        for (double v : f.values) CHECK(v == s);
        seen.insert(s);
    }
    CHECK(seen.size() == 2);  // both regimes realized across 40 draws
}

TEST_CASE("lognormal multiplier second moment matches the closed form") {
    VolModelY y = VolModelY::iid_lognormal(0.0, 0.5);
    Box window{1, make_site({0}), make_site({999999})};
    FieldSample f = y.sample_field(window, 13);
    RunningStats sq;
    for (double v : f.values) sq.add(v * v);
    double target = std::exp(0.5);  // E Y^2 = exp(2 mu + 2 sigma^2)
    CHECK(std::fabs(sq.mean() - target) < 3.0 * sq.std_error());
    auto closed = y.abs_moment(2.0);
    REQUIRE(closed.has_value());
    CHECK(*closed == doctest::Approx(target).epsilon(1e-12));
}

TEST_CASE("moment diagnostic order defaults above the pairing index") {
    VolModelY y = VolModelY::iid_lognormal(0.0, 1.0);
    y.set_gamma_check(3.5);
    CHECK(y.gamma_check() == 3.5);
    auto m = y.abs_moment(3.5);
    REQUIRE(m.has_value());
    CHECK(*m == doctest::Approx(std::exp(3.5 * 3.5 / 2.0)).epsilon(1e-12));
}

TEST_CASE("support poisson sampler produces the right mean and variance") {
    RunningStats s;
    for (std::uint64_t i = 0; i < 100000; ++i) {
        s.add(static_cast<double>(test::poisson_draw(3.0, test_u01(3, i))));
    }
    CHECK(std::fabs(s.mean() - 3.0) < 3.0 * s.std_error());
    CHECK(s.variance() == doctest::Approx(3.0).epsilon(0.05));
}
