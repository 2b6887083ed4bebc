#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <set>

#include "svf/geometry.hpp"
#include "svf/simulate.hpp"
#include "svf/stats.hpp"
#include "svf/tail_models.hpp"
#include "test_support.hpp"

using namespace svf;
using svf::test::test_u01;

TEST_CASE("box indexing round-trips in lexicographic order") {
    Box box{2, make_site({-1, 2}), make_site({1, 4})};
    CHECK(box.cardinality() == 9);
    std::int64_t idx = 0;
    Site prev;
    for_each_site(box, [&](const Site& v) {
        CHECK(box.index_of(v) == idx);
        CHECK(box.site_at(idx) == v);
        if (idx > 0) CHECK(lex_less(prev, v));
        prev = v;
        ++idx;
    });
    CHECK(idx == 9);
}

TEST_CASE("kernel support stays inside the truncation box") {
    CHECK_THROWS(KernelPsi(1, 1, {{make_site({2}), 1.0}}));
    CHECK_THROWS(KernelPsi(1, 1, std::map<Site, double, SiteLexLess>{}));
    KernelPsi k = KernelPsi::line({1.0, 0.5});
    CHECK(k.truncation() == 1);
    CHECK(k.coefficient(make_site({0})) == 1.0);
    CHECK(k.coefficient(make_site({1})) == 0.5);
    CHECK(k.coefficient(make_site({-1})) == 0.0);
}

TEST_CASE("identity kernel reproduces the noise field") {
    KernelPsi k = KernelPsi::delta(1);
    Box window{1, make_site({0}), make_site({49})};
    auto noise = [](const Site& v) { return static_cast<double>(v.c[0] * v.c[0]); };
    FieldSample f = convolve(k, window, noise);
    for_each_site(window, [&](const Site& v) { CHECK(f.at(v) == noise(v)); });
}

TEST_CASE("two-tap kernel on all-ones noise gives the coefficient sum") {
    KernelPsi k = KernelPsi::line({1.0, 0.5});
    Box window{1, make_site({0}), make_site({19})};
    FieldSample f = convolve(k, window, [](const Site&) { return 1.0; });
    for (double v : f.values) CHECK(v == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("moving average tail inflates by the kernel alpha-norm") {
    KernelPsi k = KernelPsi::line({1.0, 0.5});
    TailModel tail(2.0, 1.0);
    Box window{1, make_site({0}), make_site({9999999})};
    FieldSample z = simulate_ma(k, tail, window, 21);
    const double x = 50.0;
    std::int64_t hits = 0;
    for (double v : z.values) {
        if (v > x) ++hits;
    }
    double ratio = static_cast<double>(hits) / static_cast<double>(window.cardinality()) /
                   (1.0 / (x * x));  // P(|xi| > x) = x^-2
    CHECK(ratio == doctest::Approx(1.25).epsilon(0.10));
}

TEST_CASE("volatility recursion parameters are validated") {
    CHECK_THROWS(GarchParams(0.0, 0.1, 0.8));
    CHECK_THROWS(GarchParams(0.1, 0.5, 0.5));
    GarchParams p(0.1, 0.14, 0.6);
    CHECK(p.stationary_mean_sq() == doctest::Approx(0.1 / 0.26).epsilon(1e-12));
}

TEST_CASE("degenerate recursion collapses to a constant path") {
    GarchParams p(0.1, 1e-9, 1e-9);
    FieldSample z = simulate_garch(p, 100000, 500, 31);
    RunningStats sq;
    for (double v : z.values) sq.add(v * v);
    CHECK(sq.mean() == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(sq.variance() < 1e-9);
}

TEST_CASE("squared path matches the stationary mean") {
    GarchParams p(0.1, 0.14, 0.6);
    FieldSample z = simulate_garch(p, 1000000, 2000, 33);
    RunningStats sq;
    for (double v : z.values) sq.add(v * v);
    CHECK(sq.mean() == doctest::Approx(0.1 / 0.26).epsilon(0.05));
}

TEST_CASE("innovation multiplier has mean alpha1 plus beta1") {
    GarchParams p(0.1, 0.14, 0.6);
    RunningStats a;
    for (std::uint64_t i = 0; i < 400000; ++i) {
        double xi = normal_quantile(test_u01(4, i));
        a.add(p.alpha1 * xi * xi + p.beta1);
    }
    CHECK(std::fabs(a.mean() - 0.74) < 3.0 * a.std_error());
}

TEST_CASE("product field scales the volatility field") {
    KernelPsi k = KernelPsi::delta(1);
    TailModel tail(2.0, 1.0);
    Box window{1, make_site({0}), make_site({99})};
    FieldSample z = simulate_ma(k, tail, window, 41);
    FieldSample y2 = VolModelY::constant(2.0).sample_field(window, 41);
    FieldSample x = product_field(y2, z);
    for_each_site(window, [&](const Site& v) {
        CHECK(x.at(v) == doctest::Approx(2.0 * z.at(v)).epsilon(1e-15));
    });
    CHECK_THROWS(product_field(y2, simulate_ma(k, tail, window.padded(1), 41)));
}

TEST_CASE("regime scale doubles the field maximum when values are positive") {
    KernelPsi k = KernelPsi::line({1.0, 0.5});
    TailModel tail(2.0, 1.0);  // p_xi = 1 keeps the noise positive
    Box window{1, make_site({0}), make_site({499})};
    FieldSample z = simulate_ma(k, tail, window, 43);
    VolModelY regime = VolModelY::regime({1.0, 2.0}, {0.5, 0.5}, VolModelY::constant(1.0));
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        FieldSample y = regime.sample_field(window, 7, rep);
        FieldSample x = product_field(y, z);
        double mz = -HUGE_VAL;
        double mx = -HUGE_VAL;
        for (std::int64_t i = 0; i < window.cardinality(); ++i) {
            mz = std::max(mz, z.values[static_cast<std::size_t>(i)]);
            mx = std::max(mx, x.values[static_cast<std::size_t>(i)]);
        }
        CHECK(mx == doctest::Approx(y.regime->scale * mz).epsilon(1e-14));
    }
}

TEST_CASE("ordered neighborhood keeps sites after the reference point") {
    auto a1 = ordered_neighborhood(make_site({0}), 1, 1);
    REQUIRE(a1.size() == 1);
    CHECK(a1[0] == make_site({1}));

    auto a2 = ordered_neighborhood(make_site({0, 0}), 2, 1);
    REQUIRE(a2.size() == 4);
    CHECK(a2[0] == make_site({0, 1}));
    CHECK(a2[1] == make_site({1, -1}));
    CHECK(a2[2] == make_site({1, 0}));
    CHECK(a2[3] == make_site({1, 1}));

    CHECK(ordered_neighborhood(make_site({0, 0}), 2, 2).size() == 12);

    Site w = make_site({5, -3});
    auto shifted = ordered_neighborhood(w, 2, 1);
    for (std::size_t i = 0; i < shifted.size(); ++i) {
        CHECK(shifted[i] == a2[i] + w);
        CHECK(lex_less(w, shifted[i]));
        CHECK_FALSE(shifted[i] == w);
    }
}

TEST_CASE("exactly tiled box has equal inner and outer approximations") {
    IndexSetGeometry geom(ShapeC::unit_box(2), {100.0, 100.0}, {10, 10});
    CHECK(geom.cardinality() == 10000);
    CHECK(geom.inner_cardinality() == 10000);
    CHECK(geom.outer_cardinality() == 10000);
    CHECK(approximation_ratio(geom) == 0.0);
    CHECK(geom.inner_boxes().size() == 100);
    CHECK(geom.outer_boxes().size() == 100);
}

TEST_CASE("one-dimensional tiling with remainder splits inner and outer") {
    IndexSetGeometry geom(ShapeC::unit_box(1), {10.0}, {3});
    CHECK(geom.cardinality() == 10);
    REQUIRE(geom.inner_boxes().size() == 3);   // boxes 0,1,2 fully inside
    REQUIRE(geom.outer_boxes().size() == 4);   // box 3 clips the boundary
    CHECK(geom.inner_cardinality() == 9);
    CHECK(geom.outer_cardinality() == 12);
    CHECK(approximation_ratio(geom) == doctest::Approx(0.3).epsilon(1e-14));
    for (int z = 0; z < 4; ++z) {
        CHECK(geom.in_outer(make_site({z})));
        CHECK(geom.in_inner(make_site({z})) == (z < 3));
    }
}

TEST_CASE("inner sites lie in the set and the set in the outer hull") {
    IndexSetGeometry geom(ShapeC::disc(0.5, 0.5, 0.5), {40.0, 40.0}, {6, 6});
    std::set<Site, SiteLexLess> members(geom.sites().begin(), geom.sites().end());
    for (const Site& z : geom.inner_boxes()) {
        for_each_site(geom.box_sites(z), [&](const Site& v) { CHECK(members.count(v) == 1); });
    }
    std::int64_t covered = 0;
    for (const Site& z : geom.outer_boxes()) {
        for_each_site(geom.box_sites(z), [&](const Site& v) { covered += members.count(v); });
    }
    CHECK(covered == geom.cardinality());  // outer boxes cover D_n, disjointly
    CHECK(geom.inner_cardinality() ==
          static_cast<std::int64_t>(geom.inner_boxes().size()) * geom.t_star());
    CHECK(geom.outer_cardinality() ==
          static_cast<std::int64_t>(geom.outer_boxes().size()) * geom.t_star());
}

TEST_CASE("box_of inverts box_sites on the tiling") {
    IndexSetGeometry geom(ShapeC::unit_box(2), {30.0, 30.0}, {7, 5}, {0.25, 0.5});
    for (const Site& z : geom.outer_boxes()) {
        for_each_site(geom.box_sites(z), [&](const Site& v) { CHECK(geom.box_of(v) == z); });
    }
}

TEST_CASE("scaled disc lattice count approaches its area") {
    IndexSetGeometry geom(ShapeC::disc(0.5, 0.5, 0.5), {1000.0, 1000.0}, {100, 100});
    double area = std::acos(-1.0) / 4.0 * 1e6;
    CHECK(std::fabs(static_cast<double>(geom.cardinality()) - area) / area < 0.01);
}

TEST_CASE("disc approximation sharpens as boxes shrink") {
    IndexSetGeometry coarse(ShapeC::disc(0.5, 0.5, 0.5), {1000.0, 1000.0}, {100, 100});
    IndexSetGeometry fine = coarse.rebox({10, 10});
    CHECK(approximation_ratio(coarse) < 0.5);
    CHECK(approximation_ratio(fine) < approximation_ratio(coarse));
    CHECK(fine.cardinality() == coarse.cardinality());
}

TEST_CASE("subregion boxes count tiles inside and touching a region") {
    IndexSetGeometry geom(ShapeC::unit_box(1), {100.0}, {25});
    SubregionCounts whole = subregion_boxes(geom, 4, geom.sites());
    CHECK(whole.inner == 4);
    CHECK(whole.outer == 4);

    std::vector<Site> half;
    for (const Site& v : geom.sites()) {
        if (v.c[0] < 50) half.push_back(v);
    }
    SubregionCounts left = subregion_boxes(geom, 4, half);
    CHECK(left.inner == 2);
    CHECK(left.outer == 2);
}

TEST_CASE("subregion fractions of a disc approach the area ratio") {
    IndexSetGeometry geom(ShapeC::unit_box(2), {400.0, 400.0}, {20, 20});
    std::vector<Site> disc;
    ShapeC sub = ShapeC::disc(0.5, 0.5, 0.25);
    for (const Site& v : geom.sites()) {
        if (geom.member_scaled(sub, v)) disc.push_back(v);
    }
    double b = std::acos(-1.0) * 0.25 * 0.25;  // |B| / |C|
    for (std::int64_t k : {100, 400}) {
        SubregionCounts counts = subregion_boxes(geom, k, disc);
        double inner = static_cast<double>(counts.inner) / static_cast<double>(k);
        double outer = static_cast<double>(counts.outer) / static_cast<double>(k);
        CHECK(inner <= b);
        CHECK(outer >= b);
        CHECK(outer - inner < (k == 100 ? 0.30 : 0.16));
    }
}

TEST_CASE("member_scaled tracks half-open scaled boxes exactly") {
    IndexSetGeometry geom(ShapeC::unit_box(1), {10.0}, {2});
    ShapeC left = ShapeC::box_union(1, {RealBox{{0.0}, {0.5}}});
    std::int64_t count = 0;
    for (const Site& v : geom.sites()) {
        if (geom.member_scaled(left, v)) ++count;
    }
    CHECK(count == 5);  // sites 0..4; site 5 sits on the open edge
    CHECK(geom.member_scaled(left, make_site({4})));
    CHECK_FALSE(geom.member_scaled(left, make_site({5})));
}

TEST_CASE("shape parameters finer than six decimals are rejected") {
    CHECK_THROWS(ShapeC::disc(0.5, 0.5, 0.1234567));
    CHECK_NOTHROW(ShapeC::disc(0.5, 0.5, 0.123456));
    CHECK_THROWS(IndexSetGeometry(ShapeC::unit_box(1), {10.0000001}, {2}));
}
