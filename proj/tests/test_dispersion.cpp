#include "doctest.h"

#include <cmath>

#include "billiard/dispersion.hpp"
#include "billiard/rng.hpp"

using namespace billiard;

TEST_CASE("dispersion coordinate mapping") {
    CHECK(dispersion_coordinate(1.0, 1.0) == 128.0);            // ratio 1: no dispersion
    CHECK(dispersion_coordinate(1.0, 2.0) == 124.0);            // dispersive: below 128
    CHECK(dispersion_coordinate(4.0, 1.0) == 136.0);            // focusing: above 128
    CHECK(ratio_from_coordinate(124.0) == doctest::Approx(2.0));
    CHECK(ratio_from_coordinate(128.0) == doctest::Approx(1.0));
    // bin mapping is monotone in log2(in/out)
    double prev = dispersion_coordinate(1.0, 1e6);
    for (double out = 1e5; out >= 1e-6; out /= 10.0) {
        const double cur = dispersion_coordinate(1.0, out);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("histogram recording, degenerate and clamped samples") {
    DispersionHistogram h;
    h.record({1.0, 1.0});
    CHECK(h.bin(128) == 1);
    h.record({1.0, 2.0});
    CHECK(h.bin(124) == 1);
    h.record({0.0, 2.0});
    h.record({2.0, 0.0});
    CHECK(h.degenerate_count() == 2);
    CHECK(h.total() == 2);
    h.record({1.0, 1e30});  // A_n would be far below 0
    CHECK(h.clamped_low() == 1);
    CHECK(h.bin(0) == 1);
    h.record({1e30, 1.0});
    CHECK(h.clamped_high() == 1);
    CHECK(h.bin(255) == 1);
    CHECK(h.mode_bin() >= 0);
}

TEST_CASE("histograms merge associatively") {
    Rng rng(4);
    DispersionHistogram a, b, whole;
    for (int i = 0; i < 5000; ++i) {
        ShockDispersionSample s{std::exp2(rng.uniform(-3, 3)), std::exp2(rng.uniform(-3, 3))};
        (i % 2 ? a : b).record(s);
        whole.record(s);
    }
    DispersionHistogram merged = a;
    merged.merge(b);
    CHECK(merged.total() == whole.total());
    for (int i = 0; i < DispersionHistogram::kBins; ++i) CHECK(merged.bin(i) == whole.bin(i));
    CHECK(merged.mean_out_in_ratio() == doctest::Approx(whole.mean_out_in_ratio()).epsilon(1e-12));
}

TEST_CASE("triangle fit recovers synthetic slopes within 1%") {
    DispersionHistogram h;
    // exact triangle in log2 counts: peak at bin 128, slopes +2.2 / -5;
    // counts 2^L - 1 make log2(count + 1) land exactly on the line
    for (int bin = 0; bin < DispersionHistogram::kBins; ++bin) {
        double log_count;
        if (bin <= 128) log_count = 30.0 + 2.2 * (bin - 128);
        else log_count = 30.0 - 5.0 * (bin - 128);
        if (log_count < 0.0) continue;
        const auto count = static_cast<std::uint64_t>(std::llround(std::exp2(log_count) - 1.0));
        h.record_many({1.0, ratio_from_coordinate(bin)}, count);
    }
    TriangleFit fit = fit_triangle(h);
    CHECK(fit.peak == 128.0);
    CHECK(fit.s_up == doctest::Approx(2.2).epsilon(0.01));
    CHECK(fit.s_down == doctest::Approx(-5.0).epsilon(0.01));
}

TEST_CASE("flat histogram is a fit failure") {
    DispersionHistogram h;
    for (int bin = 100; bin <= 156; ++bin) {
        const double ratio = ratio_from_coordinate(bin);
        for (int c = 0; c < 400; ++c) h.record({1.0, ratio});
    }
    CHECK_THROWS_AS((void)fit_triangle(h), TriangleFitError);
}

TEST_CASE("too few samples or populated bins fail the fit") {
    DispersionHistogram h;
    for (int c = 0; c < 100; ++c) h.record({1.0, 1.0});
    CHECK_THROWS_AS((void)fit_triangle(h), TriangleFitError);

    DispersionHistogram narrow;
    for (int c = 0; c < 20000; ++c) narrow.record({1.0, 1.0});
    for (int c = 0; c < 2000; ++c) narrow.record({1.0, 2.0});
    for (int c = 0; c < 2000; ++c) narrow.record({2.0, 1.0});
    CHECK_THROWS_AS((void)fit_triangle(narrow), TriangleFitError);
}

TEST_CASE("invariance check distances") {
    DispersionHistogram a, b;
    for (int c = 0; c < 10000; ++c) {
        a.record({1.0, 1.0});
        b.record({1.0, 1.0});
    }
    InvarianceReport same = invariance_check(a, b);
    CHECK(same.total_variation == 0.0);
    CHECK(same.pass);

    DispersionHistogram c;
    for (int i = 0; i < 10000; ++i) c.record({1.0, 2.0});
    InvarianceReport diff = invariance_check(a, c);
    CHECK(diff.total_variation == doctest::Approx(1.0));
    CHECK_FALSE(diff.pass);
}

TEST_CASE("collected histogram has dispersive majority at rv 0.33") {
    DispersionRunConfig cfg;
    cfg.table.side = 4096;
    cfg.table.n_balls = 16;
    cfg.table.radius = radius_for_void_ratio(0.33, 16, 4096.0);
    cfg.perturbation.epsilon_exp = 35;
    cfg.perturbation.sign_seed = 3;
    cfg.n_samples_target = 4000;
    DispersionHistogram h = collect_dispersion(cfg, 99);
    CHECK(h.total() >= 4000);
    // mode close to "no dispersion"
    CHECK(h.mode_bin() >= 120);
    CHECK(h.mode_bin() <= 134);
    // shocks are mostly dispersive
    CHECK(h.mass_below(128) > h.mass_above(128));
    // config echo travels with the histogram
    CHECK(h.n_balls == 16);
    CHECK(h.epsilon_exp == 35);

    // empty request gives an empty histogram
    DispersionRunConfig none = cfg;
    none.n_samples_target = 0;
    DispersionHistogram h0 = collect_dispersion(none, 1);
    CHECK(h0.total() == 0);
}
