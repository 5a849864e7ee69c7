#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "billiard/rng.hpp"
#include "billiard/scaling.hpp"

using namespace billiard;

namespace {

std::vector<ScalingPoint> grid_points(double a, double b, double c, double noise_sigma,
                                      Rng* rng) {
    std::vector<ScalingPoint> pts;
    for (int k = 15; k <= 35; k += 5)
        for (int lognb = 4; lognb <= 9; ++lognb) {
            ScalingPoint p;
            p.k = k;
            p.log2_nb = lognb;
            p.nc = a + b * k + c * lognb;
            if (rng && noise_sigma > 0.0) {
                // Box-Muller
                const double u1 = rng->uniform(1e-12, 1.0);
                const double u2 = rng->uniform();
                p.nc += noise_sigma * std::sqrt(-2.0 * std::log(u1)) *
                        std::cos(2.0 * std::numbers::pi * u2);
            }
            p.weight = 1.0;
            pts.push_back(p);
        }
    return pts;
}

} // namespace

TEST_CASE("noiseless synthetic data is recovered exactly") {
    auto pts = grid_points(2.8, 0.21, -0.35, 0.0, nullptr);
    ScalingFit fit = fit_scaling(pts);
    CHECK(std::abs(fit.a - 2.8) < 1e-9);
    CHECK(std::abs(fit.b - 0.21) < 1e-9);
    CHECK(std::abs(fit.c + 0.35) < 1e-9);
    CHECK(fit.residual_rms < 1e-9);
    CHECK(fit.k_min == 15);
    CHECK(fit.k_max == 35);
}

TEST_CASE("single-k data is rank deficient") {
    std::vector<ScalingPoint> pts;
    for (int lognb = 4; lognb <= 9; ++lognb)
        pts.push_back({20.0, double(lognb), 5.0 - 0.3 * lognb, 1.0});
    CHECK_THROWS_AS((void)fit_scaling(pts), RankDeficientError);
}

TEST_CASE("axis crossing solves the fit at nc = 1") {
    auto pts = grid_points(2.8, 0.21, -0.35, 0.0, nullptr);
    ScalingFit fit = fit_scaling(pts);
    auto x = axis_crossing(fit, 5.0);
    REQUIRE(x.has_value());
    CHECK(x->log2_nb == doctest::Approx((2.8 + 0.21 * 5.0 - 1.0) / 0.35).epsilon(1e-9));
    // the crossing satisfies the fit equation at N_c = 1
    CHECK(std::abs(fit.predict(5.0, x->log2_nb) - 1.0) < 1e-12);
    // crossing grows with k when C < 0
    auto x2 = axis_crossing(fit, 10.0);
    REQUIRE(x2.has_value());
    CHECK(x2->log2_nb > x->log2_nb);

    ScalingFit flat = fit;
    flat.c = 0.0;
    CHECK_FALSE(axis_crossing(flat, 5.0).has_value());
}

TEST_CASE("precision tradeoff factor") {
    ScalingFit fit;
    fit.b = 0.21;
    fit.c = -0.35;
    CHECK(precision_tradeoff(fit) == doctest::Approx(std::exp2(0.6)).epsilon(1e-12));
    fit.b = 0.35;
    CHECK(precision_tradeoff(fit) == doctest::Approx(2.0).epsilon(1e-12));
    // invariant under common rescaling of B and C
    ScalingFit scaled = fit;
    scaled.b *= 3.0;
    scaled.c *= 3.0;
    CHECK(precision_tradeoff(scaled) == doctest::Approx(precision_tradeoff(fit)).epsilon(1e-12));
    fit.c = 0.2;
    CHECK_THROWS_AS((void)precision_tradeoff(fit), std::domain_error);
}

TEST_CASE("fit residuals ignore input ordering") {
    Rng rng(31);
    auto pts = grid_points(3.0, 0.4, -0.5, 0.2, &rng);
    ScalingFit f1 = fit_scaling(pts);
    std::reverse(pts.begin(), pts.end());
    ScalingFit f2 = fit_scaling(pts);
    CHECK(f1.residual_rms == doctest::Approx(f2.residual_rms).epsilon(1e-12));
    CHECK(f1.b == doctest::Approx(f2.b).epsilon(1e-12));
}

TEST_CASE("recovered coefficients stay inside 3-sigma intervals") {
    Rng rng(202);
    int inside_a = 0, inside_b = 0, inside_c = 0;
    const int reps = 1000;
    for (int rep = 0; rep < reps; ++rep) {
        auto pts = grid_points(2.8, 0.21, -0.35, 0.15, &rng);
        ScalingFit fit = fit_scaling(pts);
        inside_a += std::abs(fit.a - 2.8) <= 3.0 * fit.se_a;
        inside_b += std::abs(fit.b - 0.21) <= 3.0 * fit.se_b;
        inside_c += std::abs(fit.c + 0.35) <= 3.0 * fit.se_c;
    }
    CHECK(inside_a >= int(0.95 * reps));
    CHECK(inside_b >= int(0.95 * reps));
    CHECK(inside_c >= int(0.95 * reps));
}
