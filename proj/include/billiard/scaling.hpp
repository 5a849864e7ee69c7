#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace billiard {

// One sweep cell entered into the regression.
struct ScalingPoint {
    double k = 0.0;        // -log2(eps_p)
    double log2_nb = 0.0;
    double nc = 0.0;
    double weight = 1.0;
};

// Coefficients of N_c = A + B k + C log2(N_b) with diagnostics. The paper's
// B Log(eps) term equals +B k in this parameterization.
struct ScalingFit {
    double a = 0.0, b = 0.0, c = 0.0;
    double se_a = 0.0, se_b = 0.0, se_c = 0.0;
    double residual_rms = 0.0;
    int n_points = 0;
    // domain of validity box
    double k_min = 0.0, k_max = 0.0;
    double log2_nb_min = 0.0, log2_nb_max = 0.0;
    // covariance of (a, b, c), row-major upper triangle
    double cov[3][3] = {};

    double predict(double k, double log2_nb) const { return a + b * k + c * log2_nb; }

    bool in_domain(double k, double log2_nb) const {
        return k >= k_min && k <= k_max && log2_nb >= log2_nb_min && log2_nb <= log2_nb_max;
    }
};

struct RankDeficientError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Weighted least squares for the three-parameter linear model. Requires at
// least 6 points spanning >= 2 distinct k and >= 2 distinct N_b values.
ScalingFit fit_scaling(std::span<const ScalingPoint> points);

// log2(N_b) at which the fitted line reaches N_c = 1 for the given k, with a
// delta-method standard error. nullopt when C >= 0 (no crossing).
struct AxisCrossing {
    double log2_nb = 0.0;
    double stderr_log2_nb = 0.0;
    bool extrapolated = false;  // outside the fit's domain box
};
std::optional<AxisCrossing> axis_crossing(const ScalingFit& fit, double k);

// 2^(B/|C|): the N_b multiplier that cancels one added bit of P_a at fixed
// N_c. Throws std::domain_error unless B > 0 and C < 0.
double precision_tradeoff(const ScalingFit& fit);

} // namespace billiard
