#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "billiard/dispersion.hpp"
#include "billiard/rng.hpp"
#include "billiard/scaling.hpp"

namespace billiard {

// Draws out/in velocity-dispersion ratios, either straight from a collected
// histogram (inverse CDF with in-bin jitter, undoing Eq-style 0.25-bit
// quantization) or from the fitted two-slope triangular density.
class RatioSampler {
public:
    static RatioSampler from_histogram(const DispersionHistogram& hist);
    static RatioSampler from_triangle(const TriangleFit& fit);
    static RatioSampler constant(double ratio);  // degenerate, for closed-form checks

    // strictly positive, finite out/in ratio
    double sample(Rng& rng) const;

    double mean_log2_ratio() const { return mean_log2_ratio_; }

private:
    RatioSampler() = default;

    enum class Kind { empirical, triangular, constant };
    Kind kind_ = Kind::empirical;
    double constant_ratio_ = 1.0;
    // empirical: cumulative bin probabilities
    std::vector<double> cdf_;
    // triangular: truncated two-sided exponential in the A_n coordinate
    double peak_ = 128.0;
    double s_up_ = 1.0;
    double s_down_ = -1.0;
    double below_weight_ = 0.5;
    double lo_factor_ = 0.0;   // 2^(s_up (0 - peak))
    double hi_factor_ = 0.0;   // 2^(s_down (255 - peak))
    double mean_log2_ratio_ = 0.0;
};

struct DegenerateSamplerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Multiplicative-walk statistics for one coupled pair: starting at 2^-k, how
// many dispersion steps until the separation reaches the threshold.
struct SurrogateStats {
    int epsilon_exp = 0;
    double threshold = 1.0;
    std::uint64_t trials = 0;
    std::uint64_t budget_exceeded = 0;
    double mean_steps = 0.0;
    double variance = 0.0;
    // survival[n] = P(steps > n); survival[0] = 1
    std::vector<double> survival;
    // divergence probability at step n (index 0 unused)
    std::vector<double> p_diverge;
    // per-batch survival curves (trials split 8 ways) for interval estimates
    std::vector<std::vector<double>> batch_survival;
};

SurrogateStats surrogate_nc(const RatioSampler& sampler, int epsilon_exp, double threshold,
                            std::uint64_t trials, std::uint64_t seed,
                            std::uint64_t step_budget = 100000);

// The paper never says how N_b enters the two-ball model; here the billiard
// is treated as an effective number g of independent pair walks whose first
// passage ends the run, with log2 g affine in log2 N_b and the two
// coefficients calibrated against full paired-simulation means.
struct NbBridgeCalibration {
    double gamma0 = 0.0;  // log2 g = gamma0 + gamma1 * log2 N_b
    double gamma1 = 1.0;
    double log2_nb_min = 0.0;  // calibration support
    double log2_nb_max = 0.0;
    double rms_error = 0.0;    // in N_c units over the calibration points
};

struct BridgeObservation {
    int epsilon_exp = 0;
    double log2_nb = 0.0;
    double nc = 0.0;
};

// Expected first passage of the minimum of g independent walks,
// E = 1 + sum_{n>=1} survival(n)^g.
double expected_min_steps(std::span<const double> survival, double g);
double expected_min_steps(const SurrogateStats& stats, double g);

NbBridgeCalibration calibrate_nb_bridge(
    std::span<const BridgeObservation> observations,
    const std::function<const SurrogateStats&(int)>& stats_for_k);

struct SurfaceCell {
    int epsilon_exp = 0;
    double log2_nb = 0.0;
    double nc_mean = 0.0;
    double nc_ci_low = 0.0;
    double nc_ci_high = 0.0;
    bool crossed_axis = false;
    bool extrapolated = false;  // outside the calibrated N_b support
};

// The Fig-5 style surface: N_c estimates over a (k, log2 N_b) grid, with
// confidence intervals from the batch survival curves and axis crossings
// flagged via a per-k linear fit over the pre-floor region.
std::vector<SurfaceCell> nb_scaling_bridge(const std::vector<SurrogateStats>& per_k_stats,
                                           const NbBridgeCalibration& calibration,
                                           std::span<const double> log2_nb_grid);

} // namespace billiard
