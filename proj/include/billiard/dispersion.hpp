#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "billiard/paired.hpp"

namespace billiard {

// A_n = 128 + 4 log2(in/out); the affine constants keep the abscissa an
// integer in [0, 255]. Dispersive shocks (out > in) land below 128.
inline double dispersion_coordinate(double in_diff, double out_diff) {
    return 128.0 + 4.0 * std::log2(in_diff / out_diff);
}

inline double ratio_from_coordinate(double a_n) {
    // out/in ratio that maps to this coordinate
    return std::exp2((128.0 - a_n) / 4.0);
}

struct ShockDispersionSample {
    double in_diff = 0.0;   // |V_in1 - V_in2|
    double out_diff = 0.0;  // |V_out1 - V_out2|

    bool degenerate() const { return !(in_diff > 0.0) || !(out_diff > 0.0); }
    double coordinate() const { return dispersion_coordinate(in_diff, out_diff); }
};

class DispersionHistogram {
public:
    static constexpr int kBins = 256;

    void record(const ShockDispersionSample& sample);
    void record_many(const ShockDispersionSample& sample, std::uint64_t count);
    void merge(const DispersionHistogram& other);

    std::uint64_t bin(int i) const { return bins_[i]; }
    std::uint64_t total() const { return total_; }
    std::uint64_t degenerate_count() const { return degenerate_; }
    std::uint64_t clamped_low() const { return clamped_low_; }
    std::uint64_t clamped_high() const { return clamped_high_; }

    int mode_bin() const;
    double normalized(int i) const { return total_ ? double(bins_[i]) / double(total_) : 0.0; }

    // mean of the out/in ratio over recorded (non-degenerate) samples
    double mean_out_in_ratio() const { return total_ ? ratio_sum_ / double(total_) : 0.0; }
    // mean of log2(out/in)
    double mean_log2_ratio() const { return total_ ? log_ratio_sum_ / double(total_) : 0.0; }

    double mass_below(int pivot_bin) const;  // normalized mass in bins < pivot
    double mass_above(int pivot_bin) const;

    // configuration echo, carried for provenance
    double void_ratio = 0.0;
    double radius = 0.0;
    int n_balls = 0;
    int epsilon_exp = 0;

private:
    std::array<std::uint64_t, kBins> bins_{};
    std::uint64_t total_ = 0;
    std::uint64_t degenerate_ = 0;
    std::uint64_t clamped_low_ = 0;
    std::uint64_t clamped_high_ = 0;
    double ratio_sum_ = 0.0;
    double log_ratio_sum_ = 0.0;
};

struct TriangleFit {
    double peak = 0.0;      // A_n coordinate of the mode
    double s_up = 0.0;      // ascending slope, log2 counts per bin (> 0)
    double s_down = 0.0;    // descending slope (< 0)
    double residual_rms = 0.0;
    int bins_below = 0;
    int bins_above = 0;
};

struct TriangleFitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two-segment least squares on log2(count + 1) against the bin index, on
// either side of the mode. Needs >= 10000 samples and >= 5 populated bins per
// side; a flat histogram (slopes with the wrong signs) is a fit failure.
TriangleFit fit_triangle(const DispersionHistogram& hist);

struct InvarianceReport {
    double total_variation = 0.0;  // (1/2) sum |p_i - q_i|
    double threshold = 0.05;
    bool pass = false;
};

// Total-variation distance between two normalized histograms.
InvarianceReport invariance_check(const DispersionHistogram& a, const DispersionHistogram& b,
                                  double threshold = 0.05);

struct DispersionRunConfig {
    TableConfig table;
    PerturbationSpec perturbation;
    std::uint64_t n_samples_target = 100000;
    double max_shocks_per_ball = 200.0;
};

// Runs paired trials (restarting whenever the twins decorrelate) and logs the
// in/out velocity-difference pair of every matched shock until the target
// sample count accumulates.
DispersionHistogram collect_dispersion(const DispersionRunConfig& config, std::uint64_t seed);

} // namespace billiard
