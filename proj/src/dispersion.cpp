#include "billiard/dispersion.hpp"

#include <algorithm>
#include <cmath>

namespace billiard {

void DispersionHistogram::record(const ShockDispersionSample& sample) {
    record_many(sample, 1);
}

void DispersionHistogram::record_many(const ShockDispersionSample& sample, std::uint64_t count) {
    if (count == 0) return;
    if (sample.degenerate()) {
        degenerate_ += count;
        return;
    }
    const double a_n = sample.coordinate();
    if (!std::isfinite(a_n)) {
        degenerate_ += count;
        return;
    }
    double clamped = a_n;
    if (a_n < 0.0) {
        clamped = 0.0;
        clamped_low_ += count;
    } else if (a_n > 255.0) {
        clamped = 255.0;
        clamped_high_ += count;
    }
    const int idx = static_cast<int>(std::lround(clamped));
    bins_[idx] += count;
    total_ += count;
    ratio_sum_ += count * (sample.out_diff / sample.in_diff);
    log_ratio_sum_ += count * std::log2(sample.out_diff / sample.in_diff);
}

void DispersionHistogram::merge(const DispersionHistogram& other) {
    for (int i = 0; i < kBins; ++i) bins_[i] += other.bins_[i];
    total_ += other.total_;
    degenerate_ += other.degenerate_;
    clamped_low_ += other.clamped_low_;
    clamped_high_ += other.clamped_high_;
    ratio_sum_ += other.ratio_sum_;
    log_ratio_sum_ += other.log_ratio_sum_;
}

int DispersionHistogram::mode_bin() const {
    int best = 0;
    for (int i = 1; i < kBins; ++i)
        if (bins_[i] > bins_[best]) best = i;
    return best;
}

double DispersionHistogram::mass_below(int pivot_bin) const {
    if (!total_) return 0.0;
    std::uint64_t n = 0;
    for (int i = 0; i < std::min(pivot_bin, kBins); ++i) n += bins_[i];
    return double(n) / double(total_);
}

double DispersionHistogram::mass_above(int pivot_bin) const {
    if (!total_) return 0.0;
    std::uint64_t n = 0;
    for (int i = pivot_bin + 1; i < kBins; ++i) n += bins_[i];
    return double(n) / double(total_);
}

namespace {

struct Line {
    double slope = 0.0;
    double intercept = 0.0;
    double rss = 0.0;
    int n = 0;
};

Line fit_line(const DispersionHistogram& h, int from, int to) {
    Line line;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = from; i <= to; ++i) {
        if (h.bin(i) == 0) continue;  // only populated bins carry signal
        const double x = i;
        const double y = std::log2(double(h.bin(i)) + 1.0);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        line.n += 1;
    }
    if (line.n < 2) return line;
    const double det = line.n * sxx - sx * sx;
    line.slope = (line.n * sxy - sx * sy) / det;
    line.intercept = (sy - line.slope * sx) / line.n;
    for (int i = from; i <= to; ++i) {
        if (h.bin(i) == 0) continue;
        const double e = std::log2(double(h.bin(i)) + 1.0) - (line.slope * i + line.intercept);
        line.rss += e * e;
    }
    return line;
}

} // namespace

TriangleFit fit_triangle(const DispersionHistogram& hist) {
    if (hist.total() < 10000)
        throw TriangleFitError("need at least 10000 samples for a triangle fit");
    const int mode = hist.mode_bin();
    int populated_below = 0, populated_above = 0;
    for (int i = 0; i < mode; ++i) populated_below += hist.bin(i) > 0;
    for (int i = mode + 1; i < DispersionHistogram::kBins; ++i) populated_above += hist.bin(i) > 0;
    if (populated_below < 5 || populated_above < 5)
        throw TriangleFitError("fewer than 5 populated bins on one side of the mode");

    Line up = fit_line(hist, 0, mode);
    Line down = fit_line(hist, mode, DispersionHistogram::kBins - 1);
    if (!(up.slope > 0.0) || !(down.slope < 0.0))
        throw TriangleFitError("histogram is not triangular (flat or wrong-signed slopes)");

    TriangleFit fit;
    fit.peak = mode;
    fit.s_up = up.slope;
    fit.s_down = down.slope;
    fit.bins_below = up.n;
    fit.bins_above = down.n;
    fit.residual_rms = std::sqrt((up.rss + down.rss) / std::max(1, up.n + down.n));
    return fit;
}

InvarianceReport invariance_check(const DispersionHistogram& a, const DispersionHistogram& b,
                                  double threshold) {
    InvarianceReport rep;
    rep.threshold = threshold;
    double tv = 0.0;
    for (int i = 0; i < DispersionHistogram::kBins; ++i)
        tv += std::abs(a.normalized(i) - b.normalized(i));
    rep.total_variation = 0.5 * tv;
    rep.pass = rep.total_variation < threshold;
    return rep;
}

DispersionHistogram collect_dispersion(const DispersionRunConfig& config, std::uint64_t seed) {
    DispersionHistogram hist;
    hist.void_ratio = config.table.void_ratio();
    hist.radius = config.table.radius;
    hist.n_balls = config.table.n_balls;
    hist.epsilon_exp = config.perturbation.epsilon_exp;

    std::uint64_t trial = 0;
    while (hist.total() < config.n_samples_target) {
        PerturbationSpec pert = config.perturbation;
        const std::uint64_t trial_seed = hash_combine(seed, trial);
        pert.sign_seed = hash_combine(trial_seed, 1);
        PairedWorld pair = PairedWorld::make(config.table, pert, hash_combine(trial_seed, 0));
        pair.run_until_divergence(config.max_shocks_per_ball, false, false,
                                  [&](const ShockDispersionRecord& rec) {
                                      hist.record({rec.in_diff, rec.out_diff});
                                  });
        trial += 1;
        if (trial > 100 && hist.total() == 0)
            throw std::runtime_error("dispersion collection is not producing samples");
    }
    return hist;
}

} // namespace billiard
