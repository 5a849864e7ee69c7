#include "billiard/two_ball.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace billiard {

RatioSampler RatioSampler::from_histogram(const DispersionHistogram& hist) {
    if (hist.total() == 0) throw DegenerateSamplerError("empty dispersion histogram");
    RatioSampler s;
    s.kind_ = Kind::empirical;
    s.cdf_.resize(DispersionHistogram::kBins);
    double acc = 0.0;
    for (int i = 0; i < DispersionHistogram::kBins; ++i) {
        acc += hist.normalized(i);
        s.cdf_[i] = acc;
    }
    s.cdf_.back() = 1.0;
    s.mean_log2_ratio_ = hist.mean_log2_ratio();
    return s;
}

RatioSampler RatioSampler::from_triangle(const TriangleFit& fit) {
    if (!(fit.s_up > 0.0) || !(fit.s_down < 0.0))
        throw DegenerateSamplerError("triangle fit has wrong-signed slopes");
    RatioSampler s;
    s.kind_ = Kind::triangular;
    s.peak_ = fit.peak;
    s.s_up_ = fit.s_up;
    s.s_down_ = fit.s_down;
    s.lo_factor_ = std::exp2(fit.s_up * (0.0 - fit.peak));
    s.hi_factor_ = std::exp2(fit.s_down * (255.0 - fit.peak));
    // side masses of the truncated two-sided exponential density
    const double ln2 = std::numbers::ln2;
    const double below = (1.0 - s.lo_factor_) / (fit.s_up * ln2);
    const double above = (1.0 - s.hi_factor_) / (-fit.s_down * ln2);
    s.below_weight_ = below / (below + above);
    // E[A] from the truncated-exponential side means:
    // E[x] over [0, X] with rate l is 1/l - X e^{-lX} / (1 - e^{-lX})
    auto trunc_exp_mean = [](double rate, double width) {
        const double e = std::exp(-rate * width);
        return 1.0 / rate - width * e / (1.0 - e);
    };
    const double mean_below = trunc_exp_mean(fit.s_up * ln2, fit.peak);
    const double mean_above = trunc_exp_mean(-fit.s_down * ln2, 255.0 - fit.peak);
    const double mean_a = fit.peak - s.below_weight_ * mean_below
                        + (1.0 - s.below_weight_) * mean_above;
    s.mean_log2_ratio_ = (128.0 - mean_a) / 4.0;
    return s;
}

RatioSampler RatioSampler::constant(double ratio) {
    if (!(ratio > 0.0) || !std::isfinite(ratio))
        throw DegenerateSamplerError("constant ratio must be positive and finite");
    RatioSampler s;
    s.kind_ = Kind::constant;
    s.constant_ratio_ = ratio;
    s.mean_log2_ratio_ = std::log2(ratio);
    return s;
}

double RatioSampler::sample(Rng& rng) const {
    if (kind_ == Kind::constant) return constant_ratio_;
    double a_n;
    if (kind_ == Kind::empirical) {
        const double u = rng.uniform();
        const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        const int bin = static_cast<int>(it - cdf_.begin());
        // uniform jitter inside the bin undoes the 0.25-bit quantization
        a_n = bin + rng.uniform() - 0.5;
    } else {
        if (rng.uniform() < below_weight_) {
            const double u = rng.uniform(lo_factor_, 1.0);
            a_n = peak_ + std::log2(u) / s_up_;  // log2(u) <= 0: below the peak
        } else {
            const double u = rng.uniform(hi_factor_, 1.0);
            a_n = peak_ + std::log2(u) / s_down_;
        }
    }
    return ratio_from_coordinate(a_n);
}

SurrogateStats surrogate_nc(const RatioSampler& sampler, int epsilon_exp, double threshold,
                            std::uint64_t trials, std::uint64_t seed,
                            std::uint64_t step_budget) {
    if (trials == 0) throw std::invalid_argument("surrogate_nc needs at least one trial");
    if (epsilon_exp < 1) throw std::invalid_argument("epsilon exponent must be >= 1");

    SurrogateStats stats;
    stats.epsilon_exp = epsilon_exp;
    stats.threshold = threshold;
    stats.trials = trials;

    constexpr int kBatches = 8;
    std::vector<std::uint64_t> step_counts;
    step_counts.reserve(trials);
    const double start = std::ldexp(1.0, -epsilon_exp);

    Rng rng(seed);
    double sum = 0.0, sum2 = 0.0;
    std::uint64_t max_steps = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        double delta = start;
        std::uint64_t n = 0;
        while (delta < threshold && n < step_budget) {
            delta *= sampler.sample(rng);
            n += 1;
        }
        if (delta < threshold) {
            stats.budget_exceeded += 1;
            continue;
        }
        step_counts.push_back(n);
        sum += double(n);
        sum2 += double(n) * double(n);
        max_steps = std::max(max_steps, n);
    }
    if (step_counts.empty())
        throw DegenerateSamplerError("no trial diverged within the step budget");

    const double m = double(step_counts.size());
    stats.mean_steps = sum / m;
    stats.variance = std::max(0.0, sum2 / m - stats.mean_steps * stats.mean_steps);

    stats.survival.assign(max_steps + 1, 0.0);
    stats.p_diverge.assign(max_steps + 1, 0.0);
    std::vector<std::vector<std::uint64_t>> batch_tail(kBatches,
                                                       std::vector<std::uint64_t>(max_steps + 1, 0));
    std::vector<std::uint64_t> tail(max_steps + 1, 0);
    std::vector<std::uint64_t> batch_size(kBatches, 0);
    for (std::size_t idx = 0; idx < step_counts.size(); ++idx) {
        const std::uint64_t n = step_counts[idx];
        const int bb = static_cast<int>(idx % kBatches);
        batch_size[bb] += 1;
        stats.p_diverge[n] += 1.0;
        for (std::uint64_t s = 0; s < n && s <= max_steps; ++s) {
            tail[s] += 1;
            batch_tail[bb][s] += 1;
        }
    }
    for (std::uint64_t s = 0; s <= max_steps; ++s) stats.survival[s] = tail[s] / m;
    for (std::uint64_t s = 0; s <= max_steps; ++s) stats.p_diverge[s] /= m;
    stats.batch_survival.resize(kBatches);
    for (int bb = 0; bb < kBatches; ++bb) {
        stats.batch_survival[bb].assign(max_steps + 1, 0.0);
        if (batch_size[bb] == 0) continue;
        for (std::uint64_t s = 0; s <= max_steps; ++s)
            stats.batch_survival[bb][s] = double(batch_tail[bb][s]) / double(batch_size[bb]);
    }
    return stats;
}

double expected_min_steps(std::span<const double> survival, double g) {
    double e = 1.0;
    for (std::size_t n = 1; n < survival.size(); ++n) {
        const double s = survival[n];
        if (s <= 0.0) break;
        e += std::pow(s, g);
    }
    return e;
}

double expected_min_steps(const SurrogateStats& stats, double g) {
    return expected_min_steps(std::span<const double>(stats.survival), g);
}

NbBridgeCalibration calibrate_nb_bridge(
    std::span<const BridgeObservation> observations,
    const std::function<const SurrogateStats&(int)>& stats_for_k) {
    if (observations.size() < 2)
        throw std::invalid_argument("calibration needs at least two observations");

    // per observation, solve for the effective walk count g (monotone in g)
    std::vector<double> xs, ys;
    for (const auto& obs : observations) {
        const SurrogateStats& st = stats_for_k(obs.epsilon_exp);
        double lo = -10.0, hi = 30.0;  // log2 g
        const double e_lo = expected_min_steps(st, std::exp2(lo));
        const double e_hi = expected_min_steps(st, std::exp2(hi));
        if (obs.nc >= e_lo) { xs.push_back(obs.log2_nb); ys.push_back(lo); continue; }
        if (obs.nc <= e_hi) { xs.push_back(obs.log2_nb); ys.push_back(hi); continue; }
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (expected_min_steps(st, std::exp2(mid)) > obs.nc) lo = mid;
            else hi = mid;
        }
        xs.push_back(obs.log2_nb);
        ys.push_back(0.5 * (lo + hi));
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-9)
        throw std::invalid_argument("calibration observations span a single N_b");

    NbBridgeCalibration cal;
    cal.gamma1 = (n * sxy - sx * sy) / det;
    cal.gamma0 = (sy - cal.gamma1 * sx) / n;
    cal.log2_nb_min = *std::min_element(xs.begin(), xs.end());
    cal.log2_nb_max = *std::max_element(xs.begin(), xs.end());

    double rss = 0.0;
    for (const auto& obs : observations) {
        const SurrogateStats& st = stats_for_k(obs.epsilon_exp);
        const double g = std::exp2(cal.gamma0 + cal.gamma1 * obs.log2_nb);
        const double e = expected_min_steps(st, g) - obs.nc;
        rss += e * e;
    }
    cal.rms_error = std::sqrt(rss / double(observations.size()));
    return cal;
}

std::vector<SurfaceCell> nb_scaling_bridge(const std::vector<SurrogateStats>& per_k_stats,
                                           const NbBridgeCalibration& calibration,
                                           std::span<const double> log2_nb_grid) {
    std::vector<SurfaceCell> cells;
    for (const auto& st : per_k_stats) {
        // surface values and batch spread
        std::vector<SurfaceCell> row;
        for (double x : log2_nb_grid) {
            const double g = std::exp2(calibration.gamma0 + calibration.gamma1 * x);
            SurfaceCell cell;
            cell.epsilon_exp = st.epsilon_exp;
            cell.log2_nb = x;
            cell.nc_mean = expected_min_steps(st, g);
            double bsum = 0.0, bsum2 = 0.0;
            int nb = 0;
            for (const auto& bs : st.batch_survival) {
                if (bs.empty()) continue;
                const double e = expected_min_steps(std::span<const double>(bs), g);
                bsum += e;
                bsum2 += e * e;
                nb += 1;
            }
            if (nb > 1) {
                const double mean = bsum / nb;
                const double sd = std::sqrt(std::max(0.0, bsum2 / nb - mean * mean));
                const double half = 1.96 * sd / std::sqrt(double(nb));
                cell.nc_ci_low = cell.nc_mean - half;
                cell.nc_ci_high = cell.nc_mean + half;
            } else {
                cell.nc_ci_low = cell.nc_ci_high = cell.nc_mean;
            }
            cell.extrapolated = x < calibration.log2_nb_min || x > calibration.log2_nb_max;
            row.push_back(cell);
        }
        // axis crossing from the pre-floor linear section of this k's curve
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (const auto& c : row)
            if (c.nc_mean > 1.2) {
                sx += c.log2_nb; sy += c.nc_mean;
                sxx += c.log2_nb * c.log2_nb; sxy += c.log2_nb * c.nc_mean;
                n += 1;
            }
        double crossing = std::numeric_limits<double>::infinity();
        if (n >= 2) {
            const double det = n * sxx - sx * sx;
            if (std::abs(det) > 1e-9) {
                const double slope = (n * sxy - sx * sy) / det;
                const double intercept = (sy - slope * sx) / n;
                if (slope < 0.0) crossing = (1.0 - intercept) / slope;
            }
        }
        for (auto& c : row) c.crossed_axis = c.log2_nb >= crossing;
        cells.insert(cells.end(), row.begin(), row.end());
    }
    return cells;
}

} // namespace billiard
