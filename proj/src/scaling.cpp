#include "billiard/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace billiard {

namespace {

// Solve the symmetric 3x3 system M x = r by Gaussian elimination with partial
// pivoting; also returns the inverse for the covariance. Throws on (near)
// singularity.
struct Solved {
    double x[3];
    double inv[3][3];
};

Solved solve3(double m[3][3], const double r[3]) {
    double aug[3][6] = {};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) aug[i][j] = m[i][j];
        aug[i][3 + i] = 1.0;
    }
    double scale = 0.0;
    for (int i = 0; i < 3; ++i) scale = std::max(scale, std::abs(m[i][i]));
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(aug[row][col]) > std::abs(aug[pivot][col])) pivot = row;
        if (std::abs(aug[pivot][col]) < 1e-12 * std::max(scale, 1.0))
            throw RankDeficientError("design matrix is singular");
        if (pivot != col)
            for (int j = 0; j < 6; ++j) std::swap(aug[pivot][j], aug[col][j]);
        const double d = aug[col][col];
        for (int j = 0; j < 6; ++j) aug[col][j] /= d;
        for (int row = 0; row < 3; ++row) {
            if (row == col) continue;
            const double f = aug[row][col];
            for (int j = 0; j < 6; ++j) aug[row][j] -= f * aug[col][j];
        }
    }
    Solved s;
    for (int i = 0; i < 3; ++i) {
        s.x[i] = 0.0;
        for (int j = 0; j < 3; ++j) {
            s.inv[i][j] = aug[i][3 + j];
            s.x[i] += s.inv[i][j] * r[j];
        }
    }
    return s;
}

} // namespace

ScalingFit fit_scaling(std::span<const ScalingPoint> points) {
    if (points.size() < 6)
        throw std::invalid_argument("fit_scaling needs at least 6 points");
    std::set<double> ks, nbs;
    for (const auto& p : points) {
        ks.insert(p.k);
        nbs.insert(p.log2_nb);
        if (!(p.weight > 0.0)) throw std::invalid_argument("weights must be positive");
    }
    if (ks.size() < 2 || nbs.size() < 2)
        throw RankDeficientError("points must span at least 2 distinct k and N_b values");

    // normal equations X^T W X beta = X^T W y with rows (1, k, log2_nb)
    double m[3][3] = {};
    double r[3] = {};
    for (const auto& p : points) {
        const double row[3] = {1.0, p.k, p.log2_nb};
        for (int i = 0; i < 3; ++i) {
            r[i] += p.weight * row[i] * p.nc;
            for (int j = 0; j < 3; ++j) m[i][j] += p.weight * row[i] * row[j];
        }
    }
    Solved s = solve3(m, r);

    ScalingFit fit;
    fit.a = s.x[0];
    fit.b = s.x[1];
    fit.c = s.x[2];
    fit.n_points = static_cast<int>(points.size());
    fit.k_min = *ks.begin();
    fit.k_max = *ks.rbegin();
    fit.log2_nb_min = *nbs.begin();
    fit.log2_nb_max = *nbs.rbegin();

    double wrss = 0.0, wsum = 0.0, rss = 0.0;
    for (const auto& p : points) {
        const double e = p.nc - fit.predict(p.k, p.log2_nb);
        wrss += p.weight * e * e;
        wsum += p.weight;
        rss += e * e;
    }
    fit.residual_rms = std::sqrt(rss / points.size());
    // dispersion estimate sigma^2 = weighted RSS / (n - 3); covariance
    // (X^T W X)^{-1} sigma^2 (weights treated as relative)
    const double dof = std::max<double>(1.0, static_cast<double>(points.size()) - 3.0);
    const double sigma2 = wrss / dof;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) fit.cov[i][j] = s.inv[i][j] * sigma2;
    fit.se_a = std::sqrt(std::max(0.0, fit.cov[0][0]));
    fit.se_b = std::sqrt(std::max(0.0, fit.cov[1][1]));
    fit.se_c = std::sqrt(std::max(0.0, fit.cov[2][2]));
    return fit;
}

std::optional<AxisCrossing> axis_crossing(const ScalingFit& fit, double k) {
    if (fit.c >= 0.0) return std::nullopt;
    AxisCrossing out;
    out.log2_nb = (1.0 - fit.a - fit.b * k) / fit.c;
    // delta method: x = (1 - a - b k)/c, gradient wrt (a, b, c)
    const double g[3] = {-1.0 / fit.c, -k / fit.c, -out.log2_nb / fit.c};
    double var = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) var += g[i] * fit.cov[i][j] * g[j];
    out.stderr_log2_nb = std::sqrt(std::max(0.0, var));
    out.extrapolated = !fit.in_domain(k, out.log2_nb);
    return out;
}

double precision_tradeoff(const ScalingFit& fit) {
    if (!(fit.b > 0.0) || !(fit.c < 0.0))
        throw std::domain_error("precision_tradeoff needs B > 0 and C < 0");
    return std::exp2(fit.b / -fit.c);
}

} // namespace billiard
