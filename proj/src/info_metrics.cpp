#include "billiard/info_metrics.hpp"

#include <cmath>
#include <numbers>

#include "billiard/scaling.hpp"

namespace billiard {

double info_det(const InfoBudget& budget) {
    budget.validate();
    return std::log2((budget.dp_max * budget.dq_max) / (budget.dp * budget.dq));
}

double info_ind(const InfoBudget& budget) {
    budget.validate();
    return std::log2(budget.dp * budget.dq / budget.h_quantum);
}

double info_total(const InfoBudget& budget) {
    budget.validate();
    return std::log2(budget.dp_max * budget.dq_max / budget.h_quantum);
}

double entropy_from_info(double i_det, int n_balls, double k_boltzmann) {
    return -static_cast<double>(n_balls) * k_boltzmann * std::numbers::ln2 * i_det;
}

double billiard_information(std::span<const double> delta_p, double dp_max) {
    if (!(dp_max > 0.0)) throw std::invalid_argument("dp_max must be positive");
    double bits = 0.0;
    for (double dp : delta_p) {
        if (!(dp > 0.0) || dp > dp_max)
            throw std::domain_error("pair separation outside (0, dp_max]");
        bits += std::log2(dp_max / dp);
    }
    return bits;
}

double max_billiard_information(int n_balls, double dp_max, double eps_p) {
    if (!(eps_p > 0.0) || eps_p > dp_max)
        throw std::domain_error("eps_p outside (0, dp_max]");
    return n_balls * std::log2(dp_max / eps_p);
}

double valid_precision_per_coordinate(double n, double n_c, const PrecisionBudget& precision) {
    precision.validate();
    if (!(n > 0.0) || n > n_c) throw std::domain_error("time must lie in (0, n_c]");
    return precision.p_a() * (1.0 - n / n_c) + precision.p_c;
}

double linear_loss_model(double n, double n_c, const PrecisionBudget& precision, int n_balls) {
    return n_balls * n * valid_precision_per_coordinate(n, n_c, precision);
}

const char* to_string(DemonVerdict v) {
    switch (v) {
        case DemonVerdict::paradox: return "paradox";
        case DemonVerdict::borderline: return "borderline";
        default: return "no_paradox";
    }
}

DemonVerdict demon_condition(std::int64_t p_i, std::int64_t p_c, std::int64_t n_c) {
    if (p_i <= 0 || p_c <= 0 || n_c <= 0)
        throw std::invalid_argument("demon_condition needs positive integer inputs");
    const std::int64_t trajectory_bits = n_c * p_c;  // per coordinate
    const std::int64_t initial_bits = 2 * p_i;       // position and velocity
    if (trajectory_bits < initial_bits) return DemonVerdict::paradox;
    if (trajectory_bits == initial_bits) return DemonVerdict::borderline;
    return DemonVerdict::no_paradox;
}

std::optional<DemonFrontier> demon_frontier(std::int64_t p_i, std::int64_t p_c,
                                            const ScalingFit& fit) {
    PrecisionBudget pb{p_i, p_c};
    pb.validate();
    const double threshold = 2.0 * static_cast<double>(p_i) / static_cast<double>(p_c);
    const double level = fit.a + fit.b * static_cast<double>(pb.p_a());
    if (fit.c >= 0.0) {
        // flat or rising line: either always past the frontier or never
        if (level < threshold) return DemonFrontier{0.0, 1};
        return std::nullopt;
    }
    const double x = (threshold - level) / fit.c;  // level + c*x = threshold
    if (x <= 0.0) return DemonFrontier{0.0, 1};
    if (x > 64.0) return std::nullopt;
    DemonFrontier f;
    f.log2_nb = x;
    f.n_b = static_cast<std::uint64_t>(std::ceil(std::exp2(x)));
    // exp2 roundoff: make sure the returned count is really past the frontier
    while (fit.a + fit.b * pb.p_a() + fit.c * std::log2(static_cast<double>(f.n_b)) >= threshold)
        f.n_b += 1;
    return f;
}

} // namespace billiard
