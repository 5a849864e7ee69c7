#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>

namespace billiard {

struct ScalingFit;  // scaling.hpp

// Phase-cell bookkeeping for one object: current and maximal uncertainties in
// position and momentum, plus the configurable phase-cell area standing in
// for eps_p * eps_q (a free positive parameter, not Planck's constant).
struct InfoBudget {
    double dp_max = 4096.0;
    double dq_max = 1.0;
    double dp = 1.0;
    double dq = 1.0;
    double h_quantum = 1.0;

    void validate() const {
        if (!(dp > 0.0 && dp <= dp_max)) throw std::invalid_argument("need 0 < dp <= dp_max");
        if (!(dq > 0.0 && dq <= dq_max)) throw std::invalid_argument("need 0 < dq <= dq_max");
        if (!(h_quantum > 0.0)) throw std::invalid_argument("h_quantum must be positive");
    }
};

// bits pinned down about the phase cell: log2(dp_max dq_max / dp dq)
double info_det(const InfoBudget& budget);

// residual bits below the current cell: log2(dp dq / h)
double info_ind(const InfoBudget& budget);

// full-capacity identity value log2(dp_max dq_max / h) = info_det + info_ind
double info_total(const InfoBudget& budget);

// S = -N_b k ln(2) I_det (entropy is minus information, equiprobable case)
double entropy_from_info(double i_det, int n_balls, double k_boltzmann = 1.0);

// Sum over balls of log2(dp_max / dp_i); dp_i outside (0, dp_max] is a domain error.
double billiard_information(std::span<const double> delta_p, double dp_max);

// N_b * log2(dp_max / eps_p) = N_b * P_i, the value at initialization
double max_billiard_information(int n_balls, double dp_max, double eps_p);

// Initial-condition / calculation / additional precision, in whole bits.
struct PrecisionBudget {
    std::int64_t p_i = 40;
    std::int64_t p_c = 10;

    std::int64_t p_a() const { return p_i - p_c; }

    void validate() const {
        if (p_i <= 0 || p_c <= 0 || p_a() <= 0)
            throw std::invalid_argument("precisions must be positive with p_i > p_c");
        if (p_i >= 64) throw std::invalid_argument("p_a + p_c must stay below 64 bits");
    }
};

// Valid information budget of the whole billiard at adimensional time N:
//   N_b * N * (P_a (1 - N/N_c) + P_c),  0 < N <= N_c.
// At N = N_c this leaves the residual N_b * N_c * P_c.
double linear_loss_model(double n, double n_c, const PrecisionBudget& precision, int n_balls);

// Valid bits per coordinate at time N: P_a (1 - N/N_c) + P_c. Strictly
// decreasing from P_i to P_c; this is the linear per-shock loss itself.
double valid_precision_per_coordinate(double n, double n_c, const PrecisionBudget& precision);

enum class DemonVerdict { paradox, borderline, no_paradox };

const char* to_string(DemonVerdict v);

// Exact integer comparison of trajectory bits N_c * P_c against the 2 * P_i
// bits of initial conditions (positions and velocities per coordinate).
DemonVerdict demon_condition(std::int64_t p_i, std::int64_t p_c, std::int64_t n_c);

// Smallest N_b at which the paradox holds, using a fitted scaling law
// N_c = A + B P_a + C log2(N_b). nullopt when the line never crosses the
// threshold for any N_b <= 2^64.
struct DemonFrontier {
    double log2_nb = 0.0;
    std::uint64_t n_b = 0;  // smallest integer ball count past the frontier
};
std::optional<DemonFrontier> demon_frontier(std::int64_t p_i, std::int64_t p_c,
                                            const ScalingFit& fit);

} // namespace billiard
