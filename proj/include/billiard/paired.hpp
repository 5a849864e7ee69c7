#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "billiard/world.hpp"

namespace billiard {

// epsilon_p = 2^-epsilon_exp pixels; one sign draw per ball per axis.
struct PerturbationSpec {
    int epsilon_exp = 35;        // paper sweeps 5..45 in steps of 5
    std::uint64_t sign_seed = 0;

    double epsilon() const { return std::ldexp(1.0, -epsilon_exp); }

    void validate() const {
        if (epsilon_exp < 5 || epsilon_exp > 52)
            throw std::invalid_argument("epsilon exponent must lie in [5, 52]");
    }
};

enum class PairStatus { correlated, diverged, desynchronized };
enum class Termination { diverged, max_shocks_reached, numerical_abort };
enum class DivergenceCause { none, separation, partner_mismatch };

struct TrialRecord {
    std::uint64_t seed = 0;
    TableConfig config;
    PerturbationSpec perturbation;
    Termination termination = Termination::max_shocks_reached;
    DivergenceCause cause = DivergenceCause::none;
    double nc = 0.0;                 // mean ball-ball shocks per ball at the stop event
    int divergence_ball = -1;
    std::uint64_t divergence_ball_own_shocks = 0;
    std::uint64_t matched_shocks = 0;
    std::uint64_t wall_shocks = 0;   // world A tally
    double stop_time = 0.0;
    std::vector<double> delta_p_trace;  // mean pair separation per matched shock (optional)
};

// Velocity-difference pair of one twin ball across one shock, for Eq-(12)
// style dispersion statistics. in/out are |v_A - v_B| just before / after.
struct ShockDispersionRecord {
    int ball = -1;
    double in_diff = 0.0;
    double out_diff = 0.0;
};

// Two copies of the same billiard, world B offset by +-eps per ball per axis,
// evolved in matched-shock lockstep.
class PairedWorld {
public:
    static PairedWorld make(const TableConfig& config, const PerturbationSpec& perturbation,
                            std::uint64_t seed);

    // explicit twin construction (tests, engineered setups)
    PairedWorld(World a, World b);

    const World& world_a() const { return a_; }
    const World& world_b() const { return b_; }
    PairStatus status() const { return status_; }
    DivergenceCause cause() const { return cause_; }
    int cause_ball() const { return cause_ball_; }
    std::uint64_t matched_shocks() const { return matched_shocks_; }
    double sync_time() const { return sync_time_; }

    // Euclidean separation of the two copies of one ball at the last
    // checkpoint time (minimum-image in periodic mode).
    double delta_p(int ball) const;

    // |v_A - v_B| for one ball; velocities are piecewise constant, so this is
    // the value "immediately after" the last resolved shock.
    double delta_q(int ball) const;

    double mean_delta_p() const;

    struct StepResult {
        bool shock_happened = false;          // false: time cap hit first
        std::optional<ShockInfo> shock_a;     // filled when shock_happened
        std::optional<ShockInfo> shock_b;
    };

    // Advances both worlds to their next ball-ball shock, compares partners,
    // and checks all pair separations at the synchronized checkpoint.
    StepResult step(double t_cap);

    // mean shocks per ball given the matched-shock count (and, optionally,
    // wall shocks when they are configured to count)
    double nc_value(bool count_wall_shocks) const;

    using ShockObserver = std::function<void(const ShockDispersionRecord&)>;

    TrialRecord run_until_divergence(double max_shocks_per_ball, bool record_trace = false,
                                     bool count_wall_shocks = false,
                                     const ShockObserver& observer = nullptr);

private:
    void check_separations();

    World a_;
    World b_;
    PairStatus status_ = PairStatus::correlated;
    DivergenceCause cause_ = DivergenceCause::none;
    int cause_ball_ = -1;
    std::uint64_t matched_shocks_ = 0;
    double sync_time_ = 0.0;
    double eval_time_a_ = 0.0;  // per-world evaluation instants for the last checkpoint;
    double eval_time_b_ = 0.0;  // equal except in the near-desync early-stop corner
};

// Divergence threshold: the paper stops once a pair separation exceeds 1 pixel.
inline constexpr double kDivergencePixels = 1.0;

} // namespace billiard
