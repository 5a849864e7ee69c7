#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "billiard/collide.hpp"
#include "billiard/rng.hpp"
#include "billiard/table.hpp"

namespace billiard {

struct PlacementError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One resolved ball-ball shock, with the velocities on both sides of it.
struct ShockInfo {
    int i = -1, j = -1;  // i < j
    double time = 0.0;
    Vec2 vi_pre, vj_pre;
    Vec2 vi_post, vj_post;
};

// Event-driven dynamics of N identical elastic disks in a square table.
//
// Positions are stored per ball at the time of its last event and evaluated
// analytically along the free-flight segment; this keeps roundoff per segment
// at a single fused multiply-add instead of accumulating per-event updates.
// Scheduling uses one best-event slot per ball (earliest event involving it)
// with re-prediction of every ball whose slot referenced a changed ball.
class World {
public:
    // Rejection-sampled non-overlapping positions, unit-speed random directions.
    World(const TableConfig& config, std::uint64_t seed);

    // Explicit initial states (twin construction, engineered test setups).
    World(const TableConfig& config, std::vector<BallState> balls);

    const TableConfig& config() const { return config_; }
    double time() const { return time_; }
    int size() const { return static_cast<int>(balls_.size()); }

    // Ball state with the position evaluated at the current world time.
    BallState ball(int i) const;
    std::vector<BallState> snapshot() const;

    Vec2 position_at(int i, double t) const;       // valid for t in [segment start, time()]
    Vec2 velocity(int i) const { return balls_[i].vel; }

    std::uint64_t ball_shock_total() const { return ball_shock_total_; }
    std::uint64_t wall_shock_total() const { return wall_shock_total_; }
    std::uint64_t shocks_of(int i) const { return balls_[i].shocks; }

    double kinetic_energy() const;  // sum |v|^2 (unit masses)
    Vec2 momentum() const;

    // Processes every event with time <= time() + duration, then moves the
    // clock to exactly that instant. Throws OverlapError on numerical failure.
    void advance(double duration);

    // Runs the event loop until the next ball-ball shock is resolved; returns
    // nullopt (world advanced to t_cap) when none occurs by then.
    std::optional<ShockInfo> advance_to_next_ball_shock(double t_cap);

    // Advances to t_target, optionally stopping just before a ball-ball shock
    // (positions then sit at the shock instant, pre-resolution). Returns the
    // time actually reached.
    double advance_to(double t_target, bool stop_before_ball_shock);

    void negate_velocities();  // time-reversal experiments

    // Smallest center distance over all pairs (min-image in periodic mode).
    double min_pair_distance() const;

private:
    enum class EventKind : int { ball_ball = 0, ball_wall = 1, boundary_wrap = 2, none = 3 };

    struct Slot {
        double t = std::numeric_limits<double>::infinity();
        EventKind kind = EventKind::none;
        int other = -1;  // partner ball | wall id | axis
    };

    struct Ball {
        Vec2 pos;   // at segment start t0
        Vec2 vel;
        double t0 = 0.0;
        std::uint64_t shocks = 0;
        std::uint64_t wall_shocks = 0;
    };

    void init_from_states(std::vector<BallState> balls);
    void seed_all_predictions();
    void predict(int i);                       // rebuild slot i, push improvements to partners
    std::optional<double> pair_time(int i, int j) const;  // absolute contact time
    Slot boundary_slot(int i) const;           // earliest wall/wrap event for i
    int scan_next() const;                     // ball index owning the earliest slot
    bool slot_less(int i, int j) const;
    void commit(int i, double t);
    // Processes the earliest event; returns the shock when it was a ball-ball one.
    std::optional<ShockInfo> process_next();
    double next_event_time() const;
    void reseed_after(const std::vector<int>& changed);
    Vec2 pair_delta(Vec2 from, Vec2 to) const;  // to - from, min-image in periodic mode

    TableConfig config_;
    std::vector<Ball> balls_;
    std::vector<Slot> slots_;
    double time_ = 0.0;
    std::uint64_t ball_shock_total_ = 0;
    std::uint64_t wall_shock_total_ = 0;
};

// Uniform rejection sampling of non-overlapping disk centers plus unit-speed
// random directions. Exposed for reuse by the paired constructor and tests.
std::vector<BallState> sample_initial_states(const TableConfig& config, std::uint64_t seed);

// Kinetic-theory estimate of the mean time between ball-ball shocks per ball;
// used only to size horizons and budgets.
double mean_free_time_estimate(const TableConfig& config);

} // namespace billiard
