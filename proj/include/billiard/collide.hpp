#pragma once

#include <optional>
#include <stdexcept>

#include "billiard/table.hpp"
#include "billiard/vec2.hpp"

namespace billiard {

// |separation - 2R| window inside which a pair counts as touching
inline constexpr double kContactTol = 1e-9;
// centers closer than 2R - kOverlapTol is a numerical failure
inline constexpr double kOverlapTol = 1e-6;

struct OverlapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Earliest t >= 0 with |dx + t*dv| = 2R, or nullopt when the pair is not
// approaching or the approach misses. dx = pos_b - pos_a, dv = vel_b - vel_a.
// Throws OverlapError when the pair already overlaps beyond tolerance.
inline std::optional<double> time_to_contact(Vec2 dx, Vec2 dv, double radius) {
    const double contact2 = 4.0 * radius * radius;
    const double c = norm2(dx) - contact2;
    if (c < -2.0 * kOverlapTol * 2.0 * radius) // (2R-tol)^2 ~= 4R^2 - 2*tol*2R
        throw OverlapError("disk overlap beyond tolerance");
    const double b = dot(dx, dv);
    if (b >= 0.0) return std::nullopt; // not approaching; never re-collide at contact
    const double a = norm2(dv);
    const double disc = b * b - a * c;
    if (disc < 0.0) return std::nullopt; // grazing miss
    // smallest root, in the cancellation-free form (b < 0 here)
    const double t = c / (-b + std::sqrt(disc));
    return t > 0.0 ? t : 0.0;
}

inline std::optional<double> time_to_ball_collision(const BallState& a, const BallState& b,
                                                    double radius) {
    return time_to_contact(b.pos - a.pos, b.vel - a.vel, radius);
}

// walls: 0 = left (x=R), 1 = right (x=L-R), 2 = bottom (y=R), 3 = top (y=L-R)
struct WallHit {
    double t;
    int wall;
};

inline std::optional<WallHit> time_to_wall_collision(const BallState& a,
                                                     const TableConfig& table) {
    const double lo = table.radius;
    const double hi = table.side - table.radius;
    std::optional<WallHit> best;
    auto consider = [&](double t, int wall) {
        if (t < 0.0) t = 0.0;
        if (!best || t < best->t) best = WallHit{t, wall};
    };
    if (a.vel.x < 0.0) consider((a.pos.x - lo) / -a.vel.x, 0);
    if (a.vel.x > 0.0) consider((hi - a.pos.x) / a.vel.x, 1);
    if (a.vel.y < 0.0) consider((a.pos.y - lo) / -a.vel.y, 2);
    if (a.vel.y > 0.0) consider((hi - a.pos.y) / a.vel.y, 3);
    return best;
}

// Specular reflection off a wall. Position is assumed at contact.
inline void resolve_wall_collision(BallState& a, int wall) {
    if (wall <= 1) a.vel.x = -a.vel.x;
    else a.vel.y = -a.vel.y;
    a.wall_shocks += 1;
}

// Periodic boundary crossing: shift one coordinate by +-L, velocity unchanged.
inline void wrap(BallState& a, int axis, double side) {
    double& c = axis == 0 ? a.pos.x : a.pos.y;
    double v = axis == 0 ? a.vel.x : a.vel.y;
    c = v > 0.0 ? 0.0 : side;
}

// Equal-mass elastic exchange: swap the normal velocity components along the
// center line, keep tangential ones. `n` must be the unit vector from a to b.
// Both shock counters increment. Throws when the pair is separating.
inline void resolve_ball_collision(BallState& a, BallState& b, Vec2 n) {
    const double rel = dot(b.vel - a.vel, n);
    if (rel >= 0.0) throw std::invalid_argument("resolve_ball_collision: pair not approaching");
    const Vec2 impulse = n * rel;
    a.vel += impulse;
    b.vel -= impulse;
    a.shocks += 1;
    b.shocks += 1;
}

inline void resolve_ball_collision(BallState& a, BallState& b) {
    Vec2 d = b.pos - a.pos;
    const double dist = norm(d);
    if (dist <= 0.0) throw std::invalid_argument("resolve_ball_collision: coincident centers");
    resolve_ball_collision(a, b, d * (1.0 / dist));
}

} // namespace billiard
