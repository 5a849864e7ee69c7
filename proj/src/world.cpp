#include "billiard/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace billiard {

namespace {
// Extra clearance used at initialization so that +-eps twin offsets
// (at most 2^-5 * sqrt(2) per ball) can never create an overlapping twin.
constexpr double kPlacementGap = 0.125;
constexpr double kInfinity = std::numeric_limits<double>::infinity();
} // namespace

std::vector<BallState> sample_initial_states(const TableConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(seed);
    const double L = config.side;
    const double R = config.radius;
    const bool walls = config.boundary == Boundary::walls;
    const double lo = walls ? R + kPlacementGap : 0.0;
    const double hi = walls ? L - R - kPlacementGap : L;
    const double min_gap = 2.0 * R + kPlacementGap;

    std::vector<BallState> out;
    out.reserve(config.n_balls);
    const long max_draws = 200000L + 2000L * config.n_balls;
    long draws = 0;
    while (static_cast<int>(out.size()) < config.n_balls) {
        if (++draws > max_draws)
            throw PlacementError("rejection sampling failed to place all disks");
        Vec2 p{rng.uniform(lo, hi), rng.uniform(lo, hi)};
        bool ok = true;
        for (const auto& b : out) {
            Vec2 d = p - b.pos;
            if (!walls) {
                if (d.x > L / 2) d.x -= L;
                if (d.x < -L / 2) d.x += L;
                if (d.y > L / 2) d.y -= L;
                if (d.y < -L / 2) d.y += L;
            }
            if (norm2(d) < min_gap * min_gap) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        BallState b;
        b.id = static_cast<int>(out.size());
        b.pos = p;
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        b.vel = {std::cos(theta), std::sin(theta)};
        out.push_back(b);
    }
    return out;
}

double mean_free_time_estimate(const TableConfig& config) {
    // per-ball shock rate ~ n * 4R * <|v_rel|>, unit speeds: <|v_rel|> = 4/pi
    const double density = (config.n_balls - 1) / (config.side * config.side);
    const double rate = density * 4.0 * config.radius * (4.0 / std::numbers::pi);
    return 1.0 / std::max(rate, 1e-300);
}

World::World(const TableConfig& config, std::uint64_t seed) : config_(config) {
    init_from_states(sample_initial_states(config, seed));
}

World::World(const TableConfig& config, std::vector<BallState> balls) : config_(config) {
    config_.validate();
    if (static_cast<int>(balls.size()) != config_.n_balls)
        throw std::invalid_argument("state count does not match config.n_balls");
    init_from_states(std::move(balls));
}

void World::init_from_states(std::vector<BallState> states) {
    balls_.resize(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (!finite(states[i].pos) || !finite(states[i].vel))
            throw std::invalid_argument("non-finite initial state");
        balls_[i].pos = states[i].pos;
        balls_[i].vel = states[i].vel;
        balls_[i].t0 = 0.0;
        balls_[i].shocks = states[i].shocks;
        balls_[i].wall_shocks = states[i].wall_shocks;
    }
    slots_.assign(balls_.size(), Slot{});
    seed_all_predictions();
}

Vec2 World::pair_delta(Vec2 from, Vec2 to) const {
    Vec2 d = to - from;
    if (config_.boundary == Boundary::periodic) {
        const double L = config_.side;
        if (d.x > L / 2) d.x -= L;
        if (d.x < -L / 2) d.x += L;
        if (d.y > L / 2) d.y -= L;
        if (d.y < -L / 2) d.y += L;
    }
    return d;
}

Vec2 World::position_at(int i, double t) const {
    const Ball& b = balls_[i];
    return b.pos + b.vel * (t - b.t0);
}

BallState World::ball(int i) const {
    const Ball& b = balls_[i];
    BallState s;
    s.id = i;
    s.pos = position_at(i, time_);
    s.vel = b.vel;
    s.shocks = b.shocks;
    s.wall_shocks = b.wall_shocks;
    return s;
}

std::vector<BallState> World::snapshot() const {
    std::vector<BallState> out;
    out.reserve(balls_.size());
    for (int i = 0; i < size(); ++i) out.push_back(ball(i));
    return out;
}

double World::kinetic_energy() const {
    double e = 0.0;
    for (const auto& b : balls_) e += norm2(b.vel);
    return e;
}

Vec2 World::momentum() const {
    Vec2 p;
    for (const auto& b : balls_) p += b.vel;
    return p;
}

void World::negate_velocities() {
    for (auto& b : balls_) {
        b.pos = b.pos + b.vel * (time_ - b.t0);
        b.t0 = time_;
        b.vel = -b.vel;
    }
    seed_all_predictions();
}

double World::min_pair_distance() const {
    double best = kInfinity;
    for (int i = 0; i < size(); ++i)
        for (int j = i + 1; j < size(); ++j) {
            Vec2 d = pair_delta(position_at(i, time_), position_at(j, time_));
            best = std::min(best, norm(d));
        }
    return best;
}

std::optional<double> World::pair_time(int i, int j) const {
    const Ball& a = balls_[i];
    const Ball& b = balls_[j];
    const double t_ref = std::max(a.t0, b.t0);
    const Vec2 pa = a.pos + a.vel * (t_ref - a.t0);
    const Vec2 pb = b.pos + b.vel * (t_ref - b.t0);
    const Vec2 dv = b.vel - a.vel;

    if (config_.boundary == Boundary::walls) {
        auto dt = time_to_contact(pb - pa, dv, config_.radius);
        if (!dt) return std::nullopt;
        return t_ref + *dt;
    }
    // Periodic: both centers lie in [0,L] until their next wrap event, so the
    // nine adjacent images are the only contact candidates before the slot is
    // rebuilt anyway. An image separation below 2R is a genuine overlap (with
    // R <= L/4 only the minimum image can get that close).
    const double L = config_.side;
    std::optional<double> best;
    for (int sx = -1; sx <= 1; ++sx)
        for (int sy = -1; sy <= 1; ++sy) {
            Vec2 dx = pb - pa + Vec2{sx * L, sy * L};
            auto dt = time_to_contact(dx, dv, config_.radius);
            if (dt && (!best || t_ref + *dt < *best)) best = t_ref + *dt;
        }
    return best;
}

World::Slot World::boundary_slot(int i) const {
    const Ball& b = balls_[i];
    Slot s;
    if (config_.boundary == Boundary::walls) {
        BallState tmp;
        tmp.pos = b.pos;
        tmp.vel = b.vel;
        auto hit = time_to_wall_collision(tmp, config_);
        if (hit) {
            s.t = b.t0 + hit->t;
            s.kind = EventKind::ball_wall;
            s.other = hit->wall;
        }
        return s;
    }
    const double L = config_.side;
    double best_t = kInfinity;
    int axis = -1;
    auto consider = [&](double pos, double vel, int ax) {
        if (vel > 0.0) {
            double t = (L - pos) / vel;
            if (t < best_t) { best_t = t; axis = ax; }
        } else if (vel < 0.0) {
            double t = pos / -vel;
            if (t < best_t) { best_t = t; axis = ax; }
        }
    };
    consider(b.pos.x, b.vel.x, 0);
    consider(b.pos.y, b.vel.y, 1);
    if (axis >= 0) {
        s.t = b.t0 + std::max(best_t, 0.0);
        s.kind = EventKind::boundary_wrap;
        s.other = axis;
    }
    return s;
}

void World::predict(int i) {
    Slot s = boundary_slot(i);
    for (int j = 0; j < size(); ++j) {
        if (j == i) continue;
        auto t = pair_time(std::min(i, j), std::max(i, j));
        if (!t) continue;
        // ball-ball wins exact ties against boundary events (tie order by kind)
        if (*t < s.t || (*t == s.t && s.kind != EventKind::ball_ball)) {
            s = Slot{*t, EventKind::ball_ball, j};
        }
        // also improve the partner's slot when this contact precedes it
        if (*t < slots_[j].t) slots_[j] = Slot{*t, EventKind::ball_ball, i};
    }
    slots_[i] = s;
}

void World::seed_all_predictions() {
    for (int i = 0; i < size(); ++i) slots_[i] = boundary_slot(i);
    for (int i = 0; i < size(); ++i)
        for (int j = i + 1; j < size(); ++j) {
            auto t = pair_time(i, j);
            if (!t) continue;
            if (*t < slots_[i].t) slots_[i] = Slot{*t, EventKind::ball_ball, j};
            if (*t < slots_[j].t) slots_[j] = Slot{*t, EventKind::ball_ball, i};
        }
}

bool World::slot_less(int i, int j) const {
    const Slot& a = slots_[i];
    const Slot& b = slots_[j];
    if (a.t != b.t) return a.t < b.t;
    // deterministic tie order: kind first, then lowest ball index
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    return i < j;
}

int World::scan_next() const {
    int best = 0;
    for (int i = 1; i < size(); ++i)
        if (slot_less(i, best)) best = i;
    return best;
}

double World::next_event_time() const {
    const int i = scan_next();
    return slots_[i].kind == EventKind::none ? kInfinity : slots_[i].t;
}

void World::commit(int i, double t) {
    Ball& b = balls_[i];
    b.pos = b.pos + b.vel * (t - b.t0);
    b.t0 = t;
}

void World::reseed_after(const std::vector<int>& changed) {
    auto touches = [&](int other) {
        for (int c : changed)
            if (other == c) return true;
        return false;
    };
    for (int m = 0; m < size(); ++m) {
        if (slots_[m].kind == EventKind::ball_ball && touches(slots_[m].other)) predict(m);
    }
    for (int c : changed) predict(c);
}

std::optional<ShockInfo> World::process_next() {
    const int owner = scan_next();
    const Slot s = slots_[owner];
    if (s.kind == EventKind::none)
        throw std::logic_error("no scheduled events (empty world?)");
    const double t = s.t;

    if (s.kind == EventKind::ball_wall) {
        commit(owner, t);
        Ball& b = balls_[owner];
        if (s.other <= 1) b.vel.x = -b.vel.x;
        else b.vel.y = -b.vel.y;
        b.wall_shocks += 1;
        wall_shock_total_ += 1;
        time_ = t;
        reseed_after({owner});
        return std::nullopt;
    }

    if (s.kind == EventKind::boundary_wrap) {
        commit(owner, t);
        Ball& b = balls_[owner];
        double& c = s.other == 0 ? b.pos.x : b.pos.y;
        const double v = s.other == 0 ? b.vel.x : b.vel.y;
        c = v > 0.0 ? 0.0 : config_.side;
        time_ = t;
        reseed_after({owner});
        return std::nullopt;
    }

    // ball-ball
    const int i = std::min(owner, s.other);
    const int j = std::max(owner, s.other);
    commit(i, t);
    commit(j, t);
    Ball& a = balls_[i];
    Ball& b = balls_[j];
    const Vec2 d = pair_delta(a.pos, b.pos);
    const double dist = norm(d);
    if (dist < 2.0 * config_.radius - kOverlapTol)
        throw OverlapError("overlap detected at collision event");
    time_ = t;
    const double rel = dot(b.vel - a.vel, d) / dist;
    if (rel >= 0.0) {
        // roundoff produced a non-approaching contact; skip, never re-collide
        reseed_after({i, j});
        return std::nullopt;
    }
    ShockInfo info;
    info.i = i;
    info.j = j;
    info.time = t;
    info.vi_pre = a.vel;
    info.vj_pre = b.vel;
    const Vec2 n = d * (1.0 / dist);
    const Vec2 impulse = n * rel;
    a.vel += impulse;
    b.vel -= impulse;
    a.shocks += 1;
    b.shocks += 1;
    ball_shock_total_ += 1;
    info.vi_post = a.vel;
    info.vj_post = b.vel;
    reseed_after({i, j});
    return info;
}

void World::advance(double duration) {
    if (duration < 0.0) throw std::invalid_argument("advance: negative duration");
    const double t_end = time_ + duration;
    while (next_event_time() <= t_end) process_next();
    for (int i = 0; i < size(); ++i) commit(i, t_end);
    time_ = t_end;
}

std::optional<ShockInfo> World::advance_to_next_ball_shock(double t_cap) {
    if (t_cap <= time_) return std::nullopt;
    while (true) {
        const double t = next_event_time();
        if (t > t_cap) {
            advance(t_cap - time_);
            return std::nullopt;
        }
        if (auto shock = process_next()) return shock;
    }
}

double World::advance_to(double t_target, bool stop_before_ball_shock) {
    if (t_target <= time_) return time_;
    while (true) {
        const int owner = scan_next();
        const Slot& s = slots_[owner];
        if (s.kind == EventKind::none || s.t > t_target) {
            time_ = t_target;
            return time_;
        }
        if (stop_before_ball_shock && s.kind == EventKind::ball_ball) {
            time_ = s.t;
            return time_;
        }
        process_next();
    }
}

} // namespace billiard
