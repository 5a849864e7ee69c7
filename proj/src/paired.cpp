#include "billiard/paired.hpp"

#include <algorithm>
#include <cmath>

namespace billiard {

PairedWorld PairedWorld::make(const TableConfig& config, const PerturbationSpec& perturbation,
                              std::uint64_t seed) {
    perturbation.validate();
    const double eps = perturbation.epsilon();

    // Placement leaves enough clearance that a +-eps offset (eps <= 2^-5)
    // cannot create an overlap, but retry with a reseeded layout if the
    // perturbed copy is somehow invalid.
    for (int attempt = 0; attempt < 16; ++attempt) {
        const std::uint64_t world_seed = attempt == 0 ? seed : hash_combine(seed, attempt);
        auto states = sample_initial_states(config, world_seed);
        Rng signs(perturbation.sign_seed);
        auto twin = states;
        for (auto& b : twin) {
            b.pos.x += signs.coin() ? eps : -eps;
            b.pos.y += signs.coin() ? eps : -eps;
        }
        bool ok = true;
        const double contact = 2.0 * config.radius;
        for (std::size_t i = 0; i < twin.size() && ok; ++i)
            for (std::size_t j = i + 1; j < twin.size(); ++j) {
                Vec2 d = twin[j].pos - twin[i].pos;
                if (config.boundary == Boundary::periodic) {
                    const double L = config.side;
                    if (d.x > L / 2) d.x -= L;
                    if (d.x < -L / 2) d.x += L;
                    if (d.y > L / 2) d.y -= L;
                    if (d.y < -L / 2) d.y += L;
                }
                if (norm(d) <= contact) { ok = false; break; }
            }
        if (!ok) continue;
        return PairedWorld(World(config, std::move(states)), World(config, std::move(twin)));
    }
    throw PlacementError("could not build a non-overlapping perturbed twin");
}

PairedWorld::PairedWorld(World a, World b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.size() != b_.size()) throw std::invalid_argument("twin worlds differ in size");
    if (a_.config().boundary != b_.config().boundary)
        throw std::invalid_argument("twin worlds differ in boundary mode");
}

double PairedWorld::delta_p(int ball) const {
    Vec2 pa = a_.position_at(ball, eval_time_a_);
    Vec2 pb = b_.position_at(ball, eval_time_b_);
    Vec2 d = pb - pa;
    if (a_.config().boundary == Boundary::periodic) {
        const double L = a_.config().side;
        if (d.x > L / 2) d.x -= L;
        if (d.x < -L / 2) d.x += L;
        if (d.y > L / 2) d.y -= L;
        if (d.y < -L / 2) d.y += L;
    }
    return norm(d);
}

double PairedWorld::delta_q(int ball) const {
    return norm(a_.velocity(ball) - b_.velocity(ball));
}

double PairedWorld::mean_delta_p() const {
    double sum = 0.0;
    for (int i = 0; i < a_.size(); ++i) sum += delta_p(i);
    return sum / a_.size();
}

void PairedWorld::check_separations() {
    double worst = 0.0;
    int worst_ball = -1;
    for (int i = 0; i < a_.size(); ++i) {
        const double d = delta_p(i);
        if (d > worst) {
            worst = d;
            worst_ball = i;
        }
    }
    if (worst > kDivergencePixels) {
        status_ = PairStatus::diverged;
        cause_ = DivergenceCause::separation;
        cause_ball_ = worst_ball;
    }
}

PairedWorld::StepResult PairedWorld::step(double t_cap) {
    StepResult r;
    if (status_ != PairStatus::correlated) return r;

    auto sa = a_.advance_to_next_ball_shock(t_cap);
    auto sb = b_.advance_to_next_ball_shock(t_cap);
    if (!sa || !sb) {
        // no shock within the horizon (or only one world found one: treat as
        // a budget stop; the two worlds cannot be compared shock-by-shock)
        return r;
    }
    r.shock_happened = true;
    r.shock_a = *sa;
    r.shock_b = *sb;
    matched_shocks_ += 1;

    if (sa->i != sb->i || sa->j != sb->j) {
        status_ = PairStatus::desynchronized;
        cause_ = DivergenceCause::partner_mismatch;
        cause_ball_ = std::min(sa->i, sb->i);
        eval_time_a_ = sa->time;
        eval_time_b_ = sb->time;
        return r;
    }

    // synchronize both worlds at the later of the two shock instants; the
    // lagging world may stop just before its own next shock, in which case
    // the checkpoint straddles two instants less than one event gap apart
    const double t_sync = std::max(sa->time, sb->time);
    World& lag = sa->time < sb->time ? a_ : b_;
    const double reached = lag.advance_to(t_sync, /*stop_before_ball_shock=*/true);
    if (&lag == &a_) {
        eval_time_a_ = reached;
        eval_time_b_ = t_sync;
    } else {
        eval_time_a_ = t_sync;
        eval_time_b_ = reached;
    }
    sync_time_ = std::min(eval_time_a_, eval_time_b_);
    check_separations();
    return r;
}

double PairedWorld::nc_value(bool count_wall_shocks) const {
    const double n = static_cast<double>(a_.size());
    double shocks = 2.0 * static_cast<double>(matched_shocks_);
    if (count_wall_shocks) shocks += static_cast<double>(a_.wall_shock_total());
    return shocks / n;
}

TrialRecord PairedWorld::run_until_divergence(double max_shocks_per_ball, bool record_trace,
                                              bool count_wall_shocks,
                                              const ShockObserver& observer) {
    TrialRecord rec;
    rec.config = a_.config();
    const double tau = mean_free_time_estimate(a_.config());
    const std::uint64_t max_matched = static_cast<std::uint64_t>(
        std::ceil(max_shocks_per_ball * a_.size() / 2.0));
    // generous wall-clock cap so that non-interacting setups terminate
    const double t_final = 64.0 * (max_shocks_per_ball + 1.0) * (tau + a_.config().side);

    try {
        while (status_ == PairStatus::correlated && matched_shocks_ < max_matched) {
            StepResult r = step(t_final);
            if (!r.shock_happened) break;  // time cap: report as budget stop
            if (observer && r.shock_a && r.shock_b && status_ != PairStatus::desynchronized) {
                const ShockInfo& ia = *r.shock_a;
                const ShockInfo& ib = *r.shock_b;
                observer({ia.i, norm(ia.vi_pre - ib.vi_pre), norm(ia.vi_post - ib.vi_post)});
                observer({ia.j, norm(ia.vj_pre - ib.vj_pre), norm(ia.vj_post - ib.vj_post)});
            }
            if (record_trace) rec.delta_p_trace.push_back(mean_delta_p());
        }
    } catch (const OverlapError&) {
        rec.termination = Termination::numerical_abort;
        rec.matched_shocks = matched_shocks_;
        rec.nc = nc_value(count_wall_shocks);
        return rec;
    }

    rec.matched_shocks = matched_shocks_;
    rec.wall_shocks = a_.wall_shock_total();
    rec.nc = nc_value(count_wall_shocks);
    rec.stop_time = sync_time_;
    if (status_ == PairStatus::correlated) {
        rec.termination = Termination::max_shocks_reached;
    } else {
        rec.termination = Termination::diverged;
        rec.cause = cause_;
        rec.divergence_ball = cause_ball_;
        if (cause_ball_ >= 0) rec.divergence_ball_own_shocks = a_.shocks_of(cause_ball_);
    }
    return rec;
}

} // namespace billiard
