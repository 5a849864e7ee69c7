#include "doctest.h"

#include <cmath>

#include "billiard/collide.hpp"
#include "billiard/world.hpp"
#include "support/fixed_step_oracle.hpp"

using namespace billiard;

namespace {

BallState make_ball(int id, Vec2 pos, Vec2 vel) {
    BallState b;
    b.id = id;
    b.pos = pos;
    b.vel = vel;
    return b;
}

} // namespace

TEST_CASE("ball-ball time of impact, head-on") {
    BallState a = make_ball(0, {0, 0}, {1, 0});
    BallState b = make_ball(1, {10, 0}, {0, 0});
    auto t = time_to_ball_collision(a, b, 2.0);
    REQUIRE(t.has_value());
    CHECK(*t == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("ball-ball time of impact, parallel equal velocities") {
    BallState a = make_ball(0, {0, 0}, {1, 1});
    BallState b = make_ball(1, {10, 0}, {1, 1});
    CHECK_FALSE(time_to_ball_collision(a, b, 2.0).has_value());
}

TEST_CASE("graze/hit split at the contact borderline") {
    // impact parameter just above / just below 2R = 4
    BallState a = make_ball(0, {0, 0}, {1, 0});
    BallState miss = make_ball(1, {10, 4.0001}, {0, 0});
    BallState hit = make_ball(1, {10, 3.9999}, {0, 0});
    CHECK_FALSE(time_to_ball_collision(a, miss, 2.0).has_value());
    auto t = time_to_ball_collision(a, hit, 2.0);
    REQUIRE(t.has_value());
    CHECK(*t > 0.0);
    // cross-check the hit time against the closest-approach geometry
    const double dy = 3.9999;
    const double expect = 10.0 - std::sqrt(16.0 - dy * dy);
    CHECK(*t == doctest::Approx(expect).epsilon(1e-12));

    // brute-force confirmation: step the miss case through closest approach
    {
        TableConfig cfg;
        cfg.side = 4096;
        cfg.radius = 2.0;
        cfg.n_balls = 2;
        BallState a2 = make_ball(0, {100, 100}, {1, 0});
        BallState m2 = make_ball(1, {110, 100 + 4.0001}, {0, 0});
        billiard::testing::FixedStepOracle oracle(cfg, {a2, m2});
        oracle.run(20.0, 1e-4);
        CHECK(oracle.n_ball_shocks_ == 0);
        BallState h2 = make_ball(1, {110, 100 + 3.9999}, {0, 0});
        billiard::testing::FixedStepOracle oracle2(cfg, {a2, h2});
        oracle2.run(20.0, 1e-4);
        CHECK(oracle2.n_ball_shocks_ == 1);
    }
}

TEST_CASE("overlap violation is reported") {
    BallState a = make_ball(0, {0, 0}, {1, 0});
    BallState b = make_ball(1, {3.9, 0}, {0, 0});
    CHECK_THROWS_AS((void)time_to_ball_collision(a, b, 2.0), OverlapError);
}

TEST_CASE("wall time of impact") {
    TableConfig cfg;
    cfg.side = 4096;
    cfg.radius = 16;
    BallState a = make_ball(0, {100, 2048}, {-1, 0});
    auto hit = time_to_wall_collision(a, cfg);
    REQUIRE(hit.has_value());
    CHECK(hit->t == doctest::Approx(84.0));
    CHECK(hit->wall == 0);

    BallState still = make_ball(0, {100, 2048}, {0, 0});
    CHECK_FALSE(time_to_wall_collision(still, cfg).has_value());

    // corner tie: both the right and top wall are 2032 away; lowest wall id wins
    BallState c = make_ball(0, {2048, 2048}, {1, 1});
    auto corner = time_to_wall_collision(c, cfg);
    REQUIRE(corner.has_value());
    CHECK(corner->t == doctest::Approx(2032.0));
    CHECK(corner->wall == 1);
}

TEST_CASE("elastic exchange swaps normal components") {
    BallState a = make_ball(0, {0, 0}, {1, 0});
    BallState b = make_ball(1, {4, 0}, {-1, 0});
    resolve_ball_collision(a, b);
    CHECK(a.vel == Vec2{-1, 0});
    CHECK(b.vel == Vec2{1, 0});
    CHECK(a.shocks == 1);
    CHECK(b.shocks == 1);

    BallState c = make_ball(0, {0, 0}, {1, 0});
    BallState d = make_ball(1, {4, 0}, {0, 0});
    resolve_ball_collision(c, d);
    CHECK(c.vel == Vec2{0, 0});
    CHECK(d.vel == Vec2{1, 0});
}

TEST_CASE("grazing 45-degree exchange conserves energy and momentum") {
    const double s = 4.0 / std::sqrt(2.0);
    BallState a = make_ball(0, {0, 0}, {1, 0});
    BallState b = make_ball(1, {s, s}, {0, 0});
    const Vec2 p_before = a.vel + b.vel;
    const double e_before = norm2(a.vel) + norm2(b.vel);
    resolve_ball_collision(a, b);
    const Vec2 p_after = a.vel + b.vel;
    const double e_after = norm2(a.vel) + norm2(b.vel);
    CHECK(norm(p_after - p_before) <= 1e-12 * norm(p_before));
    CHECK(std::abs(e_after - e_before) <= 1e-12 * e_before);
    // normal component moved from a to b
    CHECK(norm(b.vel) > 0.0);
}

TEST_CASE("separating pairs are rejected") {
    BallState a = make_ball(0, {0, 0}, {-1, 0});
    BallState b = make_ball(1, {4, 0}, {1, 0});
    CHECK_THROWS_AS(resolve_ball_collision(a, b), std::invalid_argument);
}

TEST_CASE("wall reflection and periodic wrap") {
    BallState a = make_ball(0, {16, 50}, {-3, 2});
    resolve_wall_collision(a, 0);
    CHECK(a.vel == Vec2{3, 2});
    CHECK(a.wall_shocks == 1);

    BallState w = make_ball(0, {4096, 50}, {1, 0});
    wrap(w, 0, 4096.0);
    CHECK(w.pos.x == 0.0);
    CHECK(w.vel == Vec2{1, 0});
    CHECK(w.wall_shocks == 0);
}

TEST_CASE("free flight is exact") {
    TableConfig cfg;
    cfg.side = 4096;
    cfg.radius = 16;
    cfg.n_balls = 2;
    // two balls far apart moving along parallel lines: no events for a while
    std::vector<BallState> init = {
        make_ball(0, {100, 100}, {1, 0.5}),
        make_ball(1, {3000, 3000}, {1, 0.5}),
    };
    World w(cfg, init);
    w.advance(10.0);
    CHECK(w.ball(0).pos.x == doctest::Approx(110.0).epsilon(1e-15));
    CHECK(w.ball(0).pos.y == doctest::Approx(105.0).epsilon(1e-15));
}

TEST_CASE("two-ball head-on advance swaps velocities") {
    TableConfig cfg;
    cfg.side = 4096;
    cfg.radius = 16;
    cfg.n_balls = 2;
    std::vector<BallState> init = {
        make_ball(0, {1000, 2048}, {1, 0}),
        make_ball(1, {1200, 2048}, {-1, 0}),
    };
    World w(cfg, init);
    w.advance(200.0);  // gap 200 - 32 closes at rate 2 -> impact at t = 84
    CHECK(w.ball(0).vel == Vec2{-1, 0});
    CHECK(w.ball(1).vel == Vec2{1, 0});
    CHECK(w.ball_shock_total() == 1);
    CHECK(w.shocks_of(0) == 1);
}

TEST_CASE("corner double-reflection negates both components") {
    TableConfig cfg;
    cfg.side = 4096;
    cfg.radius = 16;
    cfg.n_balls = 2;
    std::vector<BallState> init = {
        make_ball(0, {20, 20.5}, {-1, -1.125}),
        make_ball(1, {3000, 3000}, {0.0, 0.0}),
    };
    World w(cfg, init);
    w.advance(10.0);
    CHECK(w.ball(0).vel.x == 1.0);
    CHECK(w.ball(0).vel.y == 1.125);

    // against the brute-force oracle
    billiard::testing::FixedStepOracle oracle(cfg, init);
    oracle.run(10.0, 1e-5);
    CHECK(oracle.balls()[0].vel.x == 1.0);
    CHECK(oracle.balls()[0].vel.y == 1.125);
    CHECK(std::abs(oracle.balls()[0].pos.x - w.ball(0).pos.x) < 1e-6);
    CHECK(std::abs(oracle.balls()[0].pos.y - w.ball(0).pos.y) < 1e-6);
}

TEST_CASE("energy and momentum conservation over a long horizon") {
    TableConfig cfg;
    cfg.side = 4096;
    cfg.radius = 117.0;
    cfg.n_balls = 32;

    for (Boundary mode : {Boundary::walls, Boundary::periodic}) {
        cfg.boundary = mode;
        World w(cfg, 1234u);
        const double e0 = w.kinetic_energy();
        const Vec2 p0 = w.momentum();
        w.advance(12000.0);
        CHECK(w.ball_shock_total() > 100);
        CHECK(std::abs(w.kinetic_energy() - e0) <= 1e-9 * e0);
        if (mode == Boundary::periodic) {
            CHECK(norm(w.momentum() - p0) <= 1e-9 * (norm(p0) + 1.0));
        }
        CHECK(w.min_pair_distance() >= 2.0 * cfg.radius - 1e-6);
    }
}

TEST_CASE("determinism: same config and seed, same trajectory") {
    TableConfig cfg;
    cfg.side = 4096;
    cfg.radius = 64;
    cfg.n_balls = 16;
    World w1(cfg, 99u);
    World w2(cfg, 99u);
    w1.advance(5000.0);
    w2.advance(5000.0);
    CHECK(w1.ball_shock_total() == w2.ball_shock_total());
    for (int i = 0; i < cfg.n_balls; ++i) {
        CHECK(w1.ball(i).pos == w2.ball(i).pos);
        CHECK(w1.ball(i).vel == w2.ball(i).vel);
    }
}

TEST_CASE("time reversal returns to the initial state for a few shocks") {
    TableConfig cfg;
    cfg.side = 4096;
    cfg.radius = 200;
    cfg.n_balls = 8;
    World w(cfg, 7u);
    auto initial = w.snapshot();
    // run until roughly 5 shocks happened, tracking elapsed time
    double elapsed = 0.0;
    while (w.ball_shock_total() < 5) {
        w.advance(50.0);
        elapsed += 50.0;
    }
    w.negate_velocities();
    w.advance(elapsed);
    for (int i = 0; i < cfg.n_balls; ++i) {
        CHECK(std::abs(w.ball(i).pos.x - initial[i].pos.x) < 1e-3);
        CHECK(std::abs(w.ball(i).pos.y - initial[i].pos.y) < 1e-3);
    }
}

TEST_CASE("event-driven trajectory matches the fixed-step oracle") {
    TableConfig cfg;
    cfg.side = 4096;
    cfg.radius = 400;
    cfg.n_balls = 8;
    World w(cfg, 2024u);
    auto init = w.snapshot();

    // empirical mean free time from a throwaway run
    World probe(cfg, 2024u);
    probe.advance(4000.0);
    const double tau = probe.ball_shock_total() > 0
                           ? 4000.0 * cfg.n_balls / (2.0 * probe.ball_shock_total())
                           : 4000.0;
    const double horizon = 5.0 * tau;

    w.advance(horizon);
    billiard::testing::FixedStepOracle oracle(cfg, init);
    oracle.run(horizon, 1e-5 * tau);

    REQUIRE(w.ball_shock_total() == oracle.n_ball_shocks_);
    double worst = 0.0;
    for (int i = 0; i < cfg.n_balls; ++i) {
        worst = std::max(worst, std::abs(w.ball(i).pos.x - oracle.balls()[i].pos.x));
        worst = std::max(worst, std::abs(w.ball(i).pos.y - oracle.balls()[i].pos.y));
    }
    CHECK(worst < 1e-6);
}
