// Acceptance suite: one statistical reproduction criterion per line, desk
// scale (N_b <= 512, >= 200 trials per cell). Exit code 0 only when every
// criterion holds at its stated tolerance.

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "billiard/dispersion.hpp"
#include "billiard/harness.hpp"
#include "billiard/info_metrics.hpp"
#include "billiard/scaling.hpp"
#include "billiard/two_ball.hpp"
#include "billiard/world.hpp"
#include "support/fixed_step_oracle.hpp"

using namespace billiard;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
    std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) g_failures += 1;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

const SweepCell& cell_at(const SweepResult& sweep, int k, int nb) {
    for (const auto& c : sweep.cells)
        if (c.epsilon_exp == k && c.n_balls == nb) return c;
    throw std::logic_error("missing sweep cell");
}

// ---- criterion 1: conservation over 1e6 collisions -------------------------
void criterion_conservation() {
    bool pass = true;
    std::string detail;
    for (Boundary mode : {Boundary::walls, Boundary::periodic}) {
        TableConfig cfg;
        cfg.side = 4096;
        cfg.n_balls = 64;
        cfg.radius = radius_for_void_ratio(0.33, cfg.n_balls, cfg.side);
        cfg.boundary = mode;
        World w(cfg, 20250809u);
        const double e0 = w.kinetic_energy();
        const Vec2 p0 = w.momentum();
        double max_e_drift = 0.0, max_p_drift = 0.0;
        while (w.ball_shock_total() < 1000000u) {
            w.advance(2000.0);
            max_e_drift = std::max(max_e_drift, std::abs(w.kinetic_energy() - e0) / e0);
            if (mode == Boundary::periodic)
                max_p_drift = std::max(max_p_drift, norm(w.momentum() - p0) / (norm(p0) + 1.0));
        }
        detail += std::string(to_string(mode)) + ": shocks=" + std::to_string(w.ball_shock_total()) +
                  " dE=" + fmt(max_e_drift);
        pass = pass && max_e_drift < 1e-9;
        if (mode == Boundary::periodic) {
            detail += " dP=" + fmt(max_p_drift);
            pass = pass && max_p_drift < 1e-9;
        }
        detail += "  ";
    }
    report(1, pass, "energy/momentum conserved over 1e6 collisions", detail);
}

// ---- criterion 2: event-driven vs fixed-step oracle -------------------------
void criterion_oracle() {
    TableConfig cfg;
    cfg.side = 4096;
    cfg.n_balls = 8;
    cfg.radius = radius_for_void_ratio(0.33, cfg.n_balls, cfg.side);
    World w(cfg, 77001u);
    auto init = w.snapshot();

    World probe(cfg, 77001u);
    probe.advance(6000.0);
    const double tau = 6000.0 * cfg.n_balls / (2.0 * std::max<std::uint64_t>(1, probe.ball_shock_total()));
    const double horizon = 5.0 * tau;

    w.advance(horizon);
    billiard::testing::FixedStepOracle oracle(cfg, init);
    oracle.run(horizon, 1e-5 * tau);

    double worst = 0.0;
    for (int i = 0; i < cfg.n_balls; ++i) {
        worst = std::max(worst, std::abs(w.ball(i).pos.x - oracle.balls()[i].pos.x));
        worst = std::max(worst, std::abs(w.ball(i).pos.y - oracle.balls()[i].pos.y));
    }
    const bool same_shocks = w.ball_shock_total() == oracle.n_ball_shocks_;
    report(2, worst < 1e-6 && same_shocks, "event-driven matches fixed-step oracle",
           "worst coordinate gap " + fmt(worst) + " px over " +
               std::to_string(w.ball_shock_total()) + " shocks, horizon 5 tau = " + fmt(horizon));
}

// ---- criteria 3..6, 9: the shared desk-scale sweep --------------------------
SweepResult main_sweep() {
    ExperimentConfig cfg;
    cfg.k_list = {15, 20, 25, 30, 35};
    cfg.nb_list = {16, 32, 64, 128, 256, 512};
    cfg.void_ratio = 0.33;
    cfg.trials = 200;
    cfg.seed = 424242;
    return run_sweep(cfg);
}

void criterion_eps_delay(const SweepResult& sweep) {
    bool pass = true;
    std::string detail = "N_b=128 diffs:";
    for (int k : {15, 20, 25, 30}) {
        const double d = cell_at(sweep, k + 5, 128).nc_mean - cell_at(sweep, k, 128).nc_mean;
        detail += " " + fmt(d);
        pass = pass && d >= 1.5 && d <= 3.5;
    }
    report(3, pass, "each eps division by 2^5 delays N_c by 2-3 shocks", detail);
}

void criterion_nc_floor() {
    ExperimentConfig cfg;
    cfg.k_list = {5};
    cfg.nb_list = {256, 512};
    cfg.void_ratio = 0.33;
    cfg.trials = 200;
    cfg.seed = 511;
    SweepResult sweep = run_sweep(cfg);
    bool pass = true;
    std::string detail;
    for (const auto& c : sweep.cells) {
        detail += "N_b=" + std::to_string(c.n_balls) + ": " + fmt(c.nc_mean) + "  ";
        pass = pass && c.nc_mean >= 1.0 && c.nc_mean <= 1.3;
    }
    report(4, pass, "k=5 floor: mean N_c in [1.0, 1.3] for N_b >= 256", detail);
}

void criterion_boundary_convergence() {
    bool pass = true;
    std::string detail;
    std::map<int, double> walls_nc;
    for (Boundary mode : {Boundary::walls, Boundary::periodic}) {
        ExperimentConfig cfg;
        cfg.boundary = mode;
        cfg.k_list = {25};
        cfg.nb_list = {128, 256};
        cfg.void_ratio = 0.33;
        cfg.trials = 200;
        cfg.seed = 606;
        SweepResult sweep = run_sweep(cfg);
        for (const auto& c : sweep.cells) {
            if (mode == Boundary::walls) {
                walls_nc[c.n_balls] = c.nc_mean;
            } else {
                const double d = std::abs(c.nc_mean - walls_nc[c.n_balls]);
                detail += "N_b=" + std::to_string(c.n_balls) + ": |d|=" + fmt(d) + "  ";
                pass = pass && d < 1.0;
            }
        }
    }
    report(5, pass, "wall vs periodic N_c within 1 shock for N_b >= 128", detail);
}

ScalingFit criterion_scaling(const SweepResult& sweep) {
    std::vector<ScalingPoint> pts;
    for (const auto& c : sweep.cells) {
        if (c.diverged < 2) continue;
        ScalingPoint p;
        p.k = c.epsilon_exp;
        p.log2_nb = std::log2(double(c.n_balls));
        p.nc = c.nc_mean;
        p.weight = 1.0 / std::max(c.nc_std * c.nc_std / c.diverged, 1e-4);
        pts.push_back(p);
    }
    ScalingFit fit = fit_scaling(pts);
    const double factor = fit.b > 0.0 && fit.c < 0.0 ? precision_tradeoff(fit) : 0.0;
    const bool pass = fit.b >= 0.1 && fit.b <= 0.32 && fit.c >= -0.53 && fit.c <= -0.17 &&
                      factor >= 1.3 && factor <= 1.8;
    report(6, pass, "scaling fit B, C and precision tradeoff in the stated windows",
           "B=" + fmt(fit.b) + " C=" + fmt(fit.c) + " tradeoff=" + fmt(factor) +
               " (A=" + fmt(fit.a) + ", rms=" + fmt(fit.residual_rms) + ")");
    return fit;
}

// ---- criteria 7, 8: dispersion ----------------------------------------------
DispersionHistogram collect_sharded(const DispersionRunConfig& base, std::uint64_t seed,
                                    std::uint64_t samples) {
    const int shards = resolve_workers(0);
    std::vector<DispersionHistogram> parts(shards);
    parallel_for(shards, shards, [&](int s) {
        DispersionRunConfig cfg = base;
        cfg.n_samples_target = (samples + shards - 1) / shards;
        parts[s] = collect_dispersion(cfg, hash_combine(seed, s));
    });
    DispersionHistogram h = parts[0];
    for (int s = 1; s < shards; ++s) h.merge(parts[s]);
    h.void_ratio = base.table.void_ratio();
    h.radius = base.table.radius;
    h.n_balls = base.table.n_balls;
    h.epsilon_exp = base.perturbation.epsilon_exp;
    return h;
}

DispersionHistogram criterion_dispersion_shape() {
    DispersionRunConfig dc;
    dc.table.side = 4096;
    dc.table.n_balls = 128;
    dc.table.radius = radius_for_void_ratio(0.33, 128, 4096.0);
    dc.perturbation.epsilon_exp = 35;
    DispersionHistogram h = collect_sharded(dc, 70707, 150000);

    bool pass = h.mode_bin() >= 126 && h.mode_bin() <= 130;
    pass = pass && h.mass_below(128) > h.mass_above(128);
    std::string detail = "mode=" + std::to_string(h.mode_bin()) +
                         " below=" + fmt(h.mass_below(128)) + " above=" + fmt(h.mass_above(128));
    try {
        TriangleFit fit = fit_triangle(h);
        detail += " S_u=" + fmt(fit.s_up) + " S_d=" + fmt(fit.s_down);
        pass = pass && fit.s_up >= 1.1 && fit.s_up <= 3.3 && fit.s_down >= -7.5 &&
               fit.s_down <= -2.5;
    } catch (const TriangleFitError& e) {
        detail += std::string(" fit failed: ") + e.what();
        pass = false;
    }
    report(7, pass, "R_v=0.33 dispersion histogram is the asymmetric triangle", detail);
    return h;
}

void criterion_radius_effect() {
    DispersionRunConfig dc;
    dc.table.side = 4096;
    dc.table.n_balls = 128;
    dc.perturbation.epsilon_exp = 35;
    dc.table.radius = 16.0;
    DispersionHistogram h16 = collect_sharded(dc, 161616, 100000);
    dc.table.radius = 1.0;
    DispersionHistogram h1 = collect_sharded(dc, 111111, 100000);
    const double factor = h1.mean_out_in_ratio() / h16.mean_out_in_ratio();
    report(8, factor >= 30.0, "mean dispersion ratio grows >= 30x from R=16 to R=1",
           "mean(R=16)=" + fmt(h16.mean_out_in_ratio()) +
               " mean(R=1)=" + fmt(h1.mean_out_in_ratio()) + " factor=" + fmt(factor));
}

// ---- criteria 9, 10: surrogate ----------------------------------------------
void criteria_surrogate(const SweepResult& sweep, const DispersionHistogram& hist) {
    RatioSampler sampler = RatioSampler::from_histogram(hist);

    std::map<int, SurrogateStats> stats;
    for (int k : {5, 10, 15, 20, 25, 30, 35})
        stats[k] = surrogate_nc(sampler, k, kDivergencePixels, 200000,
                                hash_combine(13131, k));

    std::vector<BridgeObservation> obs;
    for (const auto& c : sweep.cells)
        if (c.diverged > 0)
            obs.push_back({c.epsilon_exp, std::log2(double(c.n_balls)), c.nc_mean});
    NbBridgeCalibration cal = calibrate_nb_bridge(
        obs, [&](int k) -> const SurrogateStats& { return stats.at(k); });

    // criterion 9: surrogate vs paired at the four overlap cells
    bool pass9 = true;
    std::string d9 = "bridge rms=" + fmt(cal.rms_error) + ";";
    for (int nb : {32, 128})
        for (int k : {15, 25}) {
            const double g = std::exp2(cal.gamma0 + cal.gamma1 * std::log2(double(nb)));
            const double surrogate = expected_min_steps(stats.at(k), g);
            const double paired = cell_at(sweep, k, nb).nc_mean;
            const double gap = std::abs(surrogate - paired);
            d9 += " (" + std::to_string(nb) + "," + std::to_string(k) + "): " + fmt(gap);
            pass9 = pass9 && gap <= 2.0;
        }
    report(9, pass9, "two-ball surrogate within 2 shocks of paired simulation", d9);

    // criterion 10: axis crossings of the surrogate surface for k = 5, 10, 15
    std::vector<SurrogateStats> per_k = {stats.at(5), stats.at(10), stats.at(15)};
    std::vector<double> grid;
    for (double x = 3.0; x <= 18.0; x += 0.5) grid.push_back(x);
    auto cells = nb_scaling_bridge(per_k, cal, grid);
    std::vector<ScalingPoint> pts;
    for (const auto& c : cells)
        if (c.nc_mean > 1.2) pts.push_back({double(c.epsilon_exp), c.log2_nb, c.nc_mean, 1.0});
    ScalingFit fit = fit_scaling(pts);
    const double targets[3][2] = {{5, 9.0}, {10, 12.5}, {15, 16.0}};
    bool pass10 = true;
    std::string d10;
    for (const auto& t : targets) {
        auto x = axis_crossing(fit, t[0]);
        if (!x) {
            pass10 = false;
            d10 += " k=" + fmt(t[0]) + ": none";
            continue;
        }
        d10 += " k=" + fmt(t[0]) + ": " + fmt(x->log2_nb);
        pass10 = pass10 && std::abs(x->log2_nb - t[1]) <= 2.0;
    }
    report(10, pass10, "surrogate axis crossings near log2(N_b) = 9, 12.5, 16", d10);
}

// ---- criterion 11: demon arithmetic -----------------------------------------
void criterion_demon() {
    bool pass = demon_condition(40, 10, 8) == DemonVerdict::borderline;
    // the figure's ladder: N_b 200..5000 with N_c 10, 9, 8, 7, 6
    const std::pair<std::int64_t, DemonVerdict> ladder[] = {
        {10, DemonVerdict::no_paradox}, {9, DemonVerdict::no_paradox},
        {8, DemonVerdict::borderline},  {7, DemonVerdict::paradox},
        {6, DemonVerdict::paradox},
    };
    std::string detail = "ladder:";
    for (const auto& [nc, expect] : ladder) {
        const DemonVerdict v = demon_condition(40, 10, nc);
        detail += std::string(" ") + to_string(v);
        pass = pass && v == expect;
    }
    report(11, pass, "demon borderline at (P_i=40, P_c=10, N_c=8) and ladder pattern", detail);
}

// ---- criterion 12: byte-identical reruns across worker counts ----------------
void criterion_determinism() {
    ExperimentConfig cfg;
    cfg.k_list = {15, 25};
    cfg.nb_list = {16, 32};
    cfg.void_ratio = 0.33;
    cfg.trials = 25;
    cfg.seed = 99999;
    cfg.workers = 1;
    const std::string serial = run_sweep(cfg).to_csv().str();
    cfg.workers = 8;
    const std::string parallel = run_sweep(cfg).to_csv().str();
    const std::string rerun = run_sweep(cfg).to_csv().str();
    report(12, serial == parallel && serial == rerun,
           "sweep output byte-identical for 1 vs 8 workers and across reruns",
           std::to_string(serial.size()) + " bytes compared");
}

} // namespace

int main() {
    std::printf("twinbilliard acceptance suite\n");
    criterion_conservation();
    criterion_oracle();

    SweepResult sweep = main_sweep();
    criterion_eps_delay(sweep);
    criterion_nc_floor();
    criterion_boundary_convergence();
    criterion_scaling(sweep);

    DispersionHistogram hist = criterion_dispersion_shape();
    criterion_radius_effect();
    criteria_surrogate(sweep, hist);

    criterion_demon();
    criterion_determinism();

    std::printf("%s (%d criteria failed)\n", g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures);
    return g_failures == 0 ? 0 : 1;
}
