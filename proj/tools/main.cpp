// Experiment driver: seeded paired-billiard runs, parameter sweeps, the
// dispersion and two-ball pipelines, scaling fits and the per-figure
// subcommands. All outputs go to paths given by flags; every file embeds the
// effective config and its hash.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "billiard/dispersion.hpp"
#include "billiard/harness.hpp"
#include "billiard/info_metrics.hpp"
#include "billiard/scaling.hpp"
#include "billiard/svg.hpp"
#include "billiard/two_ball.hpp"

using namespace billiard;

namespace {

std::string cause_name(const TrialRecord& rec) {
    switch (rec.termination) {
        case Termination::diverged:
            return rec.cause == DivergenceCause::separation ? "separation" : "partner_mismatch";
        case Termination::max_shocks_reached: return "max_shocks_reached";
        default: return "numerical_abort";
    }
}

void echo_config_meta(CsvWriter& csv, const ExperimentConfig& cfg) {
    csv.meta("artifact", "twinbilliard");
    csv.meta("config_hash", hash_hex(config_hash(cfg.canonical())));
    csv.meta("seed", static_cast<std::uint64_t>(cfg.seed));
    std::istringstream echo(cfg.canonical());
    for (std::string line; std::getline(echo, line);) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos)
            csv.meta("config." + line.substr(0, eq), line.substr(eq + 3));
    }
}

double cell_radius(const ExperimentConfig& cfg, int nb) {
    if (!cfg.r_list.empty()) return cfg.r_list.front();
    return radius_for_void_ratio(cfg.void_ratio, nb, cfg.side);
}

// weight = inverse variance of the cell mean, with a floor for degenerate stds
ScalingPoint cell_to_point(const SweepCell& c, bool weighted) {
    ScalingPoint p;
    p.k = c.epsilon_exp;
    p.log2_nb = std::log2(double(c.n_balls));
    p.nc = c.nc_mean;
    if (weighted && c.diverged > 1) {
        const double var = std::max(c.nc_std * c.nc_std / c.diverged, 1e-4);
        p.weight = 1.0 / var;
    }
    return p;
}

std::vector<ScalingPoint> sweep_to_points(const SweepResult& sweep, bool weighted) {
    std::vector<ScalingPoint> pts;
    for (const auto& c : sweep.cells)
        if (c.diverged > 0) pts.push_back(cell_to_point(c, weighted));
    return pts;
}

// Sweep CSV reader (the format written by `sweep`); enough for `fit`.
std::vector<ScalingPoint> load_sweep_csv(const std::string& path, bool weighted) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::vector<std::string> header;
    std::vector<ScalingPoint> pts;
    std::map<std::string, int> col;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (header.empty()) {
            header = cells;
            for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = int(i);
            for (const char* need : {"k", "n_balls", "nc_mean", "nc_std", "diverged"})
                if (!col.count(need))
                    throw std::runtime_error(std::string("sweep csv lacks column ") + need);
            continue;
        }
        SweepCell c;
        c.epsilon_exp = std::stoi(cells[col["k"]]);
        c.n_balls = std::stoi(cells[col["n_balls"]]);
        c.nc_mean = std::stod(cells[col["nc_mean"]]);
        c.nc_std = std::stod(cells[col["nc_std"]]);
        c.diverged = std::stoi(cells[col["diverged"]]);
        if (c.diverged > 0) pts.push_back(cell_to_point(c, weighted));
    }
    return pts;
}

CsvWriter histogram_csv(const DispersionHistogram& h) {
    CsvWriter csv;
    csv.meta("artifact", "twinbilliard");
    csv.meta("kind", "dispersion_histogram");
    csv.meta("n_balls", std::uint64_t(h.n_balls));
    csv.meta("radius", h.radius);
    csv.meta("void_ratio", h.void_ratio);
    csv.meta("epsilon_exp", std::uint64_t(h.epsilon_exp));
    csv.meta("total", h.total());
    csv.meta("degenerate", h.degenerate_count());
    csv.meta("clamped_low", h.clamped_low());
    csv.meta("clamped_high", h.clamped_high());
    csv.meta("mean_out_in_ratio", h.mean_out_in_ratio());
    csv.meta("mean_log2_ratio", h.mean_log2_ratio());
    csv.header({"bin", "a_n_center", "count", "normalized"});
    for (int i = 0; i < DispersionHistogram::kBins; ++i)
        csv.row({std::to_string(i), format_double(double(i)), std::to_string(h.bin(i)),
                 format_double(h.normalized(i))});
    return csv;
}

DispersionHistogram load_histogram_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    DispersionHistogram h;
    std::string line;
    bool saw_header = false;
    int bin_col = -1, count_col = -1;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find(" = ");
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(2, eq - 2);
            const std::string val = line.substr(eq + 3);
            if (key == "n_balls") h.n_balls = std::stoi(val);
            else if (key == "radius") h.radius = std::stod(val);
            else if (key == "void_ratio") h.void_ratio = std::stod(val);
            else if (key == "epsilon_exp") h.epsilon_exp = std::stoi(val);
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (!saw_header) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (cells[i] == "bin") bin_col = int(i);
                if (cells[i] == "count") count_col = int(i);
            }
            if (bin_col < 0 || count_col < 0)
                throw std::runtime_error("histogram csv lacks bin/count columns");
            saw_header = true;
            continue;
        }
        const int bin = std::stoi(cells[bin_col]);
        const std::uint64_t count = std::stoull(cells[count_col]);
        h.record_many({1.0, ratio_from_coordinate(bin)}, count);
    }
    return h;
}

void print_fit(const ScalingFit& fit, std::ostream& out) {
    out << "a = " << format_double(fit.a) << "\n";
    out << "b = " << format_double(fit.b) << "\n";
    out << "c = " << format_double(fit.c) << "\n";
    out << "se_a = " << format_double(fit.se_a) << "\n";
    out << "se_b = " << format_double(fit.se_b) << "\n";
    out << "se_c = " << format_double(fit.se_c) << "\n";
    out << "residual_rms = " << format_double(fit.residual_rms) << "\n";
    out << "n_points = " << fit.n_points << "\n";
    out << "k_range = [" << fit.k_min << ", " << fit.k_max << "]\n";
    out << "log2_nb_range = [" << format_double(fit.log2_nb_min) << ", "
        << format_double(fit.log2_nb_max) << "]\n";
    if (fit.b > 0.0 && fit.c < 0.0)
        out << "precision_tradeoff = " << format_double(precision_tradeoff(fit)) << "\n";
}

struct TwoBallOutputs {
    std::vector<SurrogateStats> per_k;
    NbBridgeCalibration calibration;
    std::vector<SurfaceCell> cells;
    SweepResult calib_sweep;
    DispersionHistogram hist;
};

// Shared pipeline behind `two-ball`, `fig5` and `fig6`: collect (or load) a
// dispersion histogram, run per-k surrogate walks, calibrate the N_b bridge
// against a paired-simulation sweep, and evaluate the surface.
TwoBallOutputs run_two_ball_pipeline(const std::vector<int>& k_list,
                                     const std::vector<double>& log2_nb_grid,
                                     const std::string& hist_csv, double rv, int hist_nb,
                                     std::uint64_t hist_samples, const std::vector<int>& calib_k,
                                     const std::vector<int>& calib_nb, int calib_trials,
                                     std::uint64_t surrogate_trials, std::uint64_t seed,
                                     int workers) {
    TwoBallOutputs out;
    if (!hist_csv.empty()) {
        out.hist = load_histogram_csv(hist_csv);
    } else {
        DispersionRunConfig dc;
        dc.table.side = 4096.0;
        dc.table.n_balls = hist_nb;
        dc.table.radius = radius_for_void_ratio(rv, hist_nb, dc.table.side);
        dc.perturbation.epsilon_exp = 35;
        dc.perturbation.sign_seed = hash_combine(seed, 0x5151);
        dc.n_samples_target = hist_samples;
        out.hist = collect_dispersion(dc, hash_combine(seed, 0xd15e));
    }
    RatioSampler sampler = RatioSampler::from_histogram(out.hist);

    out.per_k.resize(k_list.size());
    parallel_for(int(k_list.size()), workers, [&](int i) {
        out.per_k[i] = surrogate_nc(sampler, k_list[i], kDivergencePixels, surrogate_trials,
                                    hash_combine(seed, 0xabc0 + k_list[i]));
    });

    ExperimentConfig calib;
    calib.k_list = calib_k;
    calib.nb_list = calib_nb;
    calib.void_ratio = rv;
    calib.trials = calib_trials;
    calib.seed = hash_combine(seed, 0xca11b);
    calib.workers = workers;
    out.calib_sweep = run_sweep(calib);

    // surrogate stats at the calibration exponents
    std::map<int, SurrogateStats> stats_by_k;
    for (const auto& st : out.per_k) stats_by_k[st.epsilon_exp] = st;
    for (int k : calib_k)
        if (!stats_by_k.count(k))
            stats_by_k[k] = surrogate_nc(sampler, k, kDivergencePixels, surrogate_trials,
                                         hash_combine(seed, 0xabc0 + k));

    std::vector<BridgeObservation> obs;
    for (const auto& c : out.calib_sweep.cells)
        if (c.diverged > 0)
            obs.push_back({c.epsilon_exp, std::log2(double(c.n_balls)), c.nc_mean});
    out.calibration = calibrate_nb_bridge(
        obs, [&](int k) -> const SurrogateStats& { return stats_by_k.at(k); });
    out.cells = nb_scaling_bridge(out.per_k, out.calibration, log2_nb_grid);
    return out;
}

CsvWriter surface_csv(const TwoBallOutputs& out, std::uint64_t seed) {
    CsvWriter csv;
    csv.meta("artifact", "twinbilliard");
    csv.meta("kind", "two_ball_surface");
    csv.meta("seed", seed);
    csv.meta("hist_total", out.hist.total());
    csv.meta("hist_void_ratio", out.hist.void_ratio);
    csv.meta("bridge_gamma0", out.calibration.gamma0);
    csv.meta("bridge_gamma1", out.calibration.gamma1);
    csv.meta("bridge_rms_error", out.calibration.rms_error);
    csv.meta("bridge_log2_nb_support",
             "[" + format_double(out.calibration.log2_nb_min) + ", " +
                 format_double(out.calibration.log2_nb_max) + "]");
    csv.header({"k", "log2_nb", "nc_mean", "nc_ci_low", "nc_ci_high", "crossed_axis",
                "extrapolated"});
    for (const auto& c : out.cells)
        csv.row({std::to_string(c.epsilon_exp), format_double(c.log2_nb),
                 format_double(c.nc_mean), format_double(c.nc_ci_low),
                 format_double(c.nc_ci_high), c.crossed_axis ? "1" : "0",
                 c.extrapolated ? "1" : "0"});
    return csv;
}

std::vector<double> make_grid(double lo, double hi, double step) {
    std::vector<double> g;
    for (double x = lo; x <= hi + 1e-9; x += step) g.push_back(x);
    return g;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"twin-billiard phase-information loss laboratory"};
    app.set_config("--config", "", "key = value configuration file; flags override it");
    app.require_subcommand(1);

    int workers = 0;
    app.add_option("--workers", workers, "worker threads (default: TWINBILLIARD_WORKERS or cores)");

    // ---- simulate ----------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "run seeded paired trials at one grid cell");
    int sim_k = 35, sim_nb = 128, sim_trials = 1;
    double sim_rv = 0.33, sim_radius = 0.0, sim_max_shocks = 200.0;
    std::uint64_t sim_seed = 1;
    std::string sim_boundary = "walls", sim_out;
    bool sim_wall_shocks = false, sim_trace = false;
    sim->add_option("--k", sim_k, "perturbation exponent, eps = 2^-k")->capture_default_str();
    sim->add_option("--nb", sim_nb, "ball count")->capture_default_str();
    sim->add_option("--rv", sim_rv, "packing fraction (sets R)")->capture_default_str();
    sim->add_option("--radius", sim_radius, "disk radius in pixels (overrides --rv)");
    sim->add_option("--trials", sim_trials, "trial count")->capture_default_str();
    sim->add_option("--seed", sim_seed, "master seed")->capture_default_str();
    sim->add_option("--max-shocks", sim_max_shocks, "per-ball shock budget")->capture_default_str();
    sim->add_option("--boundary", sim_boundary, "walls | periodic")->capture_default_str();
    sim->add_flag("--count-wall-shocks", sim_wall_shocks, "wall shocks count toward N_c");
    sim->add_flag("--trace", sim_trace, "record per-shock mean separations");
    sim->add_option("--out-csv", sim_out, "per-trial records file");

    // ---- sweep -------------------------------------------------------------
    auto* swp = app.add_subcommand("sweep", "paired-simulation sweep over (k, N_b[, R])");
    std::vector<int> swp_k = {15, 20, 25, 30, 35};
    std::vector<int> swp_nb = {16, 32, 64, 128, 256, 512};
    std::vector<double> swp_r;
    double swp_rv = 0.33, swp_max_shocks = 200.0;
    int swp_trials = 200;
    std::uint64_t swp_seed = 1;
    std::string swp_boundary = "walls", swp_out;
    bool swp_wall_shocks = false;
    swp->add_option("--k-list", swp_k, "perturbation exponents")->capture_default_str();
    swp->add_option("--nb-list", swp_nb, "ball counts")->capture_default_str();
    swp->add_option("--r-list", swp_r, "explicit radii (otherwise --rv computes R per cell)");
    swp->add_option("--rv", swp_rv, "packing fraction")->capture_default_str();
    swp->add_option("--trials", swp_trials, "trials per cell")->capture_default_str();
    swp->add_option("--seed", swp_seed, "master seed")->capture_default_str();
    swp->add_option("--max-shocks", swp_max_shocks, "per-ball shock budget")->capture_default_str();
    swp->add_option("--boundary", swp_boundary, "walls | periodic")->capture_default_str();
    swp->add_flag("--count-wall-shocks", swp_wall_shocks, "wall shocks count toward N_c");
    swp->add_option("--out-csv", swp_out, "sweep aggregate file")->required();

    // ---- dispersion --------------------------------------------------------
    auto* dsp = app.add_subcommand("dispersion", "collect the velocity-dispersion histogram");
    int dsp_k = 35, dsp_nb = 128;
    double dsp_rv = 0.33, dsp_radius = 0.0;
    std::uint64_t dsp_samples = 100000, dsp_seed = 1;
    std::string dsp_out, dsp_svg;
    dsp->add_option("--k", dsp_k, "perturbation exponent")->capture_default_str();
    dsp->add_option("--nb", dsp_nb, "ball count")->capture_default_str();
    dsp->add_option("--rv", dsp_rv, "packing fraction")->capture_default_str();
    dsp->add_option("--radius", dsp_radius, "disk radius (overrides --rv)");
    dsp->add_option("--samples", dsp_samples, "target shock samples")->capture_default_str();
    dsp->add_option("--seed", dsp_seed, "master seed")->capture_default_str();
    dsp->add_option("--out-csv", dsp_out, "histogram file")->required();
    dsp->add_option("--out-svg", dsp_svg, "histogram plot");

    // ---- two-ball ----------------------------------------------------------
    auto* twb = app.add_subcommand("two-ball", "stochastic surrogate N_c surface");
    std::vector<int> twb_k = {5, 10, 15, 20, 25, 30, 35, 40, 45};
    std::vector<int> twb_calib_k = {15, 20, 25};
    std::vector<int> twb_calib_nb = {16, 32, 64, 128};
    double twb_rv = 0.33, twb_lo = 3.0, twb_hi = 17.0, twb_step = 0.5;
    int twb_hist_nb = 64, twb_calib_trials = 100;
    std::uint64_t twb_samples = 100000, twb_trials = 200000, twb_seed = 1;
    std::string twb_hist, twb_out, twb_svg;
    twb->add_option("--k-list", twb_k, "surface exponents")->capture_default_str();
    twb->add_option("--log2-nb-min", twb_lo, "surface grid start")->capture_default_str();
    twb->add_option("--log2-nb-max", twb_hi, "surface grid end")->capture_default_str();
    twb->add_option("--log2-nb-step", twb_step, "surface grid step")->capture_default_str();
    twb->add_option("--rv", twb_rv, "packing fraction")->capture_default_str();
    twb->add_option("--hist-csv", twb_hist, "reuse a dispersion histogram file");
    twb->add_option("--hist-nb", twb_hist_nb, "ball count for histogram collection")
        ->capture_default_str();
    twb->add_option("--samples", twb_samples, "histogram samples")->capture_default_str();
    twb->add_option("--calib-k-list", twb_calib_k, "calibration exponents")->capture_default_str();
    twb->add_option("--calib-nb-list", twb_calib_nb, "calibration ball counts")
        ->capture_default_str();
    twb->add_option("--calib-trials", twb_calib_trials, "trials per calibration cell")
        ->capture_default_str();
    twb->add_option("--surrogate-trials", twb_trials, "walks per exponent")->capture_default_str();
    twb->add_option("--seed", twb_seed, "master seed")->capture_default_str();
    twb->add_option("--out-csv", twb_out, "surface file")->required();
    twb->add_option("--out-svg", twb_svg, "surface plot");

    // ---- fit ---------------------------------------------------------------
    auto* fit_cmd = app.add_subcommand("fit", "weighted least squares on a sweep CSV");
    std::string fit_in, fit_out_txt, fit_out_csv;
    bool fit_unweighted = false;
    std::vector<double> fit_crossing_k;
    fit_cmd->add_option("--in-csv", fit_in, "sweep aggregate file")->required();
    fit_cmd->add_flag("--unweighted", fit_unweighted, "plain least squares");
    fit_cmd->add_option("--crossing-k", fit_crossing_k, "report N_c = 1 crossings for these k");
    fit_cmd->add_option("--out", fit_out_txt, "fit report (key = value lines; default stdout)");
    fit_cmd->add_option("--out-csv", fit_out_csv, "single-row CSV for sweep aggregation");

    // ---- demon -------------------------------------------------------------
    auto* dem = app.add_subcommand("demon", "determinism-paradox arithmetic");
    std::int64_t dem_pi = 40, dem_pc = 10, dem_nc = -1;
    double dem_a = 0.0, dem_b = 0.0, dem_c = 0.0;
    bool dem_have_fit = false;
    dem->add_option("--pi", dem_pi, "initial-condition precision, bits")->capture_default_str();
    dem->add_option("--pc", dem_pc, "calculation precision, bits")->capture_default_str();
    dem->add_option("--nc", dem_nc, "critical shock count for a verdict");
    auto* dem_fa = dem->add_option("--fit-a", dem_a, "scaling intercept (frontier mode)");
    dem->add_option("--fit-b", dem_b, "scaling k coefficient");
    dem->add_option("--fit-c", dem_c, "scaling log2(N_b) coefficient");
    (void)dem_fa;

    // ---- figures -----------------------------------------------------------
    struct FigCommon {
        std::string out_csv, out_svg;
    };
    auto add_fig_outputs = [](CLI::App* cmd, FigCommon& io) {
        cmd->add_option("--out-csv", io.out_csv, "figure data file")->required();
        cmd->add_option("--out-svg", io.out_svg, "figure plot file")->required();
    };

    auto* fig2 = app.add_subcommand("fig2", "pair-separation traces per epsilon");
    std::vector<int> fig2_k = {5, 10, 15, 20, 25, 30, 35};
    int fig2_nb = 128;
    double fig2_rv = 0.33;
    std::uint64_t fig2_seed = 1;
    FigCommon fig2_io;
    fig2->add_option("--k-list", fig2_k, "")->capture_default_str();
    fig2->add_option("--nb", fig2_nb, "")->capture_default_str();
    fig2->add_option("--rv", fig2_rv, "")->capture_default_str();
    fig2->add_option("--seed", fig2_seed, "")->capture_default_str();
    add_fig_outputs(fig2, fig2_io);

    auto* fig3 = app.add_subcommand("fig3", "N_c vs log2(N_b), walls vs periodic");
    std::vector<int> fig3_k = {5, 10, 15, 20, 25, 30, 35};
    std::vector<int> fig3_nb = {8, 16, 32, 64, 128, 256, 512};
    double fig3_rv = 0.33;
    int fig3_trials = 200;
    std::uint64_t fig3_seed = 1;
    FigCommon fig3_io;
    fig3->add_option("--k-list", fig3_k, "")->capture_default_str();
    fig3->add_option("--nb-list", fig3_nb, "")->capture_default_str();
    fig3->add_option("--rv", fig3_rv, "")->capture_default_str();
    fig3->add_option("--trials", fig3_trials, "")->capture_default_str();
    fig3->add_option("--seed", fig3_seed, "")->capture_default_str();
    add_fig_outputs(fig3, fig3_io);

    auto* fig4 = app.add_subcommand("fig4", "dispersion histograms across radii");
    std::vector<double> fig4_r = {16, 8, 4, 2, 1};
    int fig4_nb = 128, fig4_k = 35;
    std::uint64_t fig4_samples = 100000, fig4_seed = 1;
    FigCommon fig4_io;
    fig4->add_option("--r-list", fig4_r, "")->capture_default_str();
    fig4->add_option("--nb", fig4_nb, "")->capture_default_str();
    fig4->add_option("--k", fig4_k, "")->capture_default_str();
    fig4->add_option("--samples", fig4_samples, "")->capture_default_str();
    fig4->add_option("--seed", fig4_seed, "")->capture_default_str();
    add_fig_outputs(fig4, fig4_io);

    auto* fig5 = app.add_subcommand("fig5", "surrogate N_c surface with paired overlap");
    std::vector<int> fig5_k = {5, 10, 15, 20, 25, 30, 35, 40, 45};
    double fig5_rv = 0.33;
    int fig5_trials = 100;
    std::uint64_t fig5_seed = 1;
    FigCommon fig5_io;
    fig5->add_option("--k-list", fig5_k, "")->capture_default_str();
    fig5->add_option("--rv", fig5_rv, "")->capture_default_str();
    fig5->add_option("--trials", fig5_trials, "paired trials per overlap cell")
        ->capture_default_str();
    fig5->add_option("--seed", fig5_seed, "")->capture_default_str();
    add_fig_outputs(fig5, fig5_io);

    auto* fig6 = app.add_subcommand("fig6", "divergence-probability distributions");
    std::vector<int> fig6_k = {5, 15, 25, 35, 45};
    double fig6_rv = 0.33;
    std::uint64_t fig6_trials = 200000, fig6_samples = 100000, fig6_seed = 1;
    FigCommon fig6_io;
    fig6->add_option("--k-list", fig6_k, "")->capture_default_str();
    fig6->add_option("--rv", fig6_rv, "")->capture_default_str();
    fig6->add_option("--surrogate-trials", fig6_trials, "")->capture_default_str();
    fig6->add_option("--samples", fig6_samples, "histogram samples")->capture_default_str();
    fig6->add_option("--seed", fig6_seed, "")->capture_default_str();
    add_fig_outputs(fig6, fig6_io);

    auto* fig7 = app.add_subcommand("fig7", "demon-of-determinism ladder");
    std::int64_t fig7_pi = 40, fig7_pc = 10;
    std::vector<std::int64_t> fig7_nb = {200, 500, 1000, 2000, 5000};
    std::vector<std::int64_t> fig7_nc;  // default: the illustrative ladder 10..6
    double fig7_a = 0.0, fig7_b = 0.0, fig7_c = 0.0;
    FigCommon fig7_io;
    fig7->add_option("--pi", fig7_pi, "")->capture_default_str();
    fig7->add_option("--pc", fig7_pc, "")->capture_default_str();
    fig7->add_option("--nb-list", fig7_nb, "")->capture_default_str();
    fig7->add_option("--nc-list", fig7_nc, "explicit N_c per N_b (else fit or ladder)");
    auto* fig7_fa = fig7->add_option("--fit-a", fig7_a, "derive N_c from this scaling fit");
    fig7->add_option("--fit-b", fig7_b, "");
    fig7->add_option("--fit-c", fig7_c, "");
    add_fig_outputs(fig7, fig7_io);

    auto* fig8 = app.add_subcommand("fig8", "paradox frontier in the (P_i, N_b) plane");
    std::vector<std::int64_t> fig8_pc = {5, 10, 20};
    std::int64_t fig8_pi_min = 12, fig8_pi_max = 60, fig8_pi_step = 4;
    double fig8_a = 2.8, fig8_b = 0.21, fig8_c = -0.35;
    FigCommon fig8_io;
    fig8->add_option("--pc-list", fig8_pc, "")->capture_default_str();
    fig8->add_option("--pi-min", fig8_pi_min, "")->capture_default_str();
    fig8->add_option("--pi-max", fig8_pi_max, "")->capture_default_str();
    fig8->add_option("--pi-step", fig8_pi_step, "")->capture_default_str();
    fig8->add_option("--fit-a", fig8_a, "")->capture_default_str();
    fig8->add_option("--fit-b", fig8_b, "")->capture_default_str();
    fig8->add_option("--fit-c", fig8_c, "")->capture_default_str();
    add_fig_outputs(fig8, fig8_io);

    CLI11_PARSE(app, argc, argv);

    try {
        // ---- simulate ------------------------------------------------------
        if (sim->parsed()) {
            ExperimentConfig cfg;
            cfg.boundary = boundary_from_string(sim_boundary);
            cfg.k_list = {sim_k};
            cfg.nb_list = {sim_nb};
            if (sim_radius > 0.0) cfg.r_list = {sim_radius};
            else cfg.void_ratio = sim_rv;
            cfg.trials = sim_trials;
            cfg.seed = sim_seed;
            cfg.max_shocks_per_ball = sim_max_shocks;
            cfg.count_wall_shocks = sim_wall_shocks;
            cfg.record_traces = sim_trace;
            cfg.workers = workers;
            cfg.validate();

            CsvWriter csv;
            echo_config_meta(csv, cfg);
            csv.header({"trial", "seed", "k", "n_balls", "radius", "termination", "nc",
                        "matched_shocks", "divergence_ball", "divergence_ball_shocks",
                        "wall_shocks", "stop_time"});
            const double radius = cell_radius(cfg, sim_nb);
            double nc_sum = 0.0;
            int diverged = 0;
            std::vector<TrialRecord> recs(sim_trials);
            parallel_for(sim_trials, resolve_workers(workers), [&](int t) {
                recs[t] = run_trial(cfg, sim_k, sim_nb, radius, t);
            });
            for (int t = 0; t < sim_trials; ++t) {
                const TrialRecord& rec = recs[t];
                if (rec.termination == Termination::diverged) {
                    nc_sum += rec.nc;
                    diverged += 1;
                }
                csv.row({std::to_string(t), std::to_string(rec.seed), std::to_string(sim_k),
                         std::to_string(sim_nb), format_double(radius), cause_name(rec),
                         format_double(rec.nc), std::to_string(rec.matched_shocks),
                         std::to_string(rec.divergence_ball),
                         std::to_string(rec.divergence_ball_own_shocks),
                         std::to_string(rec.wall_shocks), format_double(rec.stop_time)});
            }
            if (!sim_out.empty()) csv.write_file(sim_out);
            std::printf("trials = %d diverged = %d mean_nc = %s\n", sim_trials, diverged,
                        diverged ? format_double(nc_sum / diverged).c_str() : "n/a");
            return 0;
        }

        // ---- sweep ---------------------------------------------------------
        if (swp->parsed()) {
            ExperimentConfig cfg;
            cfg.boundary = boundary_from_string(swp_boundary);
            cfg.k_list = swp_k;
            cfg.nb_list = swp_nb;
            cfg.r_list = swp_r;
            cfg.void_ratio = swp_rv;
            cfg.trials = swp_trials;
            cfg.seed = swp_seed;
            cfg.max_shocks_per_ball = swp_max_shocks;
            cfg.count_wall_shocks = swp_wall_shocks;
            cfg.workers = workers;
            SweepResult result = run_sweep(cfg);
            result.to_csv().write_file(swp_out);
            std::printf("cells = %zu -> %s\n", result.cells.size(), swp_out.c_str());
            return 0;
        }

        // ---- dispersion ----------------------------------------------------
        if (dsp->parsed()) {
            DispersionRunConfig dc;
            dc.table.side = 4096.0;
            dc.table.n_balls = dsp_nb;
            dc.table.radius =
                dsp_radius > 0.0 ? dsp_radius : radius_for_void_ratio(dsp_rv, dsp_nb, 4096.0);
            dc.perturbation.epsilon_exp = dsp_k;
            dc.perturbation.sign_seed = hash_combine(dsp_seed, 1);
            dc.n_samples_target = dsp_samples;
            // shard across workers, merge associatively
            const int shards = resolve_workers(workers);
            std::vector<DispersionHistogram> parts(shards);
            parallel_for(shards, shards, [&](int s) {
                DispersionRunConfig shard_cfg = dc;
                shard_cfg.n_samples_target = (dsp_samples + shards - 1) / shards;
                parts[s] = collect_dispersion(shard_cfg, hash_combine(dsp_seed, 100 + s));
            });
            DispersionHistogram h = parts[0];
            for (int s = 1; s < shards; ++s) h.merge(parts[s]);
            h.void_ratio = dc.table.void_ratio();
            h.radius = dc.table.radius;
            h.n_balls = dsp_nb;
            h.epsilon_exp = dsp_k;
            CsvWriter csv = histogram_csv(h);
            csv.write_file(dsp_out);
            if (!dsp_svg.empty()) {
                SvgPlot plot("velocity dispersion histogram", "A_n bin", "log2(count + 1)");
                std::vector<double> xs, ys;
                for (int i = 0; i < DispersionHistogram::kBins; ++i) {
                    xs.push_back(i);
                    ys.push_back(std::log2(double(h.bin(i)) + 1.0));
                }
                plot.add_series("R = " + format_double(h.radius), xs, ys);
                plot.write_file(dsp_svg);
            }
            std::printf("samples = %llu mode = %d mean_ratio = %s -> %s\n",
                        static_cast<unsigned long long>(h.total()), h.mode_bin(),
                        format_double(h.mean_out_in_ratio()).c_str(), dsp_out.c_str());
            return 0;
        }

        // ---- two-ball ------------------------------------------------------
        if (twb->parsed()) {
            auto grid = make_grid(twb_lo, twb_hi, twb_step);
            TwoBallOutputs out = run_two_ball_pipeline(
                twb_k, grid, twb_hist, twb_rv, twb_hist_nb, twb_samples, twb_calib_k,
                twb_calib_nb, twb_calib_trials, twb_trials, twb_seed, resolve_workers(workers));
            CsvWriter csv = surface_csv(out, twb_seed);
            csv.write_file(twb_out);
            if (!twb_svg.empty()) {
                SvgPlot plot("two-ball surrogate N_c surface", "log2(N_b)", "N_c");
                for (const auto& st : out.per_k) {
                    std::vector<double> xs, ys;
                    for (const auto& c : out.cells)
                        if (c.epsilon_exp == st.epsilon_exp) {
                            xs.push_back(c.log2_nb);
                            ys.push_back(c.nc_mean);
                        }
                    plot.add_series("k = " + std::to_string(st.epsilon_exp), xs, ys);
                }
                plot.write_file(twb_svg);
            }
            std::printf("surface cells = %zu bridge: log2 g = %s + %s log2(Nb) (rms %s)\n",
                        out.cells.size(), format_double(out.calibration.gamma0).c_str(),
                        format_double(out.calibration.gamma1).c_str(),
                        format_double(out.calibration.rms_error).c_str());
            return 0;
        }

        // ---- fit -----------------------------------------------------------
        if (fit_cmd->parsed()) {
            auto pts = load_sweep_csv(fit_in, !fit_unweighted);
            ScalingFit fit = fit_scaling(pts);
            if (fit_out_txt.empty()) {
                print_fit(fit, std::cout);
            } else {
                std::ofstream f(fit_out_txt);
                print_fit(fit, f);
            }
            for (double k : fit_crossing_k) {
                auto x = axis_crossing(fit, k);
                if (x)
                    std::printf("crossing_k%g = %s +- %s%s\n", k,
                                format_double(x->log2_nb).c_str(),
                                format_double(x->stderr_log2_nb).c_str(),
                                x->extrapolated ? " (extrapolated)" : "");
                else
                    std::printf("crossing_k%g = none (C >= 0)\n", k);
            }
            if (!fit_out_csv.empty()) {
                CsvWriter csv;
                csv.meta("artifact", "twinbilliard");
                csv.meta("kind", "scaling_fit");
                csv.meta("source", fit_in);
                csv.header({"a", "b", "c", "se_a", "se_b", "se_c", "residual_rms", "n_points"});
                csv.row({format_double(fit.a), format_double(fit.b), format_double(fit.c),
                         format_double(fit.se_a), format_double(fit.se_b),
                         format_double(fit.se_c), format_double(fit.residual_rms),
                         std::to_string(fit.n_points)});
                csv.write_file(fit_out_csv);
            }
            return 0;
        }

        // ---- demon ---------------------------------------------------------
        if (dem->parsed()) {
            if (dem_nc > 0) {
                const DemonVerdict v = demon_condition(dem_pi, dem_pc, dem_nc);
                std::printf("verdict = %s (trajectory %lld bits vs initial %lld bits)\n",
                            to_string(v), static_cast<long long>(dem_nc * dem_pc),
                            static_cast<long long>(2 * dem_pi));
                return 0;
            }
            if (dem_fa->count() > 0) {
                ScalingFit fit;
                fit.a = dem_a;
                fit.b = dem_b;
                fit.c = dem_c;
                auto f = demon_frontier(dem_pi, dem_pc, fit);
                if (f)
                    std::printf("frontier: log2_nb = %s, smallest N_b = %llu\n",
                                format_double(f->log2_nb).c_str(),
                                static_cast<unsigned long long>(f->n_b));
                else
                    std::printf("frontier: none within N_b <= 2^64\n");
                return 0;
            }
            std::fprintf(stderr, "demon: give --nc for a verdict or --fit-a/b/c for the frontier\n");
            return 1;
        }

        // ---- fig2 ----------------------------------------------------------
        if (fig2->parsed()) {
            ExperimentConfig cfg;
            cfg.k_list = fig2_k;
            cfg.nb_list = {fig2_nb};
            cfg.void_ratio = fig2_rv;
            cfg.trials = 1;
            cfg.seed = fig2_seed;
            cfg.record_traces = true;
            cfg.workers = workers;
            SweepResult sweep = run_sweep(cfg);
            CsvWriter csv;
            echo_config_meta(csv, cfg);
            csv.header({"k", "shock_index", "mean_delta_p", "log2_mean_delta_p"});
            SvgPlot plot("pair separation growth", "matched shocks", "log2(mean delta_p)");
            for (std::size_t i = 0; i < sweep.trial_records.size(); ++i) {
                const TrialRecord& rec = sweep.trial_records[i];
                std::vector<double> xs, ys;
                for (std::size_t n = 0; n < rec.delta_p_trace.size(); ++n) {
                    csv.row({std::to_string(rec.perturbation.epsilon_exp), std::to_string(n + 1),
                             format_double(rec.delta_p_trace[n]),
                             format_double(std::log2(rec.delta_p_trace[n]))});
                    xs.push_back(double(n + 1));
                    ys.push_back(std::log2(rec.delta_p_trace[n]));
                }
                plot.add_series("k = " + std::to_string(rec.perturbation.epsilon_exp), xs, ys);
            }
            csv.write_file(fig2_io.out_csv);
            plot.write_file(fig2_io.out_svg);
            return 0;
        }

        // ---- fig3 ----------------------------------------------------------
        if (fig3->parsed()) {
            CsvWriter csv;
            SvgPlot plot("critical step vs ball count", "log2(N_b)", "mean N_c");
            csv.meta("artifact", "twinbilliard");
            csv.meta("kind", "fig3");
            csv.meta("seed", fig3_seed);
            csv.header({"boundary", "k", "n_balls", "log2_nb", "nc_mean", "nc_std", "trials",
                        "diverged"});
            for (Boundary mode : {Boundary::walls, Boundary::periodic}) {
                ExperimentConfig cfg;
                cfg.boundary = mode;
                cfg.k_list = fig3_k;
                cfg.nb_list = fig3_nb;
                cfg.void_ratio = fig3_rv;
                cfg.trials = fig3_trials;
                cfg.seed = fig3_seed;
                cfg.workers = workers;
                SweepResult sweep = run_sweep(cfg);
                for (int k : fig3_k) {
                    std::vector<double> xs, ys;
                    for (const auto& c : sweep.cells) {
                        if (c.epsilon_exp != k) continue;
                        csv.row({to_string(mode), std::to_string(k), std::to_string(c.n_balls),
                                 format_double(std::log2(double(c.n_balls))),
                                 format_double(c.nc_mean), format_double(c.nc_std),
                                 std::to_string(c.trials), std::to_string(c.diverged)});
                        xs.push_back(std::log2(double(c.n_balls)));
                        ys.push_back(c.nc_mean);
                    }
                    plot.add_series(std::string(mode == Boundary::walls ? "walls" : "periodic") +
                                        " k=" + std::to_string(k),
                                    xs, ys);
                }
            }
            csv.write_file(fig3_io.out_csv);
            plot.write_file(fig3_io.out_svg);
            return 0;
        }

        // ---- fig4 ----------------------------------------------------------
        if (fig4->parsed()) {
            CsvWriter csv;
            csv.meta("artifact", "twinbilliard");
            csv.meta("kind", "fig4");
            csv.meta("seed", fig4_seed);
            csv.meta("n_balls", std::uint64_t(fig4_nb));
            csv.header({"radius", "void_ratio", "bin", "a_n_center", "count", "normalized",
                        "mean_out_in_ratio"});
            SvgPlot plot("velocity dispersion vs radius", "A_n bin", "log2(count + 1)");
            for (double r : fig4_r) {
                DispersionRunConfig dc;
                dc.table.side = 4096.0;
                dc.table.n_balls = fig4_nb;
                dc.table.radius = r;
                dc.perturbation.epsilon_exp = fig4_k;
                dc.perturbation.sign_seed = hash_combine(fig4_seed, 1);
                dc.n_samples_target = fig4_samples;
                const int shards = resolve_workers(workers);
                std::vector<DispersionHistogram> parts(shards);
                parallel_for(shards, shards, [&](int s) {
                    DispersionRunConfig shard_cfg = dc;
                    shard_cfg.n_samples_target = (fig4_samples + shards - 1) / shards;
                    parts[s] = collect_dispersion(
                        shard_cfg, hash_combine(hash_combine(fig4_seed, std::uint64_t(r * 1000)),
                                                s));
                });
                DispersionHistogram h = parts[0];
                for (int s = 1; s < shards; ++s) h.merge(parts[s]);
                std::vector<double> xs, ys;
                for (int i = 0; i < DispersionHistogram::kBins; ++i) {
                    csv.row({format_double(r), format_double(dc.table.void_ratio()),
                             std::to_string(i), format_double(double(i)),
                             std::to_string(h.bin(i)), format_double(h.normalized(i)),
                             format_double(h.mean_out_in_ratio())});
                    xs.push_back(i);
                    ys.push_back(std::log2(double(h.bin(i)) + 1.0));
                }
                plot.add_series("R = " + format_double(r), xs, ys);
            }
            csv.write_file(fig4_io.out_csv);
            plot.write_file(fig4_io.out_svg);
            return 0;
        }

        // ---- fig5 ----------------------------------------------------------
        if (fig5->parsed()) {
            auto grid = make_grid(3.0, 17.0, 0.5);
            std::vector<int> calib_nb = {16, 32, 64, 128};
            std::vector<int> calib_k = {15, 20, 25};
            TwoBallOutputs out = run_two_ball_pipeline(
                fig5_k, grid, "", fig5_rv, 64, 100000, calib_k, calib_nb, fig5_trials,
                200000, fig5_seed, resolve_workers(workers));
            CsvWriter csv = surface_csv(out, fig5_seed);
            csv.write_file(fig5_io.out_csv);
            SvgPlot plot("N_c vs log2(N_b) and -log2(eps)", "log2(N_b)", "N_c");
            for (const auto& st : out.per_k) {
                std::vector<double> xs, ys;
                for (const auto& c : out.cells)
                    if (c.epsilon_exp == st.epsilon_exp) {
                        xs.push_back(c.log2_nb);
                        ys.push_back(c.nc_mean);
                    }
                plot.add_series("surrogate k=" + std::to_string(st.epsilon_exp), xs, ys);
            }
            std::vector<double> pxs, pys;
            for (const auto& c : out.calib_sweep.cells)
                if (c.diverged > 0) {
                    pxs.push_back(std::log2(double(c.n_balls)));
                    pys.push_back(c.nc_mean);
                }
            plot.add_points("paired simulation", pxs, pys);
            plot.write_file(fig5_io.out_svg);
            return 0;
        }

        // ---- fig6 ----------------------------------------------------------
        if (fig6->parsed()) {
            DispersionRunConfig dc;
            dc.table.side = 4096.0;
            dc.table.n_balls = 64;
            dc.table.radius = radius_for_void_ratio(fig6_rv, 64, 4096.0);
            dc.perturbation.epsilon_exp = 35;
            dc.perturbation.sign_seed = hash_combine(fig6_seed, 1);
            dc.n_samples_target = fig6_samples;
            DispersionHistogram h = collect_dispersion(dc, hash_combine(fig6_seed, 2));
            RatioSampler sampler = RatioSampler::from_histogram(h);
            CsvWriter csv;
            csv.meta("artifact", "twinbilliard");
            csv.meta("kind", "fig6");
            csv.meta("seed", fig6_seed);
            csv.meta("hist_total", h.total());
            csv.header({"k", "n_shocks", "p_diverge", "log10_p_diverge"});
            SvgPlot plot("divergence probability after n shocks", "n shocks",
                         "log10(P_d)");
            for (int k : fig6_k) {
                SurrogateStats st = surrogate_nc(sampler, k, kDivergencePixels, fig6_trials,
                                                 hash_combine(fig6_seed, 0xf160 + k));
                std::vector<double> xs, ys;
                for (std::size_t n = 1; n < st.p_diverge.size(); ++n) {
                    if (st.p_diverge[n] <= 0.0) continue;
                    csv.row({std::to_string(k), std::to_string(n),
                             format_double(st.p_diverge[n]),
                             format_double(std::log10(st.p_diverge[n]))});
                    xs.push_back(double(n));
                    ys.push_back(std::log10(st.p_diverge[n]));
                }
                plot.add_series("k = " + std::to_string(k), xs, ys);
            }
            csv.write_file(fig6_io.out_csv);
            plot.write_file(fig6_io.out_svg);
            return 0;
        }

        // ---- fig7 ----------------------------------------------------------
        if (fig7->parsed()) {
            std::vector<std::int64_t> ncs = fig7_nc;
            if (ncs.empty()) {
                if (fig7_fa->count() > 0) {
                    for (std::int64_t nb : fig7_nb) {
                        const double pa = double(fig7_pi - fig7_pc);
                        const double v =
                            fig7_a + fig7_b * pa + fig7_c * std::log2(double(nb));
                        ncs.push_back(std::max<std::int64_t>(1, std::llround(v)));
                    }
                } else {
                    // the illustrative ladder of the original figure:
                    // N_c 10..6 as N_b walks 200 -> 5000
                    for (std::int64_t nb : fig7_nb)
                        ncs.push_back(std::max<std::int64_t>(
                            1, 18 - std::llround(std::log2(double(nb)))));
                }
            }
            if (ncs.size() != fig7_nb.size())
                throw std::invalid_argument("--nc-list must match --nb-list in length");
            CsvWriter csv;
            csv.meta("artifact", "twinbilliard");
            csv.meta("kind", "fig7");
            csv.meta("p_i", std::uint64_t(fig7_pi));
            csv.meta("p_c", std::uint64_t(fig7_pc));
            csv.header({"n_b", "n_c", "trajectory_bits", "initial_bits", "verdict"});
            SvgPlot plot("demon of determinism ladder", "log2(N_b)", "bits per coordinate");
            std::vector<double> xs, traj, init;
            for (std::size_t i = 0; i < fig7_nb.size(); ++i) {
                const DemonVerdict v = demon_condition(fig7_pi, fig7_pc, ncs[i]);
                csv.row({std::to_string(fig7_nb[i]), std::to_string(ncs[i]),
                         std::to_string(ncs[i] * fig7_pc), std::to_string(2 * fig7_pi),
                         to_string(v)});
                std::printf("N_b = %lld  N_c = %lld  trajectory = %lld bits  initial = %lld bits"
                            "  -> %s\n",
                            static_cast<long long>(fig7_nb[i]), static_cast<long long>(ncs[i]),
                            static_cast<long long>(ncs[i] * fig7_pc),
                            static_cast<long long>(2 * fig7_pi), to_string(v));
                xs.push_back(std::log2(double(fig7_nb[i])));
                traj.push_back(double(ncs[i] * fig7_pc));
                init.push_back(double(2 * fig7_pi));
            }
            plot.add_series("trajectory bits (N_c P_c)", xs, traj);
            plot.add_series("initial bits (2 P_i)", xs, init);
            csv.write_file(fig7_io.out_csv);
            plot.write_file(fig7_io.out_svg);
            return 0;
        }

        // ---- fig8 ----------------------------------------------------------
        if (fig8->parsed()) {
            ScalingFit fit;
            fit.a = fig8_a;
            fit.b = fig8_b;
            fit.c = fig8_c;
            CsvWriter csv;
            csv.meta("artifact", "twinbilliard");
            csv.meta("kind", "fig8");
            csv.meta("fit", format_double(fig8_a) + " + " + format_double(fig8_b) + " Pa + " +
                                format_double(fig8_c) + " log2(Nb)");
            csv.header({"p_c", "p_i", "log2_nb_frontier", "nc_at_frontier"});
            SvgPlot plot("paradox frontier", "P_i (bits)", "log2(N_b) at the frontier");
            for (std::int64_t pc : fig8_pc) {
                std::vector<double> xs, ys;
                for (std::int64_t pi = fig8_pi_min; pi <= fig8_pi_max; pi += fig8_pi_step) {
                    if (pi <= pc) continue;
                    auto f = demon_frontier(pi, pc, fit);
                    if (!f) continue;
                    const double nc_at = 2.0 * double(pi) / double(pc);
                    csv.row({std::to_string(pc), std::to_string(pi), format_double(f->log2_nb),
                             format_double(nc_at)});
                    xs.push_back(double(pi));
                    ys.push_back(f->log2_nb);
                }
                plot.add_points("P_c = " + std::to_string(pc), xs, ys);
            }
            csv.write_file(fig8_io.out_csv);
            plot.write_file(fig8_io.out_svg);
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
