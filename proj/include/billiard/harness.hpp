#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "billiard/csv.hpp"
#include "billiard/paired.hpp"

namespace billiard {

// Full sweep description. Cells are the cartesian product of the epsilon
// exponents, ball counts and radii; a fixed void ratio replaces the radius
// list by computing R per ball count.
struct ExperimentConfig {
    double side = 4096.0;
    Boundary boundary = Boundary::walls;
    std::vector<int> k_list = {35};
    std::vector<int> nb_list = {128};
    std::vector<double> r_list;      // explicit radii; empty -> void_ratio mode
    double void_ratio = 0.33;        // used when r_list is empty
    int trials = 200;
    double max_shocks_per_ball = 200.0;
    std::uint64_t seed = 1;
    bool count_wall_shocks = false;
    bool record_traces = false;
    int workers = 0;  // 0: TWINBILLIARD_WORKERS env var, else hardware concurrency

    void validate() const;
    // canonical key = value echo; also the config-hash input
    std::string canonical() const;
};

struct SweepCell {
    int epsilon_exp = 0;
    int n_balls = 0;
    double radius = 0.0;
    Boundary boundary = Boundary::walls;
    double void_ratio = 0.0;

    int trials = 0;
    int diverged = 0;
    int max_shocks_reached = 0;
    int aborted = 0;  // numerical aborts and placement failures
    int cause_separation = 0;
    int cause_partner_mismatch = 0;

    // per-trial mean over diverged trials, and its std
    double nc_mean = 0.0;
    double nc_std = 0.0;
    // pooled over all completed trials, budget-capped ones at their cap value
    double nc_pooled_all = 0.0;
    double mean_divergence_ball_shocks = 0.0;
};

struct SweepResult {
    ExperimentConfig config;
    std::uint64_t config_hash = 0;
    std::vector<SweepCell> cells;
    std::vector<TrialRecord> trial_records;  // kept when config.record_traces

    CsvWriter to_csv() const;
};

// Stable per-trial seed: mixes the master seed with the cell coordinates and
// trial index, so shard order and worker count cannot change any stream.
std::uint64_t derive_trial_seed(std::uint64_t master, int epsilon_exp, int n_balls,
                                double radius, int boundary, int trial);

// One paired trial at explicit cell coordinates.
TrialRecord run_trial(const ExperimentConfig& config, int epsilon_exp, int n_balls,
                      double radius, int trial_index);

SweepResult run_sweep(const ExperimentConfig& config);

// Index-sharded parallel map with no shared mutable state between tasks.
void parallel_for(int n_tasks, int workers, const std::function<void(int)>& fn);

int resolve_workers(int requested); // flag > env TWINBILLIARD_WORKERS > hardware

} // namespace billiard
