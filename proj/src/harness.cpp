#include "billiard/harness.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace billiard {

void ExperimentConfig::validate() const {
    if (k_list.empty() || nb_list.empty())
        throw std::invalid_argument("sweep grids must be non-empty");
    for (int k : k_list) PerturbationSpec{k, 0}.validate();
    for (int nb : nb_list)
        if (nb < 2) throw std::invalid_argument("ball counts must be >= 2");
    if (r_list.empty() && !(void_ratio > 0.0 && void_ratio < 0.9))
        throw std::invalid_argument("void ratio must lie in (0, 0.9)");
    if (trials < 1) throw std::invalid_argument("need at least one trial per cell");
    if (!(max_shocks_per_ball > 0.0))
        throw std::invalid_argument("max shocks budget must be positive");
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream out;
    out << "side = " << format_double(side) << "\n";
    out << "boundary = " << to_string(boundary) << "\n";
    out << "k_list =";
    for (int k : k_list) out << " " << k;
    out << "\nnb_list =";
    for (int nb : nb_list) out << " " << nb;
    out << "\n";
    if (r_list.empty()) {
        out << "void_ratio = " << format_double(void_ratio) << "\n";
    } else {
        out << "r_list =";
        for (double r : r_list) out << " " << format_double(r);
        out << "\n";
    }
    out << "trials = " << trials << "\n";
    out << "max_shocks_per_ball = " << format_double(max_shocks_per_ball) << "\n";
    out << "seed = " << seed << "\n";
    out << "count_wall_shocks = " << (count_wall_shocks ? 1 : 0) << "\n";
    out << "record_traces = " << (record_traces ? 1 : 0) << "\n";
    return out.str();
}

std::uint64_t derive_trial_seed(std::uint64_t master, int epsilon_exp, int n_balls,
                                double radius, int boundary, int trial) {
    std::uint64_t h = splitmix64(master);
    h = hash_combine(h, static_cast<std::uint64_t>(epsilon_exp));
    h = hash_combine(h, static_cast<std::uint64_t>(n_balls));
    h = hash_combine(h, std::bit_cast<std::uint64_t>(radius));
    h = hash_combine(h, static_cast<std::uint64_t>(boundary));
    h = hash_combine(h, static_cast<std::uint64_t>(trial));
    return h;
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TWINBILLIARD_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void parallel_for(int n_tasks, int workers, const std::function<void(int)>& fn) {
    workers = std::min(workers, n_tasks);
    if (workers <= 1) {
        for (int i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

TrialRecord run_trial(const ExperimentConfig& config, int epsilon_exp, int n_balls,
                      double radius, int trial_index) {
    TableConfig table;
    table.side = config.side;
    table.boundary = config.boundary;
    table.n_balls = n_balls;
    table.radius = radius;

    const std::uint64_t trial_seed = derive_trial_seed(
        config.seed, epsilon_exp, n_balls, radius, static_cast<int>(config.boundary),
        trial_index);
    PerturbationSpec pert;
    pert.epsilon_exp = epsilon_exp;
    pert.sign_seed = hash_combine(trial_seed, 1);

    TrialRecord rec;
    try {
        PairedWorld pair = PairedWorld::make(table, pert, hash_combine(trial_seed, 0));
        rec = pair.run_until_divergence(config.max_shocks_per_ball, config.record_traces,
                                        config.count_wall_shocks);
    } catch (const PlacementError&) {
        rec.termination = Termination::numerical_abort;
        rec.config = table;
    }
    rec.seed = trial_seed;
    rec.perturbation = pert;
    return rec;
}

SweepResult run_sweep(const ExperimentConfig& config) {
    config.validate();

    struct CellCoord {
        int k;
        int nb;
        double r;
    };
    std::vector<CellCoord> coords;
    for (int k : config.k_list)
        for (int nb : config.nb_list) {
            if (config.r_list.empty()) {
                coords.push_back({k, nb, radius_for_void_ratio(config.void_ratio, nb, config.side)});
            } else {
                for (double r : config.r_list) coords.push_back({k, nb, r});
            }
        }

    const int trials = config.trials;
    const int n_tasks = static_cast<int>(coords.size()) * trials;
    std::vector<TrialRecord> records(n_tasks);
    const int workers = resolve_workers(config.workers);
    parallel_for(n_tasks, workers, [&](int task) {
        const CellCoord& c = coords[task / trials];
        records[task] = run_trial(config, c.k, c.nb, c.r, task % trials);
    });

    SweepResult result;
    result.config = config;
    result.config_hash = config_hash(config.canonical());
    // sequential aggregation in task order keeps the output byte-identical
    // for any worker count
    for (std::size_t ci = 0; ci < coords.size(); ++ci) {
        SweepCell cell;
        cell.epsilon_exp = coords[ci].k;
        cell.n_balls = coords[ci].nb;
        cell.radius = coords[ci].r;
        cell.boundary = config.boundary;
        {
            TableConfig t;
            t.side = config.side;
            t.radius = cell.radius;
            t.n_balls = cell.n_balls;
            cell.void_ratio = t.void_ratio();
        }
        cell.trials = trials;
        double sum = 0.0, sum2 = 0.0, pooled = 0.0, div_shocks = 0.0;
        int completed = 0;
        for (int t = 0; t < trials; ++t) {
            const TrialRecord& rec = records[ci * trials + t];
            switch (rec.termination) {
                case Termination::diverged: {
                    cell.diverged += 1;
                    sum += rec.nc;
                    sum2 += rec.nc * rec.nc;
                    pooled += rec.nc;
                    completed += 1;
                    div_shocks += static_cast<double>(rec.divergence_ball_own_shocks);
                    if (rec.cause == DivergenceCause::separation) cell.cause_separation += 1;
                    else cell.cause_partner_mismatch += 1;
                    break;
                }
                case Termination::max_shocks_reached:
                    cell.max_shocks_reached += 1;
                    pooled += rec.nc;
                    completed += 1;
                    break;
                case Termination::numerical_abort:
                    cell.aborted += 1;
                    break;
            }
        }
        if (cell.diverged > 0) {
            cell.nc_mean = sum / cell.diverged;
            cell.nc_std = std::sqrt(std::max(0.0, sum2 / cell.diverged - cell.nc_mean * cell.nc_mean));
            cell.mean_divergence_ball_shocks = div_shocks / cell.diverged;
        }
        if (completed > 0) cell.nc_pooled_all = pooled / completed;
        result.cells.push_back(cell);
    }
    if (config.record_traces) result.trial_records = std::move(records);
    return result;
}

CsvWriter SweepResult::to_csv() const {
    CsvWriter csv;
    csv.meta("artifact", "twinbilliard");
    csv.meta("config_hash", hash_hex(config_hash));
    csv.meta("seed", static_cast<std::uint64_t>(config.seed));
    std::istringstream echo(config.canonical());
    for (std::string line; std::getline(echo, line);) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos)
            csv.meta("config." + line.substr(0, eq), line.substr(eq + 3));
    }
    csv.header({"k", "n_balls", "radius", "void_ratio", "boundary", "trials", "diverged",
                "max_shocks_reached", "aborted", "cause_separation", "cause_partner_mismatch",
                "nc_mean", "nc_std", "nc_pooled_all", "mean_divergence_ball_shocks"});
    for (const auto& c : cells) {
        csv.row({std::to_string(c.epsilon_exp), std::to_string(c.n_balls),
                 format_double(c.radius), format_double(c.void_ratio),
                 to_string(c.boundary), std::to_string(c.trials), std::to_string(c.diverged),
                 std::to_string(c.max_shocks_reached), std::to_string(c.aborted),
                 std::to_string(c.cause_separation), std::to_string(c.cause_partner_mismatch),
                 format_double(c.nc_mean), format_double(c.nc_std),
                 format_double(c.nc_pooled_all),
                 format_double(c.mean_divergence_ball_shocks)});
    }
    return csv;
}

} // namespace billiard
