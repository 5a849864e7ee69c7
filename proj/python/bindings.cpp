#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "billiard/dispersion.hpp"
#include "billiard/harness.hpp"
#include "billiard/info_metrics.hpp"
#include "billiard/scaling.hpp"
#include "billiard/two_ball.hpp"
#include "billiard/world.hpp"

namespace py = pybind11;
using namespace billiard;

namespace {

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::diverged: return "diverged";
        case Termination::max_shocks_reached: return "max_shocks_reached";
        default: return "numerical_abort";
    }
}

const char* cause_name(DivergenceCause c) {
    switch (c) {
        case DivergenceCause::separation: return "separation";
        case DivergenceCause::partner_mismatch: return "partner_mismatch";
        default: return "none";
    }
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "twin-billiard phase-information loss simulator";

    py::enum_<Boundary>(m, "Boundary")
        .value("walls", Boundary::walls)
        .value("periodic", Boundary::periodic);

    py::class_<TableConfig>(m, "TableConfig")
        .def(py::init<>())
        .def_readwrite("side", &TableConfig::side)
        .def_readwrite("radius", &TableConfig::radius)
        .def_readwrite("n_balls", &TableConfig::n_balls)
        .def_readwrite("boundary", &TableConfig::boundary)
        .def("void_ratio", &TableConfig::void_ratio)
        .def("validate", &TableConfig::validate);

    m.def("radius_for_void_ratio", &radius_for_void_ratio, py::arg("rv"), py::arg("n_balls"),
          py::arg("side") = 4096.0);

    py::class_<World>(m, "World")
        .def(py::init<const TableConfig&, std::uint64_t>(), py::arg("config"), py::arg("seed"))
        .def("advance", &World::advance)
        .def("time", &World::time)
        .def("kinetic_energy", &World::kinetic_energy)
        .def("ball_shock_total", &World::ball_shock_total)
        .def("wall_shock_total", &World::wall_shock_total)
        .def("positions", [](const World& w) {
            std::vector<std::pair<double, double>> out;
            for (int i = 0; i < w.size(); ++i) {
                const auto b = w.ball(i);
                out.emplace_back(b.pos.x, b.pos.y);
            }
            return out;
        })
        .def("velocities", [](const World& w) {
            std::vector<std::pair<double, double>> out;
            for (int i = 0; i < w.size(); ++i) {
                const auto b = w.ball(i);
                out.emplace_back(b.vel.x, b.vel.y);
            }
            return out;
        });

    m.def(
        "run_paired_trial",
        [](int k, int n_balls, double radius, std::uint64_t seed, const std::string& boundary,
           double max_shocks, bool count_wall_shocks) {
            TableConfig table;
            table.n_balls = n_balls;
            table.radius = radius;
            table.boundary = boundary_from_string(boundary);
            PerturbationSpec pert;
            pert.epsilon_exp = k;
            pert.sign_seed = hash_combine(seed, 1);
            PairedWorld pair = PairedWorld::make(table, pert, hash_combine(seed, 0));
            TrialRecord rec = pair.run_until_divergence(max_shocks, false, count_wall_shocks);
            py::dict out;
            out["nc"] = rec.nc;
            out["termination"] = termination_name(rec.termination);
            out["cause"] = cause_name(rec.cause);
            out["matched_shocks"] = rec.matched_shocks;
            out["divergence_ball"] = rec.divergence_ball;
            out["divergence_ball_shocks"] = rec.divergence_ball_own_shocks;
            return out;
        },
        py::arg("k"), py::arg("n_balls"), py::arg("radius"), py::arg("seed"),
        py::arg("boundary") = "walls", py::arg("max_shocks") = 200.0,
        py::arg("count_wall_shocks") = false,
        "run one twin-billiard trial to decorrelation");

    // info metrics
    py::class_<InfoBudget>(m, "InfoBudget")
        .def(py::init<>())
        .def_readwrite("dp_max", &InfoBudget::dp_max)
        .def_readwrite("dq_max", &InfoBudget::dq_max)
        .def_readwrite("dp", &InfoBudget::dp)
        .def_readwrite("dq", &InfoBudget::dq)
        .def_readwrite("h_quantum", &InfoBudget::h_quantum);
    m.def("info_det", &info_det);
    m.def("info_ind", &info_ind);
    m.def("info_total", &info_total);
    m.def("entropy_from_info", &entropy_from_info, py::arg("i_det"), py::arg("n_balls"),
          py::arg("k_boltzmann") = 1.0);
    m.def("billiard_information", [](const std::vector<double>& dps, double dp_max) {
        return billiard_information(dps, dp_max);
    });
    m.def("max_billiard_information", &max_billiard_information);
    m.def(
        "linear_loss_model",
        [](double n, double n_c, std::int64_t p_i, std::int64_t p_c, int n_balls) {
            return linear_loss_model(n, n_c, PrecisionBudget{p_i, p_c}, n_balls);
        },
        py::arg("n"), py::arg("n_c"), py::arg("p_i"), py::arg("p_c"), py::arg("n_balls"));
    m.def("demon_condition", [](std::int64_t pi, std::int64_t pc, std::int64_t nc) {
        return std::string(to_string(demon_condition(pi, pc, nc)));
    });
    m.def(
        "demon_frontier",
        [](std::int64_t pi, std::int64_t pc, double a, double b, double c) -> py::object {
            ScalingFit fit;
            fit.a = a;
            fit.b = b;
            fit.c = c;
            auto f = demon_frontier(pi, pc, fit);
            if (!f) return py::none();
            py::dict out;
            out["log2_nb"] = f->log2_nb;
            out["n_b"] = f->n_b;
            return out;
        },
        py::arg("p_i"), py::arg("p_c"), py::arg("fit_a"), py::arg("fit_b"), py::arg("fit_c"));

    // dispersion
    py::class_<DispersionHistogram>(m, "DispersionHistogram")
        .def(py::init<>())
        .def("record", [](DispersionHistogram& h, double in_diff, double out_diff) {
            h.record({in_diff, out_diff});
        })
        .def("merge", &DispersionHistogram::merge)
        .def("bins", [](const DispersionHistogram& h) {
            std::vector<std::uint64_t> out(DispersionHistogram::kBins);
            for (int i = 0; i < DispersionHistogram::kBins; ++i) out[i] = h.bin(i);
            return out;
        })
        .def("total", &DispersionHistogram::total)
        .def("degenerate_count", &DispersionHistogram::degenerate_count)
        .def("mode_bin", &DispersionHistogram::mode_bin)
        .def("mean_out_in_ratio", &DispersionHistogram::mean_out_in_ratio)
        .def("mean_log2_ratio", &DispersionHistogram::mean_log2_ratio)
        .def("mass_below", &DispersionHistogram::mass_below)
        .def("mass_above", &DispersionHistogram::mass_above);
    m.def("dispersion_coordinate", &dispersion_coordinate);
    m.def("ratio_from_coordinate", &ratio_from_coordinate);
    m.def(
        "collect_dispersion",
        [](int n_balls, double radius, int k, std::uint64_t samples, std::uint64_t seed) {
            DispersionRunConfig cfg;
            cfg.table.n_balls = n_balls;
            cfg.table.radius = radius;
            cfg.perturbation.epsilon_exp = k;
            cfg.perturbation.sign_seed = hash_combine(seed, 1);
            cfg.n_samples_target = samples;
            return collect_dispersion(cfg, seed);
        },
        py::arg("n_balls"), py::arg("radius"), py::arg("k"), py::arg("samples"),
        py::arg("seed"));
    py::class_<TriangleFit>(m, "TriangleFit")
        .def(py::init<>())
        .def_readwrite("peak", &TriangleFit::peak)
        .def_readwrite("s_up", &TriangleFit::s_up)
        .def_readwrite("s_down", &TriangleFit::s_down)
        .def_readonly("residual_rms", &TriangleFit::residual_rms);
    m.def("fit_triangle", &fit_triangle);
    m.def("invariance_check", [](const DispersionHistogram& a, const DispersionHistogram& b,
                                 double threshold) {
        auto rep = invariance_check(a, b, threshold);
        py::dict out;
        out["total_variation"] = rep.total_variation;
        out["pass"] = rep.pass;
        out["threshold"] = rep.threshold;
        return out;
    }, py::arg("a"), py::arg("b"), py::arg("threshold") = 0.05);

    // two-ball surrogate
    py::class_<RatioSampler>(m, "RatioSampler")
        .def_static("from_histogram", &RatioSampler::from_histogram)
        .def_static("from_triangle", &RatioSampler::from_triangle)
        .def_static("constant", &RatioSampler::constant)
        .def("mean_log2_ratio", &RatioSampler::mean_log2_ratio);
    m.def(
        "surrogate_nc",
        [](const RatioSampler& sampler, int k, std::uint64_t trials, std::uint64_t seed,
           double threshold) {
            SurrogateStats st = surrogate_nc(sampler, k, threshold, trials, seed);
            py::dict out;
            out["mean_steps"] = st.mean_steps;
            out["variance"] = st.variance;
            out["budget_exceeded"] = st.budget_exceeded;
            out["survival"] = st.survival;
            out["p_diverge"] = st.p_diverge;
            return out;
        },
        py::arg("sampler"), py::arg("k"), py::arg("trials"), py::arg("seed"),
        py::arg("threshold") = 1.0);

    // scaling fit
    py::class_<ScalingFit>(m, "ScalingFit")
        .def(py::init<>())
        .def_readwrite("a", &ScalingFit::a)
        .def_readwrite("b", &ScalingFit::b)
        .def_readwrite("c", &ScalingFit::c)
        .def_readonly("se_a", &ScalingFit::se_a)
        .def_readonly("se_b", &ScalingFit::se_b)
        .def_readonly("se_c", &ScalingFit::se_c)
        .def_readonly("residual_rms", &ScalingFit::residual_rms)
        .def("predict", &ScalingFit::predict);
    m.def("fit_scaling", [](const std::vector<std::tuple<double, double, double, double>>& rows) {
        std::vector<ScalingPoint> pts;
        for (const auto& [k, lognb, nc, w] : rows) pts.push_back({k, lognb, nc, w});
        return fit_scaling(pts);
    });
    m.def("axis_crossing", [](const ScalingFit& fit, double k) -> py::object {
        auto x = axis_crossing(fit, k);
        if (!x) return py::none();
        py::dict out;
        out["log2_nb"] = x->log2_nb;
        out["stderr"] = x->stderr_log2_nb;
        out["extrapolated"] = x->extrapolated;
        return out;
    });
    m.def("precision_tradeoff", &precision_tradeoff);

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
