#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <stdexcept>
#include <variant>

#include "aidaopt/runner.hpp"
#include "aidaopt/telemetry.hpp"

namespace py = pybind11;
using namespace aidaopt;

namespace {

std::vector<std::vector<double>> to_lists(const LayeredVector& v) {
    std::vector<std::vector<double>> out;
    out.reserve(v.layer_count());
    for (std::size_t l = 0; l < v.layer_count(); ++l) {
        auto layer = v.layer(l);
        out.emplace_back(layer.begin(), layer.end());
    }
    return out;
}

Activation activation_from(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "tanh") return Activation::tanh;
    throw std::invalid_argument("activation must be 'relu' or 'tanh'");
}

py::dict result_to_dict(const RunResult& r) {
    py::dict d;
    d["exit_code"] = r.exit_code;
    d["diverged"] = r.diverged;
    d["steps_completed"] = r.steps_completed;
    d["final_loss"] = r.final_loss;
    d["final_val_metric"] = r.final_val_metric;
    d["final_compactness"] = r.final_compactness;
    d["out_dir"] = r.out_dir.string();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Adaptive optimizers with layerwise stepsize telemetry";
    m.attr("__version__") = kArtifactVersion;

    py::class_<LayeredVector>(m, "LayeredVector")
        .def(py::init<const std::vector<std::vector<double>>&>(), py::arg("layers"))
        .def_property_readonly("shape", &LayeredVector::shape)
        .def_property_readonly("dim", &LayeredVector::dim)
        .def_property_readonly("layer_count", &LayeredVector::layer_count)
        .def("layers", &to_lists)
        .def_static("zeros", &LayeredVector::zeros, py::arg("shape"));

    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream") = 0)
        .def("uniform", py::overload_cast<double, double>(&Rng::uniform), py::arg("a"),
             py::arg("b"))
        .def("gaussian", &Rng::gaussian, py::arg("mean"), py::arg("stddev"))
        .def("split", &Rng::split, py::arg("stream"));

    m.def(
        "make_params",
        [](const std::vector<std::size_t>& shape, const std::string& init, double a, double b,
           Rng& rng) {
            InitSpec spec;
            if (init == "zeros") {
                spec = InitSpec::Zeros();
            } else if (init == "constant") {
                spec = InitSpec::Constant(a);
            } else if (init == "uniform") {
                spec = InitSpec::Uniform(a, b);
            } else if (init == "gaussian") {
                spec = InitSpec::Gaussian(a, b);
            } else {
                throw std::invalid_argument("init must be zeros/constant/uniform/gaussian");
            }
            return make_params(shape, spec, rng);
        },
        py::arg("shape"), py::arg("init") = "zeros", py::arg("a") = 0.0, py::arg("b") = 0.0,
        py::arg("rng"));

    py::class_<HyperParams>(m, "HyperParams")
        .def(py::init<>())
        .def_readwrite("beta1", &HyperParams::beta1)
        .def_readwrite("beta2", &HyperParams::beta2)
        .def_readwrite("eps", &HyperParams::eps)
        .def_readwrite("xi", &HyperParams::xi)
        .def_readwrite("projections", &HyperParams::projections)
        .def_readwrite("weight_decay", &HyperParams::weight_decay)
        .def_readwrite("hb_alpha", &HyperParams::hb_alpha)
        .def_readwrite("hb_beta", &HyperParams::hb_beta)
        .def_readwrite("hb_gamma", &HyperParams::hb_gamma)
        .def_property(
            "decay_mode",
            [](const HyperParams& hp) {
                return hp.decay_mode == DecayMode::coupled ? "coupled" : "decoupled";
            },
            [](HyperParams& hp, const std::string& mode) {
                if (mode == "coupled") {
                    hp.decay_mode = DecayMode::coupled;
                } else if (mode == "decoupled") {
                    hp.decay_mode = DecayMode::decoupled;
                } else {
                    throw std::invalid_argument("decay_mode must be coupled or decoupled");
                }
            });

    py::class_<Schedule>(m, "Schedule")
        .def(py::init<>())
        .def_readwrite("base_lr", &Schedule::base_lr)
        .def_readwrite("milestones", &Schedule::milestones);
    m.def("lr_at", &lr_at, py::arg("schedule"), py::arg("t"));

    py::class_<OptimizerState>(m, "OptimizerState")
        .def_readonly("t", &OptimizerState::t)
        .def_property_readonly("m", [](const OptimizerState& s) { return to_lists(s.m); })
        .def_property_readonly("second_moment_size", [](const OptimizerState& s) {
            if (const auto* em = std::get_if<ElementwiseMoment>(&s.second)) {
                return em->v.dim();
            }
            if (const auto* pm = std::get_if<PerLayerMoment>(&s.second)) {
                return pm->q.size();
            }
            return std::size_t{0};
        });

    py::class_<Optimizer>(m, "Optimizer")
        .def_property_readonly("id", [](const Optimizer& o) { return std::string(o.id()); })
        .def("init_state", &Optimizer::init_state, py::arg("params"))
        .def("step", &Optimizer::step, py::arg("params"), py::arg("grad"), py::arg("state"),
             py::arg("lr"));

    m.def("optimizer_ids", [] {
        std::vector<std::string> ids;
        for (auto id : optimizer_ids()) ids.emplace_back(id);
        return ids;
    });
    m.def("make_optimizer", &make_optimizer, py::arg("id"), py::arg("hp") = HyperParams{});

    m.def(
        "project_pair",
        [](const std::vector<double>& mv, const std::vector<double>& gv, int k, double xi) {
            return project_pair(mv, gv, k, xi);
        },
        py::arg("m"), py::arg("g"), py::arg("k") = 1, py::arg("xi") = 1e-20);

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("rows", &Dataset::rows)
        .def_readonly("cols", &Dataset::cols)
        .def_readonly("classes", &Dataset::classes)
        .def_readonly("features", &Dataset::features)
        .def_readonly("labels", &Dataset::labels)
        .def_readonly("split", &Dataset::split);
    m.def("synth_gaussian_classes", &synth_gaussian_classes, py::arg("n_per_class"),
          py::arg("classes"), py::arg("dim"), py::arg("separation"), py::arg("rng"));
    m.def("load_idx", &load_idx, py::arg("images_path"), py::arg("labels_path"));
    m.def("split_train_val", &split_train_val, py::arg("data"), py::arg("val_fraction"));

    py::class_<Objective>(m, "Objective")
        .def_property_readonly("name", &Objective::name)
        .def_property_readonly("shape", &Objective::shape)
        .def("eval", &Objective::eval, py::arg("params"))
        .def("gradient", &Objective::gradient, py::arg("params"))
        .def("init_params", &Objective::init_params, py::arg("rng"));

    py::class_<QuadraticObjective, Objective>(m, "QuadraticObjective")
        .def(py::init<std::vector<std::vector<double>>>(), py::arg("diagonal_blocks"));
    m.def(
        "quadratic_objective",
        [](const std::vector<std::pair<std::size_t, double>>& blocks, Rng& rng) {
            std::vector<QuadraticBlock> bs;
            for (const auto& [dim, cond] : blocks) bs.push_back({dim, cond});
            return quadratic_objective(bs, rng);
        },
        py::arg("blocks"), py::arg("rng"));

    py::class_<RosenbrockObjective, Objective>(m, "RosenbrockObjective")
        .def(py::init<std::size_t>(), py::arg("n"));

    py::class_<MlpObjective, Objective>(m, "MlpObjective")
        .def(py::init([](const std::vector<std::size_t>& sizes, const std::string& activation,
                         const Dataset& data) {
                 return MlpObjective(sizes, activation_from(activation), data);
             }),
             py::arg("layer_sizes"), py::arg("activation"), py::arg("data"))
        .def("accuracy", &MlpObjective::accuracy, py::arg("params"), py::arg("data"));

    m.def("finite_diff_grad", &finite_diff_grad, py::arg("objective"), py::arg("params"),
          py::arg("h") = 1e-5);

    py::class_<LayerStats>(m, "LayerStats")
        .def_readonly("layer", &LayerStats::layer)
        .def_readonly("mean_stepsize", &LayerStats::mean_stepsize)
        .def_readonly("std_stepsize", &LayerStats::std_stepsize);
    py::class_<StepStats>(m, "StepStats")
        .def_readonly("step", &StepStats::step)
        .def_readonly("layers", &StepStats::layers)
        .def_readonly("compactness", &StepStats::compactness)
        .def_readonly("spread", &StepStats::spread);
    m.def("stepsize_stats", &stepsize_stats, py::arg("state"), py::arg("hp"), py::arg("t"),
          py::arg("optimizer_id"));

    m.def(
        "run_json",
        [](const std::string& text) {
            const RunConfig config = parse_config_text(text, "<json>");
            return result_to_dict(config.compare.empty() ? run(config) : compare(config));
        },
        py::arg("config_json"),
        "Execute a run (or comparison) described by a JSON config string");
    m.def(
        "run_config_file",
        [](const std::string& path) {
            const RunConfig config = load_config(path);
            return result_to_dict(config.compare.empty() ? run(config) : compare(config));
        },
        py::arg("path"), "Execute a run described by an INI or JSON config file");

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<IdxError>(m, "IdxError");
}
