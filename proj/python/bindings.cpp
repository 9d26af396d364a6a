#include "chuarc/chua.hpp"
#include "chuarc/config.hpp"
#include "chuarc/error.hpp"
#include "chuarc/experiment.hpp"
#include "chuarc/lwe.hpp"
#include "chuarc/pipeline.hpp"
#include "chuarc/readout.hpp"
#include "chuarc/tasks.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace chuarc;

namespace {

ExperimentConfig config_from(const std::string& json) { return json.empty() ? default_config() : parse_config(json); }

py::dict trace_dict(const Trace& t) {
    py::dict d;
    d["dt"] = t.dt;
    for (std::size_t k = 0; k < t.tap_names.size(); ++k) d[py::str(t.tap_names[k])] = t.channels[k];
    return d;
}

py::dict report_dict(const MetricsReport& r) {
    py::dict d;
    d["nmse"] = r.nmse;
    d["mean"] = r.mean;
    d["median"] = r.median;
    d["zero_targets"] = r.zero_targets;
    d["accuracy"] = r.accuracy ? py::cast(*r.accuracy) : py::none();
    d["confusion"] = r.confusion;
    d["n_train"] = r.n_train;
    d["n_validation"] = r.n_validation;
    d["runtime_s"] = r.runtime_s;
    d["config_digest"] = r.config_digest;
    return d;
}

}  // namespace

PYBIND11_MODULE(_chuarc, m) {
    m.doc() = "Chua-circuit reservoir computing core";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<InputDomainError>(m, "InputDomainError", base.ptr());
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<IntegrationError>(m, "IntegrationError", base.ptr());
    py::register_exception<GenerationError>(m, "GenerationError", base.ptr());

    m.def("diode_current", [](double v) { return diode_current(v, DiodePwl::kennedy()); }, py::arg("v"));

    m.def(
        "integrate",
        [](double t_end, double dt, double r_variable, std::size_t stride) {
            ChuaParams p;
            p.r_variable = r_variable;
            return trace_dict(integrate(p, CircuitState::initial(), nullptr, {t_end, dt, stride}));
        },
        py::arg("t_end"), py::arg("dt") = 1e-8, py::arg("r_variable") = 1920.0, py::arg("stride") = 1);

    m.def(
        "normalize",
        [](const std::vector<double>& x, double value_max, double v_min, double v_max) {
            ReservoirConfig c;
            c.value_max = value_max;
            c.v_min = v_min;
            c.v_max = v_max;
            return normalize(x, c);
        },
        py::arg("values"), py::arg("value_max"), py::arg("v_min") = 0.4, py::arg("v_max") = 1.0);

    m.def(
        "run_case",
        [](const std::vector<double>& raw, const std::string& config_json, double value_max) {
            ExperimentConfig cfg = config_from(config_json);
            const ReservoirConfig rc = cfg.resolved_reservoir(value_max);
            return run_case(raw, rc, cfg.circuit).values;
        },
        py::arg("raw"), py::arg("config_json") = "", py::arg("value_max") = 1.0);

    m.def(
        "train_readout",
        [](const std::vector<Eigen::MatrixXd>& states, const std::vector<Eigen::VectorXd>& teachers, bool bias,
           double offset, double lambda) {
            std::vector<StateMatrix> cases(states.size());
            for (std::size_t i = 0; i < states.size(); ++i) cases[i].values = states[i];
            return train_readout(cases, teachers, {bias, offset, lambda}).matrix;
        },
        py::arg("states"), py::arg("teachers"), py::arg("bias") = true, py::arg("offset") = 0.0,
        py::arg("lam") = 0.0);

    m.def(
        "predict",
        [](const Eigen::MatrixXd& weight, const Eigen::MatrixXd& states, double offset) {
            ReadoutWeight w;
            w.matrix = weight;
            w.offset = offset;
            StateMatrix x;
            x.values = states;
            return Eigen::VectorXd(predict(w, x));
        },
        py::arg("weight"), py::arg("states"), py::arg("offset") = 0.0);

    m.def(
        "nmse_case",
        [](const std::vector<double>& e, const std::vector<double>& t, double cap) { return nmse_case(e, t, cap); },
        py::arg("estimate"), py::arg("target"), py::arg("cap") = 1.0);

    m.def(
        "lwe_encrypt",
        [](const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b, int phi, std::int64_t q) {
            const lwe::Ciphertext c = lwe::encrypt_samples(a, b, phi, q);
            return py::make_tuple(c.u, c.v);
        },
        py::arg("a_samples"), py::arg("b_samples"), py::arg("phi"), py::arg("q"));

    m.def(
        "lwe_decrypt",
        [](std::int64_t u, std::int64_t v, std::int64_t s, std::int64_t q) {
            const lwe::Decryption d = lwe::decrypt_bit(u, v, s, q);
            return py::make_tuple(d.raw, d.bit);
        },
        py::arg("u"), py::arg("v"), py::arg("s"), py::arg("q"));

    m.def(
        "lwe_generate",
        [](std::size_t n_cases, std::uint64_t seed) {
            const lwe::LweDataset ds = lwe::generate_testcases(lwe::LweParams{}, n_cases, seed);
            py::list out;
            for (const auto& c : ds.cases) {
                py::dict d;
                d["phi"] = c.phi;
                d["a_samples"] = c.a_samples;
                d["b_samples"] = c.b_samples;
                d["u"] = c.u;
                d["v"] = c.v;
                d["decrypt_value"] = c.decrypt_value;
                out.append(d);
            }
            return out;
        },
        py::arg("n_cases"), py::arg("seed"));

    m.def(
        "make_dataset",
        [](const std::string& kind, std::size_t n_cases, std::uint64_t seed) {
            tasks::TaskSpec s;
            s.kind = tasks::parse_task_kind(kind);
            s.n_cases = n_cases;
            const tasks::Dataset ds = tasks::make_dataset(s, seed);
            py::dict d;
            d["inputs"] = ds.inputs;
            d["teachers"] = ds.teachers;
            d["labels"] = ds.labels;
            d["value_max"] = ds.value_max;
            return d;
        },
        py::arg("kind"), py::arg("n_cases"), py::arg("seed") = 1);

    m.def("polynomial_teacher", &tasks::polynomial_teacher, py::arg("x"));
    m.def("modulo_teacher", &tasks::modulo_teacher, py::arg("x"), py::arg("base") = 1.3);

    m.def(
        "canonical_config", [](const std::string& json) { return serialize_config(parse_config(json)); },
        py::arg("config_json"));
    m.def(
        "config_digest", [](const std::string& json) { return config_digest(parse_config(json)); },
        py::arg("config_json"));

    m.def(
        "run_experiment",
        [](const std::string& config_json, std::size_t jobs) {
            const ExperimentConfig cfg = config_from(config_json);
            ExperimentResult r;
            {
                py::gil_scoped_release release;
                r = run_experiment(cfg, {jobs, false});
            }
            return report_dict(r.report);
        },
        py::arg("config_json") = "", py::arg("jobs") = 1);
}
