// Copyright 2026 The cqbsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON crosses the boundary as text; the Python package decodes it.

#include <optional>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cqbsim/calibration.h"
#include "cqbsim/device.h"
#include "cqbsim/errors.h"
#include "cqbsim/experiments.h"
#include "cqbsim/gates.h"
#include "cqbsim/protocols.h"

namespace py = pybind11;
using namespace cqbsim;

namespace {

ExperimentConfig make_config(const std::string &experiment, const std::string &spec, const std::string &params,
                             std::optional<uint64_t> seed, int workers, const std::string &out_dir, int shots,
                             bool noiseless) {
    ExperimentConfig c;
    c.experiment = experiment;
    c.spec_path = spec;
    c.params = Json::parse(params);
    c.seed = seed;
    c.workers = workers;
    c.out_dir = out_dir;
    c.shots = shots;
    c.noiseless = noiseless;
    return c;
}

}  // namespace

PYBIND11_MODULE(_cqbsim, m) {
    m.doc() = "cqbsim native core";

    static py::handle error = py::exception<CqbError>(m, "CqbError", PyExc_RuntimeError).release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const CqbError &e) {
            PyErr_SetString(error.ptr(), dump_json(error_json(e)).c_str());
        }
    });

    m.def("experiments", [] {
        std::vector<std::string> ids;
        for (const auto &d : experiment_registry()) {
            ids.push_back(d.id);
        }
        return ids;
    });

    m.def(
        "run_experiment",
        [](const std::string &experiment, const std::string &spec, const std::string &params,
           std::optional<uint64_t> seed, int workers, const std::string &out_dir, int shots, bool noiseless) {
            auto c = make_config(experiment, spec, params, seed, workers, out_dir, shots, noiseless);
            py::gil_scoped_release release;
            return dump_json(run_experiment(c).to_json());
        },
        py::arg("experiment"), py::arg("spec"), py::arg("params") = "{}", py::arg("seed") = py::none(),
        py::arg("workers") = 1, py::arg("out_dir") = ".", py::arg("shots") = 0, py::arg("noiseless") = false);

    m.def(
        "config_hash",
        [](const std::string &experiment, const std::string &spec, const std::string &params,
           std::optional<uint64_t> seed, int shots, bool noiseless) {
            return config_hash(make_config(experiment, spec, params, seed, 1, ".", shots, noiseless));
        },
        py::arg("experiment"), py::arg("spec"), py::arg("params") = "{}", py::arg("seed") = py::none(),
        py::arg("shots") = 0, py::arg("noiseless") = false);

    m.def("load_cqb_spec", [](const std::string &path) { return dump_json(cqb_spec_to_json(load_cqb_spec(path))); });

    m.def(
        "calibrate",
        [](const std::string &spec, int workers) {
            auto s = load_cqb_spec(spec);
            CalibrationOptions opt;
            opt.workers = workers;
            py::gil_scoped_release release;
            return dump_json(calibrated_gate_set_to_json(calibrate_gate_set(s, opt).gates));
        },
        py::arg("spec"), py::arg("workers") = 1);

    m.def(
        "single_pulse_excitation",
        [](const std::string &spec, double eps_p, double f_p) {
            return single_pulse_excitation(load_cqb_spec(spec), eps_p, f_p);
        },
        py::arg("spec"), py::arg("eps_p_hz"), py::arg("f_p_hz"));

    m.def("flux_noise_ratio", [](const std::string &spec) { return flux_noise_ratio(load_cqb_spec(spec)); });

    m.def("lz_excitation_probability", &lz_excitation_probability, py::arg("omega_hz"), py::arg("rate_hz_per_s"));
    m.def("simulate_lz_sweep", &simulate_lz_sweep, py::arg("omega_hz"), py::arg("rate_hz_per_s"),
          py::arg("span") = 0.0, py::arg("dt") = 0.0);

    m.def("clifford_compose", &clifford_compose);
    m.def("recovery_clifford", &recovery_clifford);
}
