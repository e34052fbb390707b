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

#ifndef CQBSIM_EXPERIMENTS_H
#define CQBSIM_EXPERIMENTS_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cqbsim/errors.h"
#include "cqbsim/io.h"

namespace cqbsim {

/// One experiment parameter. The default's JSON type (number, integer, string, bool)
/// is the parameter's type.
struct ParamDef {
    std::string name;
    Json default_value;
    std::string help;
};

struct ExperimentDef {
    std::string id;
    std::string help;
    bool stochastic = false;  ///< needs a seed
    std::vector<ParamDef> params;
};

/// scan2d, calibrate, rb, coherence, init, cz, compile.
const std::vector<ExperimentDef> &experiment_registry();
const ExperimentDef &find_experiment(const std::string &id);

struct ExperimentConfig {
    std::string experiment;
    std::string spec_path;
    Json params = Json::object();  ///< overrides by parameter name
    std::optional<uint64_t> seed;
    int workers = 1;
    std::string out_dir = ".";
    int shots = 0;
    bool noiseless = false;

    /// Unknown experiment, unknown or mistyped parameter, missing seed.
    void validate() const;
};

struct ManifestFile {
    std::string path;  ///< relative to the output directory
    std::string role;  ///< trace (CSV), report (JSON), config
};

struct ResultManifest {
    std::string experiment;
    std::string config_hash;
    std::vector<ManifestFile> files;
    double wall_clock_s = 0;
    Json summary = Json::object();

    Json to_json() const;
};

/// Every input that can change the outputs: experiment, seed, shots, noiseless, the
/// resolved parameters and the bytes of the spec and every referenced file. Worker count
/// and output directory are excluded because they do not change any output.
Json hashed_inputs(const ExperimentConfig &c);
std::string config_hash(const ExperimentConfig &c);

/// Runs the experiment and writes its files, config.json and manifest.json into out_dir.
ResultManifest run_experiment(const ExperimentConfig &c);

/// {"error": kind, "message": ..., "field": ...}
Json error_json(const CqbError &e);

}  // namespace cqbsim

#endif
