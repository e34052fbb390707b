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

#include <cstdint>
#include <iostream>
#include <list>
#include <string>

#include "CLI11.hpp"
#include "cqbsim/errors.h"
#include "cqbsim/experiments.h"
#include "cqbsim/io.h"

using namespace cqbsim;

namespace {

struct ParamSlot {
    const ParamDef *def = nullptr;
    CLI::Option *opt = nullptr;
    double number = 0;
    int64_t integer = 0;
    std::string text;
    bool flag = false;

    Json value() const {
        const Json &d = def->default_value;
        if (d.is_number_float()) {
            return number;
        }
        if (d.is_number_integer()) {
            return integer;
        }
        if (d.is_string()) {
            return text;
        }
        return flag;
    }
};

std::string dashed(std::string s) {
    for (char &c : s) {
        if (c == '_') {
            c = '-';
        }
    }
    return s;
}

int fail(const Json &j, int code) {
    std::cerr << dump_json(j) << std::endl;
    return code;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"cqbsim: coupled-qubit control simulations"};
    app.require_subcommand(1);
    ExperimentConfig config;
    uint64_t seed = 0;
    auto *seed_opt = app.add_option("--seed", seed, "RNG seed (required by stochastic experiments)")
                         ->envname("CQBSIM_SEED");
    app.add_option("--spec", config.spec_path, "device spec JSON")->envname("CQBSIM_SPEC");
    app.add_option("--workers", config.workers, "worker threads")->envname("CQBSIM_WORKERS");
    app.add_option("--out", config.out_dir, "output directory")->envname("CQBSIM_OUT");
    app.add_option("--shots", config.shots, "binomial shots per probability (0 = exact)")->envname("CQBSIM_SHOTS");
    app.add_flag("--noiseless", config.noiseless, "disable every noise source")->envname("CQBSIM_NOISELESS");

    std::list<ParamSlot> slots;
    for (const auto &def : experiment_registry()) {
        auto *sub = app.add_subcommand(def.id, def.help);
        sub->fallthrough();
        for (const auto &p : def.params) {
            ParamSlot &s = slots.emplace_back();
            s.def = &p;
            std::string name = "--" + dashed(p.name);
            std::string help = p.help + " (default " + p.default_value.dump() + ")";
            const Json &d = p.default_value;
            if (d.is_number_float()) {
                s.opt = sub->add_option(name, s.number, help);
            } else if (d.is_number_integer()) {
                s.opt = sub->add_option(name, s.integer, help);
            } else if (d.is_string()) {
                s.opt = sub->add_option(name, s.text, help);
            } else {
                s.opt = sub->add_flag(name + ",!--no-" + dashed(p.name), s.flag, help);
            }
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        Json j;
        j["error"] = error_kind_name(ErrorKind::Config);
        j["message"] = e.what();
        return fail(j, static_cast<int>(ErrorKind::Config));
    }

    for (auto *sub : app.get_subcommands()) {
        config.experiment = sub->get_name();
    }
    for (const auto &s : slots) {
        if (s.opt->count() > 0) {
            config.params[s.def->name] = s.value();
        }
    }
    if (seed_opt->count() > 0) {
        config.seed = seed;
    }

    try {
        auto manifest = run_experiment(config);
        std::cout << dump_json(manifest.to_json()) << std::endl;
        return 0;
    } catch (const CqbError &e) {
        return fail(error_json(e), static_cast<int>(e.kind()));
    } catch (const std::exception &e) {
        Json j;
        j["error"] = "internal";
        j["message"] = e.what();
        return fail(j, 1);
    }
}
