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

#include "cqbsim/experiments.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>

#include "cqbsim/benchmarking.h"
#include "cqbsim/calibration.h"
#include "cqbsim/device.h"
#include "cqbsim/gates.h"
#include "cqbsim/noise.h"
#include "cqbsim/parallel.h"
#include "cqbsim/propagator.h"
#include "cqbsim/protocols.h"
#include "cqbsim/rng.h"
#include "cqbsim/two_cqb.h"
#include "cqbsim/waveform.h"

namespace cqbsim {

namespace fs = std::filesystem;

namespace {

ParamDef num(const std::string &name, double v, const std::string &help) {
    return {name, Json(v), help};
}
ParamDef integer(const std::string &name, int64_t v, const std::string &help) {
    return {name, Json(v), help};
}
ParamDef str(const std::string &name, const std::string &v, const std::string &help) {
    return {name, Json(v), help};
}
ParamDef flag(const std::string &name, bool v, const std::string &help) {
    return {name, Json(v), help};
}

std::vector<ExperimentDef> build_registry() {
    std::vector<ExperimentDef> r;
    r.push_back({"scan2d", "single-pulse excitation map over amplitude and pulse frequency", false,
                 {num("eps_min_hz", 0, "lowest pulse amplitude"), num("eps_max_hz", 160e6, "highest pulse amplitude"),
                  integer("eps_points", 101, "amplitude points"), num("freq_min_hz", 60e6, "lowest pulse frequency"),
                  num("freq_max_hz", 250e6, "highest pulse frequency"), integer("freq_points", 101, "frequency points"),
                  num("contour_freq_hz", 125e6, "frequency at which the half-excitation amplitude is reported")}});
    r.push_back({"calibrate", "full tune-up of the single-CQB gate set", false,
                 {num("f_p_hz", 125e6, "pulse frequency"), integer("amplitude_points", 201, "amplitude scan points"),
                  integer("fine_gates", 21, "gates per chained fine scan")}});
    r.push_back({"rb", "randomized benchmarking (single, simultaneous or interleaved)", true,
                 {str("mode", "single", "single, simultaneous or interleaved"),
                  str("lengths", "1,2,4,8,16,32,64,128", "comma-separated sequence lengths (recovery included)"),
                  integer("sequences", 30, "random sequences per length"),
                  str("gates_file", "", "calibrated gate set JSON; empty calibrates in place"),
                  num("t1_leak1_s", -1, "leakage time from |1>; negative uses the spec annotation"),
                  num("t1_leak0_s", -1, "leakage time from |0>; negative uses the spec annotation"),
                  num("t2r_s", -1, "Ramsey time setting pure dephasing; negative uses the spec annotation"),
                  num("sigma_delta_hz", 0.2e6, "simultaneous mode: quasi-static gap offset per sequence"),
                  num("parked_zz_hz", 0, "simultaneous mode: always-on ZZ rate"),
                  num("p_layer", 0.01, "interleaved mode: depolarizing probability per local layer"),
                  num("p_cz", 0.05, "interleaved mode: depolarizing probability per CZ"),
                  num("leak_layer", 1, "interleaved mode: lambda_leak per local layer"),
                  num("leak_cz", 1, "interleaved mode: lambda_leak per CZ"),
                  flag("fit_spam", false, "fit free SPAM constants")}});
    r.push_back({"coherence", "Ramsey or echo decay under quasi-static 1/f flux noise", true,
                 {str("protocol", "ramsey", "ramsey or echo"), num("amplitude", 5e-6, "A [Phi0/sqrt(Hz)] at 1 Hz"),
                  num("exponent", 1, "spectral exponent"), num("f_low_hz", 1, "low cutoff"),
                  num("f_high_hz", 1e6, "high cutoff"), flag("independent", true, "independent transmon offsets"),
                  flag("drift", true, "offset drift between echo halves"),
                  integer("trajectories", 400, "Monte Carlo trajectories"), integer("points", 41, "delay points"),
                  num("tau_max_s", 0, "longest delay; 0 uses 12 dephasing scales"),
                  str("gates_file", "", "calibrated gate set JSON; empty calibrates in place")}});
    r.push_back({"init", "LZ initialization, return ramp and readout mapping", false,
                 {num("omega_qb_hz", 50e6, "drive strength"), num("sweep_rate_hz_per_s", 8e15, "detuning sweep rate"),
                  num("sweep_duration_s", 50e-9, "LZ sweep time"), num("ramp_tau_s", 50e-9, "return ramp constant"),
                  num("eps_far_hz", 0, "far detuning; 0 uses 20 Delta"), integer("target", 0, "target eigenstate"),
                  flag("coherent_lz", false, "simulate the LZ sweep instead of the closed form"),
                  str("readout_mode", "diabatic", "diabatic or eigen"),
                  num("readout_ramp_tau_s", 50e-9, "readout ramp constant")}});
    r.push_back({"cz", "CZ calibration, schedule and resynchronization on a two-CQB spec", false,
                 {str("cz_mode", "fixed_hold", "fixed_hold or free_hold"), num("target_rad", kPi, "conditional phase"),
                  num("max_hold_s", 2e-6, "free_hold: longest hold")}});
    r.push_back({"compile", "compile a circuit file into control waveforms", false,
                 {str("circuit_file", "", "circuit text file"),
                  str("gates_file", "", "gate set JSON for CQB-A; empty calibrates in place"),
                  str("gates_b_file", "", "gate set JSON for CQB-B; empty calibrates in place"),
                  str("negative_mode", "sign_flip", "sign_flip or z_sandwich")}});
    return r;
}

bool type_matches(const Json &def, const Json &v) {
    if (def.is_number_float()) {
        return v.is_number();
    }
    if (def.is_number_integer()) {
        return v.is_number_integer() || v.is_number_unsigned();
    }
    if (def.is_string()) {
        return v.is_string();
    }
    return v.is_boolean();
}

// Resolved parameter view.
class Params {
   public:
    Params(const ExperimentDef &def, const Json &overrides) {
        for (const auto &p : def.params) {
            resolved_[p.name] = overrides.contains(p.name) ? overrides[p.name] : p.default_value;
        }
    }
    double num(const std::string &k) const {
        return resolved_.at(k).get<double>();
    }
    int integer(const std::string &k) const {
        return resolved_.at(k).get<int>();
    }
    std::string str(const std::string &k) const {
        return resolved_.at(k).get<std::string>();
    }
    bool flag(const std::string &k) const {
        return resolved_.at(k).get<bool>();
    }
    const Json &json() const {
        return resolved_;
    }

   private:
    Json resolved_ = Json::object();
};

bool is_two_cqb(const Json &spec_json) {
    return spec_json.contains("cqb_a");
}

// Output files in write order.
class Writer {
   public:
    explicit Writer(std::string dir) : dir_(std::move(dir)) {
        fs::create_directories(dir_);
    }
    std::string path(const std::string &name) const {
        return (fs::path(dir_) / name).string();
    }
    void csv(const std::string &name, const std::vector<std::string> &header,
             const std::vector<std::vector<double>> &rows) {
        write_csv(path(name), header, rows);
        files.push_back({name, "trace"});
    }
    void json(const std::string &name, const Json &j, const std::string &role = "report") {
        write_text(path(name), dump_json(j));
        files.push_back({name, role});
    }
    void add(const std::string &name, const std::string &role) {
        files.push_back({name, role});
    }
    std::vector<ManifestFile> files;

   private:
    std::string dir_;
};

struct Context {
    const ExperimentConfig &config;
    Params params;
    Json spec_json;
    Writer &out;
    Json summary = Json::object();
};

Json mat_json(const Eigen::MatrixXcd &m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); i++) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); j++) {
            row.push_back({m(i, j).real(), m(i, j).imag()});
        }
        rows.push_back(row);
    }
    return rows;
}

CQBSpec single_spec(const Context &ctx) {
    if (is_two_cqb(ctx.spec_json)) {
        throw ConfigError("experiment '" + ctx.config.experiment + "' needs a single-CQB spec", "spec");
    }
    return load_cqb_spec(ctx.config.spec_path);
}

TwoCQBSpec pair_spec(const Context &ctx) {
    if (!is_two_cqb(ctx.spec_json)) {
        throw ConfigError("experiment '" + ctx.config.experiment + "' needs a two-CQB spec", "spec");
    }
    return load_two_cqb_spec(ctx.config.spec_path);
}

CalibratedGateSet gates_for(const CQBSpec &spec, const std::string &file, int workers) {
    if (!file.empty()) {
        Json j = read_json(file);
        return calibrated_gate_set_from_json(j.contains("gate_set") ? j["gate_set"] : j);
    }
    CalibrationOptions opt;
    opt.workers = workers;
    return calibrate_gate_set(spec, opt).gates;
}

std::vector<int> parse_lengths(const std::string &s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            int v = std::stoi(item, &used);
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
            out.push_back(v);
        } catch (const std::exception &) {
            throw ConfigError("lengths must be comma-separated integers, got '" + s + "'", "lengths");
        }
    }
    return out;
}

double annotation_or(const CQBSpec &spec, const std::string &key, double given) {
    if (given >= 0) {
        return given;
    }
    auto it = spec.annotations.find(key);
    return it == spec.annotations.end() ? 0 : it->second;
}

// First amplitude where the excitation crosses 0.5, by linear interpolation.
double half_crossing(const std::vector<double> &eps, const std::vector<double> &p) {
    for (size_t i = 1; i < eps.size(); i++) {
        if ((p[i - 1] - 0.5) * (p[i] - 0.5) <= 0 && p[i] != p[i - 1]) {
            return eps[i - 1] + (0.5 - p[i - 1]) * (eps[i] - eps[i - 1]) / (p[i] - p[i - 1]);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

void run_scan2d(Context &ctx) {
    auto spec = single_spec(ctx);
    const auto &p = ctx.params;
    if (p.num("eps_max_hz") < p.num("eps_min_hz") || p.num("freq_max_hz") < p.num("freq_min_hz")) {
        throw ConfigError("scan2d ranges must be nonempty (max >= min)", "eps_max_hz");
    }
    if (p.num("freq_min_hz") <= 0) {
        throw ConfigError("pulse frequencies must be > 0", "freq_min_hz");
    }
    auto eps = linear_grid(p.num("eps_min_hz"), p.num("eps_max_hz"), p.integer("eps_points"));
    auto freq = linear_grid(p.num("freq_min_hz"), p.num("freq_max_hz"), p.integer("freq_points"));
    auto rows = parallel_map(eps.size(), ctx.config.workers, [&](size_t i) {
        std::vector<double> row = {eps[i]};
        for (double f : freq) {
            row.push_back(single_pulse_excitation(spec, eps[i], f));
        }
        return row;
    });
    std::vector<std::string> header = {"eps_p_hz"};
    for (double f : freq) {
        header.push_back(fmt(f));
    }
    ctx.out.csv("scan2d.csv", header, rows);
    // Half-excitation contour: first crossing along amplitude for each frequency.
    Json contour = Json::array();
    size_t nearest = 0;
    for (size_t j = 0; j < freq.size(); j++) {
        std::vector<double> col;
        for (const auto &r : rows) {
            col.push_back(r[j + 1]);
        }
        contour.push_back({{"f_p_hz", freq[j]}, {"eps_p_hz", half_crossing(eps, col)}});
        if (std::abs(freq[j] - p.num("contour_freq_hz")) < std::abs(freq[nearest] - p.num("contour_freq_hz"))) {
            nearest = j;
        }
    }
    Json report;
    report["spec"] = spec.name;
    report["eps_points"] = eps.size();
    report["freq_points"] = freq.size();
    report["half_excitation_contour"] = contour;
    report["contour_at"] = contour[nearest];
    ctx.out.json("report.json", report);
    ctx.summary["contour_at"] = contour[nearest];
}

void run_calibrate(Context &ctx) {
    auto spec = single_spec(ctx);
    CalibrationOptions opt;
    opt.f_p = ctx.params.num("f_p_hz");
    opt.amplitude_points = ctx.params.integer("amplitude_points");
    opt.fine_gates = ctx.params.integer("fine_gates");
    opt.workers = ctx.config.workers;
    opt.shots = ctx.config.shots;
    opt.seed = ctx.config.seed.value_or(0);
    auto r = calibrate_gate_set(spec, opt);
    for (const auto &name : write_calibration_report(ctx.out.path(""), r, spec, opt)) {
        ctx.out.add(name, fs::path(name).extension() == ".csv" ? "trace" : "report");
    }
    ctx.out.json("gates.json", calibrated_gate_set_to_json(r.gates));
    ctx.summary["t_xy_s"] = r.gates.t_xy;
    ctx.summary["delta_hz"] = r.gates.delta;
    ctx.summary["residual_infidelity"] = r.gates.residual_infidelity;
}

void write_decay(Writer &out, const std::string &name, const RBOutcome &o) {
    std::vector<std::vector<double>> rows;
    for (size_t k = 0; k < o.lengths.size(); k++) {
        rows.push_back({static_cast<double>(o.lengths[k]), o.p_rec[k], o.p_other[k], o.p_leak[k], o.sem_rec[k],
                        o.sem_other[k]});
    }
    out.csv(name, {"length", "p_rec", "p_other", "p_leak", "sem_rec", "sem_other"}, rows);
}

void run_rb(Context &ctx) {
    const auto &p = ctx.params;
    const auto &c = ctx.config;
    RBConfig cfg;
    cfg.lengths = parse_lengths(p.str("lengths"));
    cfg.sequences_per_length = p.integer("sequences");
    cfg.seed = *c.seed;
    cfg.shots = c.shots;
    cfg.fit_spam = p.flag("fit_spam");
    cfg.workers = c.workers;
    std::string mode = p.str("mode");
    Json report;
    if (mode == "single") {
        auto spec = single_spec(ctx);
        cfg.validate();
        auto gates = gates_for(spec, p.str("gates_file"), c.workers);
        LeakageRates rates;
        if (!c.noiseless) {
            double t1 = annotation_or(spec, "t1_leak_from_1_s", p.num("t1_leak1_s"));
            double t0 = annotation_or(spec, "t1_leak_from_0_s", p.num("t1_leak0_s"));
            double t2 = annotation_or(spec, "t2r_s", p.num("t2r_s"));
            rates.leak_from_1 = t1 > 0 ? 1 / t1 : 0;
            rates.leak_from_0 = t0 > 0 ? 1 / t0 : 0;
            // The coherence also decays at half the leak rates.
            double gamma_2 = t2 > 0 ? 1 / t2 : 0;
            rates.gamma_phi = std::max(0.0, gamma_2 - (rates.leak_from_1 + rates.leak_from_0) / 2);
        }
        auto out = cqbsim::run_rb(cfg, compiled_lindblad_executor(spec, gates, rates));
        write_rb_records_csv(ctx.out.path("rb_records.csv"), out);
        ctx.out.add("rb_records.csv", "trace");
        write_decay(ctx.out, "rb_decay.csv", out);
        report["rates"] = {{"leak_from_1", rates.leak_from_1},
                           {"leak_from_0", rates.leak_from_0},
                           {"gamma_phi", rates.gamma_phi}};
        report["outcome"] = out.to_json();
        ctx.summary["fidelity"] = out.fit.fidelity;
        ctx.summary["fidelity_error"] = out.fit.fidelity_error;
        ctx.summary["fidelity_leak"] = out.fit.fidelity_leak;
    } else if (mode == "simultaneous") {
        auto spec = pair_spec(ctx);
        cfg.validate();
        TwoCQBGateSets sets;
        sets.a = gates_for(spec.cqb_a, p.str("gates_file"), c.workers);
        sets.b = gates_for(spec.cqb_b, "", c.workers);
        RBConfig cfg_b = cfg;
        cfg_b.seed = splitmix64(cfg.seed ^ 0xB);
        double sigma = c.noiseless ? 0 : p.num("sigma_delta_hz");
        double zz = c.noiseless ? 0 : p.num("parked_zz_hz");
        auto out = run_simultaneous_rb(cfg, cfg_b, simultaneous_unitary_executor(spec, sets, sigma, zz));
        write_decay(ctx.out, "rb_decay_a.csv", out[0]);
        write_decay(ctx.out, "rb_decay_b.csv", out[1]);
        report["sigma_delta_hz"] = sigma;
        report["parked_zz_hz"] = zz;
        report["cqb_a"] = out[0].to_json();
        report["cqb_b"] = out[1].to_json();
        ctx.summary["fidelity_a"] = out[0].fit.fidelity;
        ctx.summary["fidelity_b"] = out[1].fit.fidelity;
    } else if (mode == "interleaved") {
        cfg.mode = RBMode::Interleaved;
        cfg.validate();
        TwoQubitChannel ch;
        if (!c.noiseless) {
            ch = {p.num("p_layer"), p.num("leak_layer"), p.num("p_cz"), p.num("leak_cz")};
        }
        RBConfig il = cfg;
        il.interleave_cz = true;
        il.seed = splitmix64(cfg.seed ^ 0xC2);
        auto exec = two_qubit_channel_executor(ch);
        auto ref = run_two_qubit_rb(cfg, exec);
        auto inter = run_two_qubit_rb(il, exec);
        auto f = fit_interleaved_cz(ref, inter);
        write_decay(ctx.out, "rb_decay_reference.csv", ref);
        write_decay(ctx.out, "rb_decay_interleaved.csv", inter);
        report["channel"] = {{"p_layer", ch.p_layer},
                             {"lambda_leak_layer", ch.lambda_leak_layer},
                             {"p_cz", ch.p_cz},
                             {"lambda_leak_cz", ch.lambda_leak_cz}};
        report["reference"] = ref.to_json();
        report["interleaved"] = inter.to_json();
        report["cz"] = f.to_json();
        ctx.summary["fidelity_cz"] = f.fidelity;
        ctx.summary["fidelity_cz_error"] = f.fidelity_error;
    } else {
        throw ConfigError("unknown rb mode '" + mode + "' (single, simultaneous, interleaved)", "mode");
    }
    ctx.out.json("report.json", report);
}

void run_coherence(Context &ctx) {
    const auto &p = ctx.params;
    const auto &c = ctx.config;
    auto spec = single_spec(ctx);
    FluxNoiseSpec noise;
    noise.amplitude = c.noiseless ? 0 : p.num("amplitude");
    noise.exponent = p.num("exponent");
    noise.f_low = p.num("f_low_hz");
    noise.f_high = p.num("f_high_hz");
    noise.independent = p.flag("independent");
    noise.drift = p.flag("drift");
    noise.validate();
    auto protocol = protocol_from_string(p.str("protocol"));
    double tau_max = p.num("tau_max_s");
    if (tau_max <= 0) {
        double scale = flux_dephasing_scale(spec, noise);
        tau_max = std::isfinite(scale) ? 12 * scale : 1e-6;
    }
    auto gates = gates_for(spec, p.str("gates_file"), c.workers);
    auto r = simulate_coherence(spec, gates, noise, protocol, linear_grid(0, tau_max, p.integer("points")),
                                p.integer("trajectories"), *c.seed, c.workers);
    std::vector<std::vector<double>> rows;
    for (size_t k = 0; k < r.tau.size(); k++) {
        rows.push_back({r.tau[k], r.p0[k], 1 - r.p0[k], 0.0, r.coherence[k]});
    }
    ctx.out.csv("coherence.csv", {"tau_s", "p0", "p1", "pleak", "coherence"}, rows);
    Json report;
    report["protocol"] = protocol_name(protocol);
    report["noise"] = flux_noise_to_json(noise);
    report["t2_s"] = r.t2;
    report["t2_error_s"] = r.t2_error;
    report["fit"] = r.fit.to_json();
    ctx.out.json("report.json", report);
    ctx.summary["t2_s"] = r.t2;
}

void run_init(Context &ctx) {
    const auto &p = ctx.params;
    auto spec = single_spec(ctx);
    InitSchedule s;
    s.omega_qb = p.num("omega_qb_hz");
    s.sweep_rate = p.num("sweep_rate_hz_per_s");
    s.sweep_duration = p.num("sweep_duration_s");
    s.ramp_tau = p.num("ramp_tau_s");
    s.eps_far = p.num("eps_far_hz");
    s.target = p.integer("target");
    s.coherent_lz = p.flag("coherent_lz");
    ReadoutSchedule rs;
    rs.mode = readout_mode_from_string(p.str("readout_mode"));
    rs.ramp_tau = p.num("readout_ramp_tau_s");
    rs.eps_far = s.eps_far;
    auto init = simulate_initialization(spec, s);
    auto read = simulate_readout_mapping(spec, init.state, rs);
    Json report;
    report["schedule"] = init_schedule_to_json(s);
    report["initialization"] = init.to_json();
    report["readout_schedule"] = readout_schedule_to_json(rs);
    report["readout"] = read.to_json();
    ctx.out.json("report.json", report);
    ctx.summary["fidelity"] = init.fidelity;
    ctx.summary["prepared_index"] = init.prepared_index;
}

void run_cz(Context &ctx) {
    const auto &p = ctx.params;
    auto spec = pair_spec(ctx);
    CZOptions opt;
    std::string mode = p.str("cz_mode");
    if (mode == "fixed_hold") {
        opt.mode = CZMode::FixedHold;
    } else if (mode == "free_hold") {
        opt.mode = CZMode::FreeHold;
    } else {
        throw ConfigError("unknown cz_mode '" + mode + "' (fixed_hold, free_hold)", "cz_mode");
    }
    opt.target = p.num("target_rad");
    opt.max_hold = p.num("max_hold_s");
    auto cal = calibrate_cz(spec, opt);
    auto rs = cz_with_resync(spec, cal);
    double dt = rs.schedule.sample_period;
    Mat4 u = propagate_two_cqb(spec, rs.eps_a.samples(), rs.eps_b.samples(), rs.schedule, dt);
    Mat4 expect = kron(rot_z(rs.ledger.phase[0]), rot_z(rs.ledger.phase[1])) * cz_unitary();
    double infidelity = 1 - trace_fidelity(u, expect);
    std::vector<std::vector<double>> rows;
    for (size_t k = 0; k < rs.schedule.size(); k++) {
        rows.push_back({rs.schedule.start + static_cast<double>(k) * dt, rs.schedule.detuning[k], rs.schedule.zeta[k],
                        rs.schedule.shift_a[k], rs.schedule.shift_b[k], rs.eps_a.samples()[k],
                        rs.eps_b.samples()[k]});
    }
    ctx.out.csv("cz_schedule.csv",
                {"time_s", "detuning_hz", "zeta_hz", "shift_a_hz", "shift_b_hz", "eps_a_hz", "eps_b_hz"}, rows);
    Json report;
    report["calibration"] = cz_calibration_to_json(cal);
    report["duration_s"] = cal.duration();
    report["phi_zz_rad"] = cal.phi_zz;
    report["rendered_phi_zz_rad"] = rs.schedule.conditional_phase();
    report["pad_a_s"] = rs.pad_a;
    report["pad_b_s"] = rs.pad_b;
    report["extra_phase_a_rad"] = rs.extra_phase_a;
    report["extra_phase_b_rad"] = rs.extra_phase_b;
    report["ledger_rad"] = rs.ledger.phase;
    report["trace_infidelity"] = infidelity;
    ctx.out.json("report.json", report);
    ctx.summary["phi_zz_rad"] = cal.phi_zz;
    ctx.summary["trace_infidelity"] = infidelity;
}

void run_compile(Context &ctx) {
    const auto &p = ctx.params;
    const auto &c = ctx.config;
    if (p.str("circuit_file").empty()) {
        throw ConfigError("compile needs circuit_file", "circuit_file");
    }
    auto seq = parse_circuit(read_text(p.str("circuit_file")));
    NegativeMode mode;
    if (p.str("negative_mode") == "sign_flip") {
        mode = NegativeMode::SignFlip;
    } else if (p.str("negative_mode") == "z_sandwich") {
        mode = NegativeMode::ZSandwich;
    } else {
        throw ConfigError("unknown negative_mode (sign_flip, z_sandwich)", "negative_mode");
    }
    Json report;
    if (is_two_cqb(ctx.spec_json)) {
        auto spec = pair_spec(ctx);
        TwoCQBGateSets sets;
        sets.a = gates_for(spec.cqb_a, p.str("gates_file"), c.workers);
        sets.b = gates_for(spec.cqb_b, p.str("gates_b_file"), c.workers);
        bool any_cz = false;
        for (const auto &s : seq) {
            any_cz = any_cz || (s.clifford == 0 && s.gate.kind == GateKind::CZ);
        }
        if (any_cz) {
            sets.cz = calibrate_cz(spec);
        }
        auto prog = compile_two_cqb(seq, spec, sets, mode);
        std::vector<std::vector<double>> rows;
        for (size_t k = 0; k < prog.eps_a.size(); k++) {
            bool cz = prog.cz.size() > 0;
            rows.push_back({static_cast<double>(k) * prog.sample_period, prog.eps_a[k], prog.eps_b[k],
                            cz ? prog.cz.detuning[k] : 0.0, cz ? prog.cz.zeta[k] : 0.0});
        }
        ctx.out.csv("program.csv", {"time_s", "eps_a_hz", "eps_b_hz", "cz_detuning_hz", "zeta_hz"}, rows);
        ctx.out.json("timing.json", timing_report(prog.gates, prog.sample_period));
        Mat4 logical = two_cqb_logical_frame(simulate_two_cqb(spec, prog), sets);
        report["ideal"] = mat_json(prog.ideal);
        report["ledger_rad"] = prog.ledger.phase;
        report["duration_s"] = prog.duration;
        report["fidelity"] = trace_fidelity(logical, expected_logical(prog));
    } else {
        auto spec = single_spec(ctx);
        for (const auto &s : seq) {
            if (s.gate.target != 0 || (s.clifford == 0 && s.gate.kind == GateKind::CZ)) {
                throw ConfigError("circuit addresses CQB-B or CZ; use a two-CQB spec", "circuit_file");
            }
        }
        auto gates = gates_for(spec, p.str("gates_file"), c.workers);
        auto cs = compile_sequence(seq, gates, {}, mode);
        write_waveform(ctx.out.path("waveform.csv"), cs.waveform);
        ctx.out.add("waveform.csv", "trace");
        ctx.out.json("timing.json", timing_report(cs.gates, cs.waveform.sample_period()));
        Mat2 logical = to_logical_frame(unitary_of_waveform(spec, cs.waveform), gates);
        report["ideal"] = mat_json(cs.ideal);
        report["ledger_rad"] = cs.ledger.phase[0];
        report["duration_s"] = cs.waveform.duration();
        report["fidelity"] = trace_fidelity(logical, rot_z(cs.ledger.phase[0]) * cs.ideal);
    }
    ctx.out.json("report.json", report);
    ctx.summary["fidelity"] = report["fidelity"];
}

using Runner = std::function<void(Context &)>;

Runner runner_for(const std::string &id) {
    if (id == "scan2d") return run_scan2d;
    if (id == "calibrate") return run_calibrate;
    if (id == "rb") return run_rb;
    if (id == "coherence") return run_coherence;
    if (id == "init") return run_init;
    if (id == "cz") return run_cz;
    return run_compile;
}

Json load_spec_json(const std::string &path) {
    if (path.empty()) {
        throw ConfigError("a device spec is required (--spec)", "spec");
    }
    if (!fs::exists(path)) {
        throw ConfigError("spec file not found: " + path, "spec");
    }
    return read_json(path);
}

}  // namespace

const std::vector<ExperimentDef> &experiment_registry() {
    static const std::vector<ExperimentDef> r = build_registry();
    return r;
}

const ExperimentDef &find_experiment(const std::string &id) {
    for (const auto &d : experiment_registry()) {
        if (d.id == id) {
            return d;
        }
    }
    throw ConfigError("unknown experiment '" + id + "'", "experiment");
}

void ExperimentConfig::validate() const {
    const auto &def = find_experiment(experiment);
    if (!params.is_object()) {
        throw ConfigError("parameters must be an object", "params");
    }
    for (auto it = params.begin(); it != params.end(); ++it) {
        const ParamDef *pd = nullptr;
        for (const auto &p : def.params) {
            if (p.name == it.key()) {
                pd = &p;
            }
        }
        if (pd == nullptr) {
            throw ConfigError("unknown parameter '" + it.key() + "' for " + experiment, it.key());
        }
        if (!type_matches(pd->default_value, it.value())) {
            throw ConfigError("parameter '" + it.key() + "' has the wrong type", it.key());
        }
    }
    if ((def.stochastic || shots > 0) && !seed.has_value()) {
        throw ConfigError("experiment '" + experiment + "' is stochastic and needs --seed", "seed");
    }
    if (workers < 1) {
        throw ConfigError("workers must be >= 1", "workers");
    }
    if (shots < 0) {
        throw ConfigError("shots must be >= 0", "shots");
    }
}

Json hashed_inputs(const ExperimentConfig &c) {
    c.validate();
    const auto &def = find_experiment(c.experiment);
    Params p(def, c.params);
    Json spec_json = load_spec_json(c.spec_path);
    Json inputs;
    inputs["spec"] = read_text(c.spec_path);
    fs::path base = fs::path(c.spec_path).parent_path();
    for (const char *k : {"cqb_a", "cqb_b"}) {
        if (spec_json.contains(k) && spec_json[k].is_string()) {
            inputs[k] = read_text((base / spec_json[k].get<std::string>()).string());
        }
    }
    for (auto it = p.json().begin(); it != p.json().end(); ++it) {
        const std::string &k = it.key();
        if (k.size() > 5 && k.compare(k.size() - 5, 5, "_file") == 0 && !it.value().get<std::string>().empty()) {
            inputs[k] = read_text(it.value().get<std::string>());
        }
    }
    Json j;
    j["experiment"] = c.experiment;
    j["seed"] = c.seed.has_value() ? Json(*c.seed) : Json(nullptr);
    j["shots"] = c.shots;
    j["noiseless"] = c.noiseless;
    j["params"] = p.json();
    j["inputs"] = inputs;
    return j;
}

std::string config_hash(const ExperimentConfig &c) {
    return hex64(fnv1a64(dump_json(hashed_inputs(c))));
}

Json ResultManifest::to_json() const {
    Json j;
    j["experiment"] = experiment;
    j["config_hash"] = config_hash;
    Json files_json = Json::array();
    for (const auto &f : files) {
        files_json.push_back({{"path", f.path}, {"role", f.role}});
    }
    j["files"] = files_json;
    j["summary"] = summary;
    j["wall_clock_s"] = wall_clock_s;
    return j;
}

ResultManifest run_experiment(const ExperimentConfig &c) {
    auto t0 = std::chrono::steady_clock::now();
    Json hashed = hashed_inputs(c);
    const auto &def = find_experiment(c.experiment);
    Writer out(c.out_dir);
    Context ctx{c, Params(def, c.params), load_spec_json(c.spec_path), out};
    runner_for(c.experiment)(ctx);

    ResultManifest m;
    m.experiment = c.experiment;
    m.config_hash = hex64(fnv1a64(dump_json(hashed)));
    Json config;
    config["experiment"] = c.experiment;
    config["config_hash"] = m.config_hash;
    config["spec"] = c.spec_path;
    config["seed"] = hashed["seed"];
    config["shots"] = c.shots;
    config["noiseless"] = c.noiseless;
    config["params"] = hashed["params"];
    out.json("config.json", config, "config");
    m.files = out.files;
    m.summary = ctx.summary;
    m.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text(out.path("manifest.json"), dump_json(m.to_json()));
    return m;
}

Json error_json(const CqbError &e) {
    Json j;
    j["error"] = error_kind_name(e.kind());
    j["message"] = e.what();
    if (!e.field().empty()) {
        j["field"] = e.field();
    }
    return j;
}

}  // namespace cqbsim
