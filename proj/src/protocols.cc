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

#include "cqbsim/protocols.h"

#include <cmath>
#include <limits>

#include "cqbsim/errors.h"
#include "cqbsim/linalg.h"

namespace cqbsim {

namespace {

constexpr double kFarGaps = 20;

// Bare (diabatic) states of the crossing: the eps -> +inf ends of |0> and |1>.
Vec2 diabatic(int k) {
    double s = 1 / std::sqrt(2.0);
    return k == 0 ? Vec2(s, s) : Vec2(s, -s);
}

// Top eigenvector of delta sz + eps sx: the branch |0> sits on.
Vec2 upper_branch(double delta, double eps) {
    double th = std::atan2(eps, delta);
    return Vec2(std::cos(th / 2), std::sin(th / 2));
}

double far_detuning(const CQBSpec &spec, double eps_far) {
    return eps_far > 0 ? eps_far : kFarGaps * spec.delta;
}

}  // namespace

double lz_excitation_probability_angular(double omega, double rate) {
    if (!(omega >= 0) || !(rate > 0)) {
        throw ConfigError("LZ needs omega >= 0 and rate > 0", "omega_qb");
    }
    return -std::expm1(-2 * kPi * omega * omega / rate);
}

double lz_excitation_probability(double omega_hz, double rate_hz_per_s) {
    return lz_excitation_probability_angular(2 * kPi * omega_hz, 2 * kPi * rate_hz_per_s);
}

double simulate_lz_sweep(double omega_hz, double rate_hz_per_s, double span, double dt) {
    if (!(omega_hz >= 0) || !(rate_hz_per_s > 0)) {
        throw ConfigError("LZ needs omega >= 0 and rate > 0", "omega_qb");
    }
    double gap = 2 * omega_hz;
    if (span <= 0) {
        span = 400 * std::max(omega_hz, std::sqrt(rate_hz_per_s) / 10);
    }
    if (dt <= 0) {
        dt = 0.02 / span;
    }
    size_t n = static_cast<size_t>(std::ceil(2 * span / rate_hz_per_s / dt));
    if (n > 50'000'000) {
        throw ConfigError("LZ sweep needs too many samples; raise dt", "dt");
    }
    std::vector<double> eps(n);
    for (size_t k = 0; k < n; k++) {
        eps[k] = -span + rate_hz_per_s * (static_cast<double>(k) + 0.5) * dt;
    }
    // Start and end in the adiabatic state of the same branch, which removes the
    // finite-span oscillation at first order.
    Vec2 psi = propagate_ket(gap, upper_branch(gap, eps.front()), eps, dt);
    return std::norm(upper_branch(gap, eps.back()).dot(psi));
}

// Erf ramp from `from` to `to` over four time constants; empty when tau is 0.
std::vector<double> return_ramp(double from, double to, double tau, double dt) {
    if (tau == 0) {
        return {};
    }
    return synth_gaussian_ramp(from, to, tau, 4 * tau, dt).samples();
}

void InitSchedule::validate() const {
    if (!(omega_qb > 0) || !(sweep_rate > 0) || !(sweep_duration > 0)) {
        throw ConfigError("init schedule needs positive omega_qb, sweep_rate and sweep_duration", "omega_qb");
    }
    if (!(ramp_tau >= 0) || !(eps_far >= 0) || !(sample_period > 0)) {
        throw ConfigError("init schedule needs ramp_tau >= 0, eps_far >= 0, sample_period > 0", "ramp_tau");
    }
    if (target != 0 && target != 1) {
        throw ConfigError("init target must be 0 or 1", "target");
    }
}

double InitSchedule::adiabaticity() const {
    return 2 * kPi * (2 * kPi * omega_qb) * (2 * kPi * omega_qb) / (2 * kPi * sweep_rate);
}

Json init_schedule_to_json(const InitSchedule &s) {
    Json j;
    j["omega_qb_hz"] = s.omega_qb;
    j["sweep_rate_hz_per_s"] = s.sweep_rate;
    j["sweep_duration_s"] = s.sweep_duration;
    j["ramp_tau_s"] = s.ramp_tau;
    j["eps_far_hz"] = s.eps_far;
    j["target"] = s.target;
    j["coherent_lz"] = s.coherent_lz;
    j["threshold"] = s.threshold;
    j["sample_period_s"] = s.sample_period;
    return j;
}

InitSchedule init_schedule_from_json(const Json &j) {
    InitSchedule s;
    s.omega_qb = j.value("omega_qb_hz", s.omega_qb);
    s.sweep_rate = j.value("sweep_rate_hz_per_s", s.sweep_rate);
    s.sweep_duration = j.value("sweep_duration_s", s.sweep_duration);
    s.ramp_tau = j.value("ramp_tau_s", s.ramp_tau);
    s.eps_far = j.value("eps_far_hz", s.eps_far);
    s.target = j.value("target", s.target);
    s.coherent_lz = j.value("coherent_lz", s.coherent_lz);
    s.threshold = j.value("threshold", s.threshold);
    s.sample_period = j.value("sample_period_s", s.sample_period);
    s.validate();
    return s;
}

Json InitResult::to_json() const {
    Json j;
    j["lz_probability"] = lz_probability;
    j["adiabaticity"] = adiabaticity;
    j["prepared_index"] = prepared_index;
    j["fidelity"] = fidelity;
    j["populations"] = {state.population(0), state.population(1), state.population(2)};
    j["duration_s"] = duration;
    if (!diagnostic.empty()) {
        j["diagnostic"] = diagnostic;
    }
    return j;
}

InitResult simulate_initialization(const CQBSpec &spec, const InitSchedule &sched) {
    spec.validate();
    sched.validate();
    InitResult r;
    r.adiabaticity = sched.adiabaticity();
    r.lz_probability = sched.coherent_lz ? simulate_lz_sweep(sched.omega_qb, sched.sweep_rate)
                                         : lz_excitation_probability(sched.omega_qb, sched.sweep_rate);
    Vec2 psi = diabatic(sched.target);
    CQBState s;
    s.rho.block<2, 2>(0, 0) = r.lz_probability * psi * psi.adjoint();
    s.rho(2, 2) = 1 - r.lz_probability;
    auto ramp = return_ramp(far_detuning(spec, sched.eps_far), 0, sched.ramp_tau, sched.sample_period);
    if (!ramp.empty()) {
        s = evolve_coherent(spec, s, Waveform(ramp, sched.sample_period));
    }
    r.state = s;
    r.prepared_index = s.population(1) > s.population(0) ? 1 : 0;
    r.fidelity = s.population(sched.target);
    r.duration = sched.duration();
    if (r.fidelity < sched.threshold) {
        r.diagnostic = "initialization fidelity " + std::to_string(r.fidelity) + " below threshold; return ramp or LZ "
                       "sweep not adiabatic";
    }
    return r;
}

const char *readout_mode_name(ReadoutMode m) {
    return m == ReadoutMode::EigenAtDegeneracy ? "eigen" : "diabatic";
}

ReadoutMode readout_mode_from_string(const std::string &s) {
    if (s == "eigen") {
        return ReadoutMode::EigenAtDegeneracy;
    }
    if (s == "diabatic") {
        return ReadoutMode::DiabaticAfterRamp;
    }
    throw ConfigError("unknown readout mode '" + s + "' (eigen, diabatic)", "mode");
}

void ReadoutSchedule::validate() const {
    if (!(ramp_tau >= 0) || !(eps_far >= 0) || !(rest >= 0) || !(sample_period > 0)) {
        throw ConfigError("readout schedule needs nonnegative ramp_tau, eps_far, rest", "ramp_tau");
    }
    if (!confusion.empty()) {
        if (confusion.size() != 3) {
            throw ConfigError("confusion matrix must be 3x3", "confusion");
        }
        for (int col = 0; col < 3; col++) {
            double sum = 0;
            for (int row = 0; row < 3; row++) {
                double v = confusion[static_cast<size_t>(row)][static_cast<size_t>(col)];
                if (!(v >= 0)) {
                    throw ConfigError("confusion entries must be >= 0", "confusion");
                }
                sum += v;
            }
            if (std::abs(sum - 1) > 1e-9) {
                throw ConfigError("confusion columns must sum to 1", "confusion");
            }
        }
    }
}

Json readout_schedule_to_json(const ReadoutSchedule &s) {
    Json j;
    j["mode"] = readout_mode_name(s.mode);
    j["ramp_tau_s"] = s.ramp_tau;
    j["eps_far_hz"] = s.eps_far;
    j["rest_s"] = s.rest;
    if (!s.confusion.empty()) {
        j["confusion"] = s.confusion;
    }
    j["sample_period_s"] = s.sample_period;
    return j;
}

ReadoutSchedule readout_schedule_from_json(const Json &j) {
    ReadoutSchedule s;
    s.mode = readout_mode_from_string(j.value("mode", std::string("diabatic")));
    s.ramp_tau = j.value("ramp_tau_s", s.ramp_tau);
    s.eps_far = j.value("eps_far_hz", s.eps_far);
    s.rest = j.value("rest_s", s.rest);
    if (j.contains("confusion")) {
        s.confusion = j["confusion"].get<std::vector<std::array<double, 3>>>();
    }
    s.sample_period = j.value("sample_period_s", s.sample_period);
    s.validate();
    return s;
}

Json ReadoutResult::to_json() const {
    Json j;
    j["mode"] = readout_mode_name(mode);
    j["resolved"] = resolved;
    if (resolved) {
        j["p0"] = p0;
        j["p1"] = p1;
    }
    j["p_subspace"] = p_subspace;
    j["p_leak"] = leak;
    return j;
}

ReadoutResult simulate_readout_mapping(const CQBSpec &spec, const CQBState &state, const ReadoutSchedule &sched) {
    spec.validate();
    sched.validate();
    state.validate();
    ReadoutResult r;
    r.mode = sched.mode;
    if (sched.mode == ReadoutMode::EigenAtDegeneracy) {
        r.leak = state.population(2);
        r.p_subspace = 1 - r.leak;
        r.p0 = r.p1 = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    double far = far_detuning(spec, sched.eps_far);
    auto eps = return_ramp(0, far, sched.ramp_tau, sched.sample_period);
    size_t rest = static_cast<size_t>(std::llround(sched.rest / sched.sample_period));
    eps.insert(eps.end(), rest, far);
    CQBState s = state;
    if (!eps.empty()) {
        s = evolve_coherent(spec, s, Waveform(eps, sched.sample_period));
    }
    Mat2 block = s.rho.block<2, 2>(0, 0);
    std::array<double, 3> p = {std::real(diabatic(0).dot(block * diabatic(0))),
                               std::real(diabatic(1).dot(block * diabatic(1))), s.population(2)};
    if (!sched.confusion.empty()) {
        std::array<double, 3> q = {0, 0, 0};
        for (size_t row = 0; row < 3; row++) {
            for (size_t col = 0; col < 3; col++) {
                q[row] += sched.confusion[row][col] * p[col];
            }
        }
        p = q;
    }
    double total = p[0] + p[1] + p[2];
    r.resolved = true;
    r.p0 = p[0] / total;
    r.p1 = p[1] / total;
    r.leak = p[2] / total;
    r.p_subspace = r.p0 + r.p1;
    return r;
}

}  // namespace cqbsim
