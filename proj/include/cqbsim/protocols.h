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

#ifndef CQBSIM_PROTOCOLS_H
#define CQBSIM_PROTOCOLS_H

#include <array>
#include <string>
#include <vector>

#include "cqbsim/device.h"
#include "cqbsim/io.h"
#include "cqbsim/propagator.h"
#include "cqbsim/waveform.h"

namespace cqbsim {

/// 1 - exp(-2 pi Omega^2 / rate) with Omega [rad/s] and rate [rad/s^2]: the gap at the
/// crossing is 2 Omega and the diabatic energies separate at `rate`.
double lz_excitation_probability_angular(double omega, double rate);
/// Same with Omega [Hz] and rate [Hz/s].
double lz_excitation_probability(double omega_hz, double rate_hz_per_s);

/// Linear sweep of a two-level crossing with gap 2 Omega [Hz] through detunings
/// +-span [Hz] at `rate` [Hz/s]. Returns the probability of adiabatic following, which
/// far from the crossing is the transfer between diabatic states.
double simulate_lz_sweep(double omega_hz, double rate_hz_per_s, double span = 0, double dt = 0);

struct InitSchedule {
    double omega_qb = 50e6;  ///< drive strength Omega_QB [Hz]
    double sweep_rate = 400e6 / 50e-9;  ///< detuning sweep rate [Hz/s]
    double sweep_duration = 50e-9;
    double ramp_tau = 50e-9;  ///< 1/e^2 time constant of the erf return ramp (4 tau long)
    /// Starting detuning of the return ramp [Hz]; 0 uses 20 Delta.
    double eps_far = 0;
    /// Eigenstate the excited diabatic state connects to.
    int target = 0;
    bool coherent_lz = false;  ///< swept simulation instead of the closed form
    double threshold = 0.99;
    double sample_period = kDefaultSamplePeriod;

    void validate() const;
    double adiabaticity() const;  ///< 2 pi Omega^2 / rate, angular units
    double duration() const {
        return sweep_duration + 4 * ramp_tau;
    }
};

Json init_schedule_to_json(const InitSchedule &s);
InitSchedule init_schedule_from_json(const Json &j);

struct InitResult {
    CQBState state;
    double lz_probability = 0;
    double adiabaticity = 0;
    int prepared_index = 0;  ///< eigenstate with the larger population
    double fidelity = 0;  ///< population of `target`
    double duration = 0;
    std::string diagnostic;  ///< nonempty when fidelity < threshold

    Json to_json() const;
};

/// LZ excitation out of the joint ground state (which stays as the leak level), then the
/// bare diabatic state at eps_far ramped coherently back to eps = 0.
InitResult simulate_initialization(const CQBSpec &spec, const InitSchedule &sched);

enum class ReadoutMode { EigenAtDegeneracy, DiabaticAfterRamp };
const char *readout_mode_name(ReadoutMode m);
ReadoutMode readout_mode_from_string(const std::string &s);

struct ReadoutSchedule {
    ReadoutMode mode = ReadoutMode::DiabaticAfterRamp;
    double ramp_tau = 50e-9;
    double eps_far = 0;  ///< 0 uses 20 Delta
    double rest = 20e-9;
    /// Post-hoc assignment matrix, column j = outcome distribution of true label j
    /// over (0, 1, leak). Identity when empty.
    std::vector<std::array<double, 3>> confusion;
    double sample_period = kDefaultSamplePeriod;

    void validate() const;
};

Json readout_schedule_to_json(const ReadoutSchedule &s);
ReadoutSchedule readout_schedule_from_json(const Json &j);

struct ReadoutResult {
    ReadoutMode mode = ReadoutMode::DiabaticAfterRamp;
    bool resolved = false;  ///< false: only in-subspace vs leak
    double p0 = 0;  ///< diabatic state reached from |0>
    double p1 = 0;
    double leak = 0;
    double p_subspace = 0;

    Json to_json() const;
};

/// Eigen mode projects onto subspace vs leak. Diabatic mode ramps to eps_far, rests, and
/// projects onto the bare states; |0> maps onto the one it reaches adiabatically.
ReadoutResult simulate_readout_mapping(const CQBSpec &spec, const CQBState &state, const ReadoutSchedule &sched = {});

}  // namespace cqbsim

#endif
