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

#ifndef CQBSIM_DEVICE_H
#define CQBSIM_DEVICE_H

#include <map>
#include <string>
#include <vector>

#include "cqbsim/io.h"

namespace cqbsim {

// All frequencies are cyclic [Hz]; factors of 2 pi are applied by the propagators.

struct TransmonSpec {
    std::string name;
    double f_max = 0;
    double f_min = 0;
    double e_c = 0;  ///< anharmonicity E_C/h
    double kappa = 0;  ///< readout resonator linewidth kappa/2pi, optional
    double chi = 0;  ///< dispersive shift chi/2pi, optional

    double delta_omega() const {
        return (f_max - f_min) / 2;
    }
    double omega_bar() const {
        return (f_max + f_min) / 2;
    }
    /// Throws ConfigError naming the first violated field.
    void validate(const std::string &prefix = "") const;
};

struct CQBSpec {
    std::string name;
    TransmonSpec transmon_a;
    TransmonSpec transmon_b;
    double delta = 0;  ///< gap Delta/2pi
    double phi_star = 0;  ///< operating bias, reduced flux
    std::map<std::string, double> annotations;  ///< measured values kept for reference only

    double t_delta() const {
        return 1.0 / delta;
    }
    /// Mean of the two transmons' delta_omega; used by every flux map.
    double mean_delta_omega() const {
        return (transmon_a.delta_omega() + transmon_b.delta_omega()) / 2;
    }
    /// |f_max,a - f_max,b| / Delta. Tolerated, reported as a diagnostic.
    double asymmetry() const;
    void validate() const;
};

/// Tabulated effective sigma_z sigma_z rate zeta [Hz] against CZ detuning [Hz]. The
/// table is indexed by |detuning| and must be non-increasing.
struct ZZProfile {
    std::vector<double> detuning;
    std::vector<double> zeta;

    double at(double detuning_hz) const;
    double max_detuning() const {
        return detuning.empty() ? 0 : detuning.back();
    }
    void validate() const;
};

struct TwoCQBSpec {
    CQBSpec cqb_a;
    CQBSpec cqb_b;
    double g23 = 0;  ///< inter-CQB coupling g23/2pi
    ZZProfile zz_profile;
    double idle_detuning = 0;  ///< CZ detuning while parked
    double ramp_duration = 20e-9;
    double ramp_tau = 5e-9;
    double hold = 250e-9;
    /// CQB frequency shifts at the CZ operating point; scaled by the ramp profile.
    double cz_shift_a = 0;
    double cz_shift_b = 0;

    void validate() const;
};

double transmon_frequency(const TransmonSpec &spec, double phi);

/// epsilon = 2 dw sin(2 pi phi*) sin(2 pi df), dw the mean transmon half-range.
double epsilon_of_flux(const CQBSpec &spec, double df);
/// First-order form 4 pi dw sin(2 pi phi*) df.
double epsilon_of_flux_linear(const CQBSpec &spec, double df);
/// Inverse of epsilon_of_flux on |df| < 1/4.
double flux_of_epsilon(const CQBSpec &spec, double epsilon);
/// True when the linear form is within `tol` relative error of the exact map.
bool linear_epsilon_valid(const CQBSpec &spec, double df, double tol = 0.01);

double cqb_frequency(const CQBSpec &spec, double epsilon);

/// Second-order CQB frequency shift from transmon flux excursions dphi1, dphi2.
double flux_noise_sensitivity(const CQBSpec &spec, double dphi1, double dphi2);
/// Transmon shift at its own sweet spot, 2 pi^2 dw dphi^2.
double transmon_sweet_spot_shift(double delta_omega, double dphi);
/// |df_CQB / dE| for a single-transmon excursion: sin^2(2 pi phi*) dw / Delta.
double flux_noise_ratio(const CQBSpec &spec);

/// Second-order CQB shift from differential transmon shifts, (dE1 - dE2)^2 / (2 Delta).
double photon_noise_sensitivity(const CQBSpec &spec, double dE1, double dE2);

/// zeta(d) = (sqrt(d^2 + W^2) - |d|) / 2 with W = g23/4, tabulated on [0, max_detuning].
ZZProfile zz_profile_from_coupling(double g23, double max_detuning, int points = 4001);
/// g23 implied by an optimal interaction time 4/g23 (cyclic), i.e. zeta(0) * hold = 1/2.
double g23_from_interaction_time(double hold);

TransmonSpec transmon_from_json(const Json &j, const std::string &prefix);
CQBSpec cqb_spec_from_json(const Json &j);
Json cqb_spec_to_json(const CQBSpec &spec);
CQBSpec load_cqb_spec(const std::string &path);
/// Nested CQB specs may be inline objects or paths relative to the file.
TwoCQBSpec two_cqb_spec_from_json(const Json &j, const std::string &base_dir = "");
TwoCQBSpec load_two_cqb_spec(const std::string &path);

}  // namespace cqbsim

#endif
