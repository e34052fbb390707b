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

#ifndef CQBSIM_NOISE_H
#define CQBSIM_NOISE_H

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "cqbsim/device.h"
#include "cqbsim/fit.h"
#include "cqbsim/gates.h"
#include "cqbsim/io.h"

namespace cqbsim {

struct FluxNoiseSpec {
    double amplitude = 0;  ///< A at 1 Hz [Phi0 / sqrt(Hz)]
    double exponent = 1;  ///< S(f) = A^2 / f^exponent
    double f_low = 1;
    double f_high = 1e6;
    bool independent = true;  ///< independent offsets per transmon
    /// Echo halves differ by the change in segment-mean offset, variance 2 (V - C)
    /// of S(f) filtered by sinc^2. False refocuses echo exactly.
    bool drift = true;

    void validate() const;
    /// Integral of S over [lo, hi].
    double band_variance(double lo, double hi) const;
    double variance() const {
        return band_variance(f_low, f_high);
    }
    /// Variance of the mean offset over a window of length t.
    double window_variance(double t) const;
    /// Covariance of the mean offsets over two adjacent windows of length t.
    double window_covariance(double t) const;
};

FluxNoiseSpec flux_noise_from_json(const Json &j);
Json flux_noise_to_json(const FluxNoiseSpec &s);

/// Per-trajectory quasi-static offsets (transmon 1, transmon 2) [Phi0].
std::vector<std::array<double, 2>> sample_quasistatic_flux(const FluxNoiseSpec &spec, int n_traj, uint64_t seed);

struct PhotonNoiseSpec {
    double n_bar = 0;
    double kappa = 0;  ///< kappa / 2 pi [Hz]
    double chi = 0;  ///< chi / 2 pi [Hz]; the qubit shifts by 2 chi per photon
    double detuning = 0;  ///< drive detuning from the bare resonator / 2 pi [Hz]

    void validate() const;
};

/// Gamma, B [1/s, rad/s] and A of the driven-resonator Ramsey law, from the
/// coherent-state solution with the resonator starting in its ground-qubit steady state.
struct GambettaTerms {
    double gamma = 0;
    double b = 0;
    std::complex<double> a;
    std::complex<double> lambda;  ///< kappa/2 + i (chi + detuning), angular
};
GambettaTerms gambetta_terms(const PhotonNoiseSpec &spec);

struct DecayCurve {
    std::vector<double> tau;
    std::vector<double> p_e;  ///< (1 + Re S) / 2
    std::vector<double> coherence;  ///< |S|
    double one_over_e = 0;  ///< first tau with |S| = 1/e [s]; inf if never
};

/// S(t) = exp[-(1/T2R + Gamma) t - i (omega_a + B) t] exp[A (1 - exp(-lambda t))].
std::complex<double> gambetta_signal(const PhotonNoiseSpec &spec, double base_t2r, double omega_a, double t);
DecayCurve gambetta_ramsey(const PhotonNoiseSpec &spec, double base_t2r, const std::vector<double> &tau,
                           double omega_a = 0);

/// CQB Ramsey under photon shot noise: each transmon's Stark shift 2 chi dn(t) with
/// dn an Ornstein-Uhlenbeck process (variance n_bar, rate kappa/2), mapped through
/// photon_noise_sensitivity. Monte Carlo over n_traj trajectories.
DecayCurve cqb_photon_ramsey(const CQBSpec &cqb, const PhotonNoiseSpec &t1, const PhotonNoiseSpec &t2,
                             double base_t2r, const std::vector<double> &tau, int n_traj, uint64_t seed,
                             int workers = 1);

/// Linear interpolation of the first 1/e crossing of a decreasing curve.
double one_over_e_time(const std::vector<double> &tau, const std::vector<double> &coherence);

struct DecayFit {
    std::string model;
    FitResult fit;
    double gamma_cqb = 0;
    double gamma_cqb_error = 0;
    double gamma_leak = 0;
    double gamma_leak_error = 0;
    double amplitude = 0;
    /// 95% one-sided lower bound on 1/gamma_cqb when gamma_cqb is consistent with 0, else 0.
    double t1_lower_bound = 0;
    double residual_norm = 0;

    Json to_json() const;
};

/// Joint fit of one preparation: P_prep = [1/2 + 1/2 e^(-Gc t)] e^(-GL t) A,
/// P_other = [1/2 - 1/2 e^(-Gc t)] e^(-GL t) A, P_gg = 1 - A e^(-GL t).
/// sigma <= 0 estimates the noise from the residuals.
DecayFit fit_t1_leakage(const std::vector<double> &t, const std::vector<double> &p_prep,
                        const std::vector<double> &p_other, const std::vector<double> &p_gg, double sigma = 0);

enum class CoherenceProtocol { Ramsey, Echo };
const char *protocol_name(CoherenceProtocol p);
CoherenceProtocol protocol_from_string(const std::string &s);

struct CoherenceResult {
    CoherenceProtocol protocol = CoherenceProtocol::Ramsey;
    std::vector<double> tau;  ///< realized free-evolution times (whole t_delta periods)
    std::vector<double> p0;  ///< return probability of the protocol
    std::vector<double> coherence;  ///< ensemble |<sigma_+>| before the last window
    FitResult fit;
    double t2 = 0;
    double t2_error = 0;
};

/// Ramsey: X(pi/2), N Z(2 pi) idles, X(pi/2). Echo: X(pi/2), N/2 Z(2 pi), Y(pi/2) Y(pi/2),
/// N/2 Z(2 pi), X(pi/2). Each trajectory carries quasi-static flux offsets. T2 is an
/// exponential fit to the coherence down to its first point below 1/e.
CoherenceResult simulate_coherence(const CQBSpec &spec, const CalibratedGateSet &calib, const FluxNoiseSpec &noise,
                                   CoherenceProtocol protocol, const std::vector<double> &tau, int n_traj,
                                   uint64_t seed, int workers = 1);

/// 1 / (2 pi c sigma^2): the dephasing scale of the quadratic flux coupling.
double flux_dephasing_scale(const CQBSpec &spec, const FluxNoiseSpec &noise);

}  // namespace cqbsim

#endif
