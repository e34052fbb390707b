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

#ifndef CQBSIM_BENCHMARKING_H
#define CQBSIM_BENCHMARKING_H

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cqbsim/device.h"
#include "cqbsim/gates.h"
#include "cqbsim/io.h"
#include "cqbsim/linalg.h"
#include "cqbsim/propagator.h"
#include "cqbsim/two_cqb.h"

namespace cqbsim {

enum class RBMode { Single, Simultaneous, Interleaved };
const char *rb_mode_name(RBMode m);

// A length m counts every Clifford layer executed, the recovery included.
struct RBConfig {
    std::vector<int> lengths;
    int sequences_per_length = 30;
    uint64_t seed = 0;
    RBMode mode = RBMode::Single;
    bool interleave_cz = false;  ///< interleaved mode: CZ before every layer
    int shots = 0;  ///< 0 keeps exact probabilities
    bool fit_spam = false;  ///< free (a, b, s) instead of the fixed 1/d, 1 - 1/d, 1
    int workers = 1;

    void validate() const;
};

RBConfig rb_config_from_json(const Json &j);
Json rb_config_to_json(const RBConfig &c);

struct Populations {
    double p0 = 0;
    double p1 = 0;
    double leak = 0;
};

/// Time-ordered Clifford ids (recovery last) and a per-sequence seed for stochastic models.
using SingleExecutor = std::function<Populations(const std::vector<int> &cliffords, uint64_t seed)>;

struct TwoQubitSequence {
    std::vector<std::array<int, 2>> layers;  ///< random local layers (A, B), recovery excluded
    bool interleave_cz = false;
    Mat4 recovery = Mat4::Identity();  ///< ideal inverse of everything before it
    std::array<int, 2> recovery_local = {0, 0};  ///< local recovery ids when no CZ is interleaved
};

struct TwoQubitPopulations {
    std::array<double, 4> p = {0, 0, 0, 0};  ///< |00>, |01>, |10>, |11>
    double leak = 0;
};

using TwoQubitExecutor = std::function<TwoQubitPopulations(const TwoQubitSequence &seq, uint64_t seed)>;

struct RBFit {
    int dimension = 2;
    double lambda = 1, lambda_error = 0;
    double lambda_leak = 1, lambda_leak_error = 0;
    /// lambda_leak from the in-subspace total alone.
    double lambda_leak_sum = 1, lambda_leak_sum_error = 0;
    double fidelity = 1, fidelity_error = 0;  ///< ((d - 1) lambda + 1) / d
    double fidelity_leak = 1, fidelity_leak_error = 0;  ///< lambda_leak
    double spam_a = 0, spam_b = 0, spam_s = 1;
    bool spam = false;
    double chi2 = 0;
    bool converged = false;

    Json to_json() const;
};

/// Joint fit of p_rec = (a + b lambda^m) lambda_leak^m and
/// p_other = (s - a - b lambda^m) lambda_leak^m, with a = 1/d, b = 1 - 1/d, s = 1 unless
/// `spam`. Standard errors weight the points when given.
RBFit fit_rb_decay(const std::vector<int> &lengths, const std::vector<double> &p_rec,
                   const std::vector<double> &p_other, int dimension, const std::vector<double> &sem_rec = {},
                   const std::vector<double> &sem_other = {}, bool spam = false);

RBFit fit_single_with_leakage(const std::vector<int> &lengths, const std::vector<double> &p0,
                              const std::vector<double> &p1, const std::vector<double> &sem0 = {},
                              const std::vector<double> &sem1 = {}, bool spam = false);

struct RBRecord {
    int length = 0;
    int index = 0;
    double p_rec = 0;
    double p_other = 0;
    double leak = 0;
};

struct RBOutcome {
    RBConfig config;
    int dimension = 2;
    std::vector<int> lengths;
    /// Per-length means: recovery probability (|0> or |00>), the rest of the subspace, leak.
    std::vector<double> p_rec, p_other, p_leak;
    std::vector<double> sem_rec, sem_other;
    std::vector<RBRecord> records;
    RBFit fit;

    Json to_json() const;
};

/// Uniform random Cliffords, independent per position, one stream per (length, index).
std::vector<int> random_clifford_sequence(int length, uint64_t seed, uint64_t stream);

RBOutcome run_rb(const RBConfig &config, const SingleExecutor &exec);
/// Two-CQB reference (interleave_cz false) or interleaved (true) RB with local layers.
RBOutcome run_two_qubit_rb(const RBConfig &config, const TwoQubitExecutor &exec);

struct InterleavedFit {
    double ratio = 1, ratio_error = 0;  ///< rho / lambda
    double fidelity = 1, fidelity_error = 0;  ///< ((d - 1) rho / lambda + 1) / d, d = 4
    double leak_ratio = 1, leak_ratio_error = 0;  ///< rho_leak / lambda_leak
    bool unphysical = false;  ///< rho exceeds lambda beyond 2 sigma

    Json to_json() const;
};
InterleavedFit fit_interleaved_cz(const RBOutcome &reference, const RBOutcome &interleaved);

/// One executor call per pair of simultaneous sequences; returns the marginals.
using SimultaneousExecutor = std::function<std::array<Populations, 2>(
    const std::vector<int> &seq_a, const std::vector<int> &seq_b, uint64_t seed)>;
/// Independent sequences on each CQB executed together; marginals fitted separately.
std::array<RBOutcome, 2> run_simultaneous_rb(const RBConfig &config_a, const RBConfig &config_b,
                                             const SimultaneousExecutor &exec);

// Executors.

/// Exact channel: ideal Clifford, then depolarizing rho -> (1 - p) rho + p tr(rho) I / 2,
/// then a state-independent leak of 1 - lambda_leak.
struct DepolarizingChannel {
    double p = 0;
    double lambda_leak = 1;
};
SingleExecutor depolarizing_executor(const DepolarizingChannel &ch);

/// Two-CQB version: each local layer is followed by 4-dim depolarizing p_layer and leak;
/// an interleaved CZ is ideal CZ followed by p_cz and lambda_leak_cz.
struct TwoQubitChannel {
    double p_layer = 0;
    double lambda_leak_layer = 1;
    double p_cz = 0;
    double lambda_leak_cz = 1;
};
TwoQubitExecutor two_qubit_channel_executor(const TwoQubitChannel &ch);

/// Clifford-level channels from the compiled waveforms under Lindblad leakage and
/// dephasing: each Clifford's 3-level superoperator is built once in the logical frame,
/// with the compiler's residual frame phase removed.
SingleExecutor compiled_lindblad_executor(const CQBSpec &spec, const CalibratedGateSet &calib,
                                          const LeakageRates &rates);

/// Full waveform propagation with a quasi-static gap offset N(0, sigma_delta) per sequence.
SingleExecutor compiled_unitary_executor(const CQBSpec &spec, const CalibratedGateSet &calib, double sigma_delta);

/// Both CQBs rendered on simultaneous tracks and propagated together, with independent
/// quasi-static gap offsets and an optional always-on ZZ rate [Hz].
SimultaneousExecutor simultaneous_unitary_executor(const TwoCQBSpec &spec, const TwoCQBGateSets &sets,
                                                   double sigma_delta, double parked_zz = 0);

/// Start times of each Clifford on both tracks of a simultaneous program.
Json simultaneous_timing(const std::vector<int> &seq_a, const std::vector<int> &seq_b, const TwoCQBSpec &spec,
                         const TwoCQBGateSets &sets);

void write_rb_records_csv(const std::string &path, const RBOutcome &out);

}  // namespace cqbsim

#endif
