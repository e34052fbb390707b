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

#ifndef CQBSIM_PROPAGATOR_H
#define CQBSIM_PROPAGATOR_H

#include <vector>

#include "cqbsim/device.h"
#include "cqbsim/linalg.h"
#include "cqbsim/waveform.h"

namespace cqbsim {

// Representation: states and unitaries are reported in the complex conjugate of the
// lab representation of H = -(1/2)(Delta sz + eps sx) (angular), i.e. every step is
// exp(-i pi (Delta sz + eps sx) dt). Populations are identical in both; in this one
// idling is the positive rotation Z(2 pi Delta t).

/// Density matrix over {|0>, |1>, |leak>}.
struct CQBState {
    Mat3 rho = Mat3::Zero();
    double time = 0;

    static CQBState basis(int k);
    static CQBState from_ket(const Vec3 &psi);
    static CQBState from_qubit_ket(const Vec2 &psi);
    double population(int k) const {
        return rho(k, k).real();
    }
    /// Throws NumericError when Hermiticity, trace or positivity are violated.
    void validate(double tol = 1e-9) const;
};

struct LeakageRates {
    double leak_from_1 = 0;  ///< |1> -> |leak| [1/s]
    double leak_from_0 = 0;  ///< |0> -> |leak| [1/s]
    double gamma_cqb = 0;  ///< intra-subspace switching, equal up and down [1/s]
    double gamma_phi = 0;  ///< pure dephasing of the 0/1 coherence [1/s]

    double total() const {
        return leak_from_1 + leak_from_0 + gamma_cqb + gamma_phi;
    }
    void validate() const;
};

enum class ZFrame { Lab, Rotating };
const char *frame_name(ZFrame f);

/// exp(-i pi (delta sz + eps sx) dt).
Mat2 step_propagator(double delta, double eps, double dt);

/// Time-ordered product over samples, no phase normalization.
Mat2 propagate_samples(double delta, const std::vector<double> &eps, double dt);
Vec2 propagate_ket(double delta, const Vec2 &psi, const std::vector<double> &eps, double dt);

struct BlochPoint {
    double t = 0;
    double x = 0, y = 0, z = 0;
};

/// <sx>, <sy>, <sz> in the reported representation (the axes of rot_x/rot_y/rot_z)
/// at t = 0 and after every `stride` samples, plus the final sample.
std::vector<BlochPoint> bloch_trace(double delta, const Vec2 &psi, const std::vector<double> &eps, double dt,
                                    int stride = 1);

/// Special-unitary propagator over the computational block. In the rotating frame
/// the idle precession exp(-i pi Delta T sz) is removed.
Mat2 unitary_of_waveform(const CQBSpec &spec, const Waveform &w, ZFrame frame = ZFrame::Lab);

CQBState evolve_coherent(const CQBSpec &spec, const CQBState &state, const Waveform &w);

/// Three-level Lindblad evolution. Jump operators: sqrt(G10)|leak><1|,
/// sqrt(G00)|leak><0|, sqrt(Gcqb/2)|0><1|, sqrt(Gcqb/2)|1><0|, sqrt(Gphi/2) sz.
/// Constant-epsilon runs use the exact generator exponential; other samples use
/// Strang splitting around the exact coherent step.
CQBState evolve_lindblad(const CQBSpec &spec, const LeakageRates &rates, const CQBState &state, const Waveform &w);

/// Populations (P0, P1, Pleak) after idling at eps = 0 for `duration`, exact.
std::vector<double> idle_populations(const LeakageRates &rates, const CQBState &state, double duration);

}  // namespace cqbsim

#endif
