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

#ifndef CQBSIM_TWO_CQB_H
#define CQBSIM_TWO_CQB_H

#include <array>
#include <vector>

#include "cqbsim/device.h"
#include "cqbsim/gates.h"
#include "cqbsim/io.h"
#include "cqbsim/linalg.h"

namespace cqbsim {

// Two-CQB model, in the same conjugate representation as the single-CQB propagator:
//   H = pi [(Delta_A + s_A) Z_A + eps_A X_A + (Delta_B + s_B) Z_B + eps_B X_B - (zeta / 2) Z_A Z_B]
// so the |11> conditional phase is 2 pi * integral(zeta). Basis index 2 a + b, A first.

enum class CZMode {
    FixedHold,  ///< keep the scheduled hold, solve for the operating detuning
    FreeHold,  ///< keep the operating detuning, solve for the hold
};

struct CZCalibration {
    double hold = 0;
    double operating_detuning = 0;  ///< CZ detuning during the hold [Hz]
    double ramp_duration = 0;
    double ramp_tau = 0;
    double phi_zz = 0;  ///< conditional phase of the schedule [rad]
    /// Mean single-CQB phase rate during the schedule [rad/s], including the -phi_zz/2
    /// local turn that separates the ZZ evolution from a CPhase.
    double eta_a = 0;
    double eta_b = 0;
    bool calibrated = false;

    double duration() const {
        return 2 * ramp_duration + hold;
    }
    void validate() const;
};

Json cz_calibration_to_json(const CZCalibration &c);
CZCalibration cz_calibration_from_json(const Json &j);

/// Continuous controls at time t into the schedule (0 outside [0, duration]).
struct CZControls {
    double detuning = 0;
    double zeta = 0;
    double shift_a = 0;
    double shift_b = 0;
};
CZControls cz_controls_at(const TwoCQBSpec &spec, const CZCalibration &cal, double t);

/// Cell-averaged CZ controls. Cell k covers [k dt, (k+1) dt); the schedule starts at t0.
struct CZSchedule {
    double sample_period = 0;
    double start = 0;
    std::vector<double> detuning, zeta, shift_a, shift_b;

    size_t size() const {
        return zeta.size();
    }
    /// 2 pi sum(zeta) dt.
    double conditional_phase() const;
};
CZSchedule render_cz_schedule(const TwoCQBSpec &spec, const CZCalibration &cal, double t0, size_t n, double dt);
/// Schedule from t0 = 0 with just enough samples to cover it.
CZSchedule cz_schedule(const TwoCQBSpec &spec, const CZCalibration &cal, double dt = kDefaultSamplePeriod);

/// Conditional phase 2 pi integral(zeta) and single-CQB phases 2 pi integral(Delta + s)
/// of the continuous schedule, by Gauss-Legendre quadrature.
struct CZPhases {
    double phi_zz = 0;
    double theta_a = 0;
    double theta_b = 0;
};
CZPhases cz_phases(const TwoCQBSpec &spec, const CZCalibration &cal);

struct CZOptions {
    CZMode mode = CZMode::FixedHold;
    double target = kPi;
    double max_hold = 2e-6;
};

/// Solves for phi_zz = target and records the phase rates.
CZCalibration calibrate_cz(const TwoCQBSpec &spec, const CZOptions &opt = {});

/// Propagates a computational-block state through the CZ controls (no XY drive).
Vec4 evolve_two_cqb(const TwoCQBSpec &spec, const Vec4 &psi, const CZSchedule &schedule);
/// Per-sample two-CQB propagation with XY drives. All vectors share one length.
Mat4 propagate_two_cqb(const TwoCQBSpec &spec, const std::vector<double> &eps_a, const std::vector<double> &eps_b,
                       const CZSchedule &cz, double dt);

/// Diagonal CZ = diag(1, 1, 1, -1).
Mat4 cz_unitary();

struct CZResync {
    CZSchedule schedule;
    Waveform eps_a;  ///< idle XY track of CQB-A over CZ plus its resync pad
    Waveform eps_b;
    double pad_a = 0;
    double pad_b = 0;
    /// Phase beyond plain idling, theta - 2 pi Delta T, for each CQB.
    double extra_phase_a = 0;
    double extra_phase_b = 0;
    /// Ledger after the rendered tracks; nonzero only from the sample grid.
    ZLedger ledger;
};

/// CZ schedule followed by per-CQB idles that bring each CQB's frame back into step
/// with its own gates. `ledger` holds the frame phase each CQB carries in.
CZResync cz_with_resync(const TwoCQBSpec &spec, const CZCalibration &cal, const ZLedger &ledger = {},
                        double dt = kDefaultSamplePeriod);

struct TwoCQBGateSets {
    CalibratedGateSet a;
    CalibratedGateSet b;
    CZCalibration cz;
};

struct TwoCQBProgram {
    double sample_period = 0;
    std::vector<double> eps_a, eps_b;
    CZSchedule cz;
    std::vector<GatePrimitive> gates;  ///< A, B and CZ entries in issue order
    Mat4 ideal = Mat4::Identity();
    ZLedger ledger;  ///< frame phases left on each CQB at the end of the render
    double duration = 0;  ///< continuous length before rendering
};

/// Schedules single-CQB gates on independent tracks (simultaneous when they overlap in
/// time) and CZs on both, with frame resync after every CZ. The logical unitary of the
/// rendered program is (Z(ledger A) x Z(ledger B)) * ideal up to global phase.
TwoCQBProgram compile_two_cqb(const std::vector<SequenceItem> &seq, const TwoCQBSpec &spec,
                              const TwoCQBGateSets &sets, NegativeMode mode = NegativeMode::SignFlip);
Mat4 simulate_two_cqb(const TwoCQBSpec &spec, const TwoCQBProgram &prog);
/// Logical frame of both CQBs.
Mat4 two_cqb_logical_frame(const Mat4 &lab, const TwoCQBGateSets &sets);
Mat4 expected_logical(const TwoCQBProgram &prog);

/// Ideal 4x4 of an A/B/CZ circuit.
Mat4 ideal_two_cqb_unitary(const std::vector<SequenceItem> &seq, const TwoCQBGateSets &sets);

}  // namespace cqbsim

#endif
