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

#ifndef CQBSIM_GATES_H
#define CQBSIM_GATES_H

#include <array>
#include <string>
#include <vector>

#include "cqbsim/io.h"
#include "cqbsim/linalg.h"
#include "cqbsim/waveform.h"

namespace cqbsim {

enum class GateKind { XPlus, XMinus, YPlus, YMinus, Z, CZ, Idle };

struct GatePrimitive {
    GateKind kind = GateKind::Idle;
    double angle = 0;  ///< Z angle [rad], reduced to [0, 2 pi)
    double duration = 0;  ///< Idle length [s]
    int target = 0;  ///< 0 = CQB-A, 1 = CQB-B; ignored for CZ
    // Resolved timing, filled in by the compiler.
    double start = 0;
    double length = 0;
    double snap_error = 0;

    static GatePrimitive x(int sign, int target = 0);
    static GatePrimitive y(int sign, int target = 0);
    static GatePrimitive z(double angle, int target = 0);
    static GatePrimitive idle(double duration, int target = 0);
    static GatePrimitive cz();

    bool is_window() const {
        return kind == GateKind::XPlus || kind == GateKind::XMinus || kind == GateKind::YPlus ||
               kind == GateKind::YMinus;
    }
    std::string name() const;
};

/// Reduces an angle to [0, 2 pi).
double wrap_angle(double a);
/// Reduces an angle to (-pi, pi].
double wrap_signed(double a);

/// Ideal special-unitary matrix. Throws ConfigError for CZ and Idle.
Mat2 primitive_unitary(const GatePrimitive &p);

constexpr int kNumCliffords = 24;

/// Primitives of Clifford `id` (1..24) in time order.
std::vector<GatePrimitive> clifford_to_primitives(int id);
/// Time-ordered product of the primitives of `id`.
Mat2 clifford_unitary(int id);
/// Index of the Clifford equal to `u` up to global phase, or 0 if none.
int clifford_index(const Mat2 &u, double tol = 1e-9);
/// Id of `b` applied after `a`.
int clifford_compose(int a, int b);
/// The Clifford that returns `seq` (applied left to right) to the identity class.
int recovery_clifford(const std::vector<int> &seq);

/// Per-CQB frame bookkeeping. `phase` is Z rotation already applied beyond the ideal
/// schedule; the next compiled segment starts by idling it away.
struct ZLedger {
    std::array<double, 2> phase = {0, 0};
    std::array<double, 2> eta = {0, 0};  ///< phase rate during CZ [rad/s]
};

/// Output of the tune-up pipeline, consumed by the compiler.
struct CalibratedGateSet {
    double eps_p = 0;
    double f_p = 125e6;
    double t_d = 0;
    double t_c = 0;
    double t_xy = 0;
    double delta = 0;  ///< measured gap [Hz]
    /// Angle of the calibrated X(pi/2) rotation axis from x in the lab frame. Logical
    /// unitaries are Z(-axis_phase) U Z(axis_phase).
    double axis_phase = 0;
    double residual_infidelity = 0;
    double sample_period = kDefaultSamplePeriod;
    bool calibrated = false;

    double t_delta() const {
        return 1.0 / delta;
    }
    GateWindowSpec window() const;
    void validate() const;
};

Json calibrated_gate_set_to_json(const CalibratedGateSet &c);
CalibratedGateSet calibrated_gate_set_from_json(const Json &j);

/// How X(-pi/2) and Y(-pi/2) are realized.
enum class NegativeMode { SignFlip, ZSandwich };

/// Continuous-time builder for one CQB's control line. Pulses are placed at exact
/// (sub-sample) onsets and rendered once at the end.
class GateTrack {
   public:
    GateTrack(const CalibratedGateSet &calib, NegativeMode mode = NegativeMode::SignFlip);

    double cursor() const {
        return cursor_;
    }
    /// Appends a gate and returns it with resolved timing.
    const GatePrimitive &add(GatePrimitive p, const std::string &label = "");
    void add_idle(double duration, const std::string &label = "");
    /// Annotates [from, to) in continuous time.
    void annotate(const std::string &label, double from, double to);
    const std::vector<GatePrimitive> &gates() const {
        return gates_;
    }
    /// Renders round-up(total / dt) samples, with total >= cursor().
    Waveform render(double total) const;

   private:
    struct Pulse {
        double onset;
        double sign;
    };
    void add_window(Axis axis, int sign);

    CalibratedGateSet calib_;
    NegativeMode mode_;
    double cursor_ = 0;
    std::vector<Pulse> pulses_;
    std::vector<GatePrimitive> gates_;
    struct Span {
        std::string label;
        double from, to;
    };
    std::vector<Span> spans_;
};

/// Number of samples that covers `total` seconds.
size_t samples_covering(double total, double dt);

/// A sequence entry: a Clifford id (1..24) or a primitive.
struct SequenceItem {
    int clifford = 0;
    GatePrimitive gate;

    static SequenceItem of_clifford(int id, int target = 0) {
        SequenceItem s;
        s.clifford = id;
        s.gate.target = target;
        return s;
    }
    static SequenceItem of_gate(const GatePrimitive &g) {
        SequenceItem s;
        s.gate = g;
        return s;
    }
};

struct CompiledSequence {
    Waveform waveform;
    std::vector<GatePrimitive> gates;  ///< expanded primitives with timing
    ZLedger ledger;  ///< ledger after the sequence
    Mat2 ideal = Mat2::Identity();  ///< ideal logical unitary of the sequence
    double ideal_duration = 0;
};

/// Compiles a single-CQB sequence. With `in` and `out` the incoming and returned
/// ledgers, the logical unitary of the waveform is
/// Z(out.phase[0]) * ideal * Z(-in.phase[0]) up to global phase.
CompiledSequence compile_sequence(const std::vector<SequenceItem> &seq, const CalibratedGateSet &calib,
                                  const ZLedger &ledger = {}, NegativeMode mode = NegativeMode::SignFlip);
/// Maps a lab-frame unitary into the calibrated logical frame.
Mat2 to_logical_frame(const Mat2 &lab, const CalibratedGateSet &calib);

/// Parses `X+`, `Y-`, `Z <rad>`, `IDLE <s>`, `CZ`, `C<n>`, with an optional
/// leading `A` or `B` target. Blank lines and `#` comments are skipped.
std::vector<SequenceItem> parse_circuit(const std::string &text);

Json timing_report(const std::vector<GatePrimitive> &gates, double dt);

}  // namespace cqbsim

#endif
