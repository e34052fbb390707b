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

#include "cqbsim/gates.h"

#include <cmath>
#include <sstream>

#include "cqbsim/errors.h"

namespace cqbsim {

double wrap_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0) {
        r += kTwoPi;
    }
    // fmod can return 2 pi - tiny; keep the range half open.
    return r >= kTwoPi ? 0 : r;
}

double wrap_signed(double a) {
    double r = wrap_angle(a);
    return r > kPi ? r - kTwoPi : r;
}

GatePrimitive GatePrimitive::x(int sign, int target) {
    GatePrimitive p;
    p.kind = sign > 0 ? GateKind::XPlus : GateKind::XMinus;
    p.target = target;
    return p;
}

GatePrimitive GatePrimitive::y(int sign, int target) {
    GatePrimitive p;
    p.kind = sign > 0 ? GateKind::YPlus : GateKind::YMinus;
    p.target = target;
    return p;
}

GatePrimitive GatePrimitive::z(double angle, int target) {
    if (!std::isfinite(angle)) {
        throw ConfigError("Z angle must be finite", "angle");
    }
    GatePrimitive p;
    p.kind = GateKind::Z;
    p.angle = wrap_angle(angle);
    p.target = target;
    return p;
}

GatePrimitive GatePrimitive::idle(double duration, int target) {
    if (!(duration >= 0) || !std::isfinite(duration)) {
        throw ConfigError("idle duration must be finite and >= 0", "duration");
    }
    GatePrimitive p;
    p.kind = GateKind::Idle;
    p.duration = duration;
    p.target = target;
    return p;
}

GatePrimitive GatePrimitive::cz() {
    GatePrimitive p;
    p.kind = GateKind::CZ;
    return p;
}

std::string GatePrimitive::name() const {
    switch (kind) {
        case GateKind::XPlus:
            return "X+";
        case GateKind::XMinus:
            return "X-";
        case GateKind::YPlus:
            return "Y+";
        case GateKind::YMinus:
            return "Y-";
        case GateKind::Z:
            return "Z";
        case GateKind::CZ:
            return "CZ";
        case GateKind::Idle:
            return "IDLE";
    }
    return "?";
}

Mat2 primitive_unitary(const GatePrimitive &p) {
    switch (p.kind) {
        case GateKind::XPlus:
            return rot_x(kPi / 2);
        case GateKind::XMinus:
            return rot_x(-kPi / 2);
        case GateKind::YPlus:
            return rot_y(kPi / 2);
        case GateKind::YMinus:
            return rot_y(-kPi / 2);
        case GateKind::Z:
            return rot_z(p.angle);
        default:
            throw ConfigError("primitive_unitary: " + p.name() + " has no single-CQB unitary", "kind");
    }
}

namespace {

using P = GatePrimitive;

// Rows 11 and 12 use Y(-pi/2); the printed table repeats rows 10 and 9 there.
std::vector<GatePrimitive> table_row(int id) {
    const double h = kPi / 2, f = kPi, t = 3 * kPi / 2;
    switch (id) {
        case 1:
            return {};
        case 2:
            return {P::x(1), P::x(1)};
        case 3:
            return {P::y(1), P::y(1)};
        case 4:
            return {P::z(f)};
        case 5:
            return {P::x(1), P::z(t)};
        case 6:
            return {P::x(1), P::z(h)};
        case 7:
            return {P::x(-1), P::z(h)};
        case 8:
            return {P::x(-1), P::z(t)};
        case 9:
            return {P::y(1), P::z(h)};
        case 10:
            return {P::y(1), P::z(t)};
        case 11:
            return {P::y(-1), P::z(t)};
        case 12:
            return {P::y(-1), P::z(h)};
        case 13:
            return {P::x(1)};
        case 14:
            return {P::x(-1)};
        case 15:
            return {P::y(1)};
        case 16:
            return {P::y(-1)};
        case 17:
            return {P::z(h)};
        case 18:
            return {P::z(t)};
        case 19:
            return {P::z(f), P::y(1)};
        case 20:
            return {P::z(f), P::y(-1)};
        case 21:
            return {P::x(-1), P::z(f)};
        case 22:
            return {P::x(1), P::z(f)};
        case 23:
            return {P::x(1), P::x(1), P::z(t)};
        case 24:
            return {P::z(t), P::x(-1), P::x(-1)};
        default:
            throw ConfigError("Clifford id must be in 1..24, got " + std::to_string(id), "clifford");
    }
}

struct CliffordTables {
    std::vector<Mat2> unitary;  // index 1..24
    std::vector<std::vector<int>> compose;

    CliffordTables() : unitary(kNumCliffords + 1), compose(kNumCliffords + 1, std::vector<int>(kNumCliffords + 1)) {
        for (int c = 1; c <= kNumCliffords; c++) {
            Mat2 u = Mat2::Identity();
            for (const auto &p : table_row(c)) {
                u = primitive_unitary(p) * u;
            }
            unitary[c] = u;
        }
        for (int a = 1; a <= kNumCliffords; a++) {
            for (int b = 1; b <= kNumCliffords; b++) {
                compose[a][b] = find(Mat2(unitary[b] * unitary[a]), 1e-9);
                if (!compose[a][b]) {
                    throw NumericError("Clifford table is not closed", "clifford");
                }
            }
        }
    }

    int find(const Mat2 &u, double tol) const {
        for (int c = 1; c <= kNumCliffords; c++) {
            if (trace_fidelity(unitary[c], u) > 1 - tol) {
                return c;
            }
        }
        return 0;
    }
};

const CliffordTables &tables() {
    static const CliffordTables t;
    return t;
}

}  // namespace

std::vector<GatePrimitive> clifford_to_primitives(int id) {
    return table_row(id);
}

Mat2 clifford_unitary(int id) {
    table_row(id);
    return tables().unitary[id];
}

int clifford_index(const Mat2 &u, double tol) {
    return tables().find(u, tol);
}

int clifford_compose(int a, int b) {
    table_row(a);
    table_row(b);
    return tables().compose[a][b];
}

int recovery_clifford(const std::vector<int> &seq) {
    if (seq.empty()) {
        throw ConfigError("recovery_clifford needs a nonempty sequence", "sequence");
    }
    int acc = 1;
    for (int c : seq) {
        acc = clifford_compose(acc, c);
    }
    for (int r = 1; r <= kNumCliffords; r++) {
        if (clifford_compose(acc, r) == 1) {
            return r;
        }
    }
    throw NumericError("no inverse in the Clifford table", "clifford");
}

GateWindowSpec CalibratedGateSet::window() const {
    GateWindowSpec w;
    w.eps_p = eps_p;
    w.f_p = f_p;
    w.t_d = t_d;
    w.t_c = t_c;
    w.t_xy = t_xy;
    return w;
}

void CalibratedGateSet::validate() const {
    if (!calibrated) {
        throw ConfigError("gate set is not calibrated", "calibration");
    }
    if (!(delta > 0)) {
        throw ConfigError("calibrated delta must be > 0", "delta");
    }
    if (!(sample_period > 0)) {
        throw ConfigError("sample_period must be > 0", "sample_period");
    }
    window().validate();
    if (t_d < 1.0 / f_p + t_xy - 1e-15) {
        throw ConfigError("window too short for the pulse plus the X/Y shift", "t_d");
    }
}

Json calibrated_gate_set_to_json(const CalibratedGateSet &c) {
    Json j;
    j["eps_p_hz"] = c.eps_p;
    j["f_p_hz"] = c.f_p;
    j["t_d_s"] = c.t_d;
    j["t_c_s"] = c.t_c;
    j["t_xy_s"] = c.t_xy;
    j["t_delta_s"] = c.t_delta();
    j["delta_hz"] = c.delta;
    j["axis_phase_rad"] = c.axis_phase;
    j["residual_infidelity"] = c.residual_infidelity;
    j["sample_period_s"] = c.sample_period;
    return j;
}

CalibratedGateSet calibrated_gate_set_from_json(const Json &j) {
    CalibratedGateSet c;
    auto get = [&](const char *key) {
        if (!j.contains(key) || !j[key].is_number()) {
            throw ConfigError(std::string("missing numeric field ") + key, key);
        }
        return j[key].get<double>();
    };
    c.eps_p = get("eps_p_hz");
    c.f_p = get("f_p_hz");
    c.t_d = get("t_d_s");
    c.t_c = get("t_c_s");
    c.t_xy = get("t_xy_s");
    c.delta = get("delta_hz");
    c.axis_phase = get("axis_phase_rad");
    c.residual_infidelity = j.value("residual_infidelity", 0.0);
    c.sample_period = j.value("sample_period_s", kDefaultSamplePeriod);
    c.calibrated = true;
    c.validate();
    return c;
}

size_t samples_covering(double total, double dt) {
    if (total <= 0) {
        return 0;
    }
    return static_cast<size_t>(std::ceil(total / dt - 1e-9));
}

GateTrack::GateTrack(const CalibratedGateSet &calib, NegativeMode mode) : calib_(calib), mode_(mode) {
    calib_.validate();
}

void GateTrack::add_window(Axis axis, int sign) {
    double onset = cursor_ + ideal_pulse_onset(calib_.window(), Axis::X);
    if (axis == Axis::Y) {
        onset -= calib_.t_xy;
    }
    pulses_.push_back({onset, static_cast<double>(sign)});
    cursor_ += calib_.t_d;
}

const GatePrimitive &GateTrack::add(GatePrimitive p, const std::string &label) {
    double dt = calib_.sample_period;
    p.start = cursor_;
    p.snap_error = std::abs(std::round(cursor_ / dt) * dt - cursor_);
    switch (p.kind) {
        case GateKind::XPlus:
        case GateKind::YPlus:
            add_window(p.kind == GateKind::XPlus ? Axis::X : Axis::Y, +1);
            break;
        case GateKind::XMinus:
        case GateKind::YMinus: {
            Axis axis = p.kind == GateKind::XMinus ? Axis::X : Axis::Y;
            if (mode_ == NegativeMode::SignFlip) {
                add_window(axis, -1);
            } else {
                // Z(pi) X(pi/2) Z(pi) = -X(-pi/2).
                cursor_ += calib_.t_delta() / 2;
                add_window(axis, +1);
                cursor_ += calib_.t_delta() / 2;
            }
            break;
        }
        case GateKind::Z:
            cursor_ += p.angle / (kTwoPi * calib_.delta);
            break;
        case GateKind::Idle:
            cursor_ += p.duration;
            break;
        case GateKind::CZ:
            throw ConfigError("CZ needs the two-CQB compiler", "kind");
    }
    p.length = cursor_ - p.start;
    spans_.push_back({label.empty() ? p.name() : label, p.start, cursor_});
    gates_.push_back(p);
    return gates_.back();
}

void GateTrack::add_idle(double duration, const std::string &label) {
    if (duration <= 0) {
        return;
    }
    add(GatePrimitive::idle(duration), label);
}

void GateTrack::annotate(const std::string &label, double from, double to) {
    spans_.push_back({label, from, to});
}

Waveform GateTrack::render(double total) const {
    double dt = calib_.sample_period;
    if (total < cursor_ - 1e-9 * dt) {
        throw ConfigError("render length shorter than the scheduled gates", "total");
    }
    size_t n = samples_covering(total, dt);
    std::vector<double> s(n, 0.0);
    for (const auto &p : pulses_) {
        add_sinusoid(s, dt, p.onset, calib_.eps_p, calib_.f_p, p.sign);
    }
    std::vector<Annotation> ann;
    for (const auto &sp : spans_) {
        size_t a = std::min(n, static_cast<size_t>(std::llround(sp.from / dt)));
        size_t b = std::min(n, static_cast<size_t>(std::llround(sp.to / dt)));
        ann.push_back({sp.label, a, std::max(a, b)});
    }
    return Waveform(std::move(s), dt, 0, std::move(ann));
}

CompiledSequence compile_sequence(const std::vector<SequenceItem> &seq, const CalibratedGateSet &calib,
                                  const ZLedger &ledger, NegativeMode mode) {
    GateTrack track(calib, mode);
    double omega = kTwoPi * calib.delta;
    track.add_idle(wrap_angle(-ledger.phase[0]) / omega, "sync");
    Mat2 ideal = Mat2::Identity();
    for (const auto &item : seq) {
        if (item.clifford) {
            double from = track.cursor();
            for (const auto &p : clifford_to_primitives(item.clifford)) {
                track.add(p);
                ideal = primitive_unitary(p) * ideal;
            }
            track.annotate("C" + std::to_string(item.clifford), from, track.cursor());
            continue;
        }
        const auto &g = item.gate;
        if (g.kind == GateKind::CZ) {
            throw ConfigError("CZ in a single-CQB sequence", "sequence");
        }
        track.add(g);
        ideal = (g.kind == GateKind::Idle ? rot_z(omega * g.duration) : primitive_unitary(g)) * ideal;
    }
    CompiledSequence out;
    double total = track.cursor();
    size_t n = samples_covering(total, calib.sample_period);
    out.waveform = track.render(static_cast<double>(n) * calib.sample_period);
    out.gates = track.gates();
    out.ledger = ledger;
    out.ledger.phase[0] = wrap_angle(omega * (static_cast<double>(n) * calib.sample_period - total));
    out.ideal = special_unitary(ideal);
    out.ideal_duration = total;
    return out;
}

Mat2 to_logical_frame(const Mat2 &lab, const CalibratedGateSet &calib) {
    return special_unitary(rot_z(-calib.axis_phase) * lab * rot_z(calib.axis_phase));
}

static double parse_number(const std::string &tok, int line) {
    try {
        size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size() || !std::isfinite(v)) {
            throw std::invalid_argument(tok);
        }
        return v;
    } catch (const std::exception &) {
        throw ConfigError("line " + std::to_string(line) + ": bad number '" + tok + "'", "circuit");
    }
}

std::vector<SequenceItem> parse_circuit(const std::string &text) {
    std::vector<SequenceItem> out;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        line++;
        auto hash = raw.find('#');
        if (hash != std::string::npos) {
            raw.resize(hash);
        }
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) {
            tok.push_back(t);
        }
        if (tok.empty()) {
            continue;
        }
        auto fail = [&](const std::string &why) {
            return ConfigError("line " + std::to_string(line) + ": " + why, "circuit");
        };
        int target = 0;
        size_t k = 0;
        if (tok[0] == "A" || tok[0] == "B") {
            target = tok[0] == "B";
            k = 1;
        }
        if (k >= tok.size()) {
            throw fail("missing gate after target");
        }
        const std::string &g = tok[k];
        size_t nargs = tok.size() - k - 1;
        auto want = [&](size_t n) {
            if (nargs != n) {
                throw fail("gate '" + g + "' takes " + std::to_string(n) + " argument(s)");
            }
        };
        GatePrimitive p;
        if (g == "X+" || g == "X-" || g == "Y+" || g == "Y-") {
            want(0);
            int sign = g[1] == '+' ? 1 : -1;
            p = g[0] == 'X' ? GatePrimitive::x(sign, target) : GatePrimitive::y(sign, target);
        } else if (g == "Z") {
            want(1);
            p = GatePrimitive::z(parse_number(tok[k + 1], line), target);
        } else if (g == "IDLE") {
            want(1);
            double d = parse_number(tok[k + 1], line);
            if (d < 0) {
                throw fail("negative idle");
            }
            p = GatePrimitive::idle(d, target);
        } else if (g == "CZ") {
            want(0);
            if (k) {
                throw fail("CZ takes no target");
            }
            p = GatePrimitive::cz();
        } else if (g.size() > 1 && g[0] == 'C') {
            want(0);
            int id = static_cast<int>(parse_number(g.substr(1), line));
            if (id < 1 || id > kNumCliffords || std::to_string(id) != g.substr(1)) {
                throw fail("Clifford id must be in 1..24");
            }
            SequenceItem s = SequenceItem::of_clifford(id);
            s.gate.target = target;
            out.push_back(s);
            continue;
        } else {
            throw fail("unknown gate '" + g + "'");
        }
        out.push_back(SequenceItem::of_gate(p));
    }
    return out;
}

Json timing_report(const std::vector<GatePrimitive> &gates, double dt) {
    Json j;
    j["sample_period_s"] = dt;
    Json arr = Json::array();
    for (size_t i = 0; i < gates.size(); i++) {
        const auto &g = gates[i];
        Json e;
        e["index"] = i;
        e["gate"] = g.name();
        if (g.kind == GateKind::Z) {
            e["angle_rad"] = g.angle;
        }
        e["target"] = g.kind == GateKind::CZ ? "AB" : (g.target ? "B" : "A");
        e["start_s"] = g.start;
        e["duration_s"] = g.length;
        e["snap_error_s"] = g.snap_error;
        arr.push_back(e);
    }
    j["gates"] = arr;
    return j;
}

}  // namespace cqbsim
