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

#include "cqbsim/two_cqb.h"

#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "cqbsim/errors.h"
#include "cqbsim/propagator.h"
#include "cqbsim/waveform.h"

namespace cqbsim {

namespace {

// 5-point Gauss-Legendre on [-1, 1].
constexpr double kNodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                              0.9061798459386640};
constexpr double kWeights[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                0.2369268850561891};

template <typename F>
void integrate(double a, double b, int pieces, const F &f) {
    if (b <= a) {
        return;
    }
    double h = (b - a) / pieces;
    for (int p = 0; p < pieces; p++) {
        double mid = a + (p + 0.5) * h;
        for (int k = 0; k < 5; k++) {
            f(mid + 0.5 * h * kNodes[k], 0.5 * h * kWeights[k]);
        }
    }
}

double ramp_shape(const CZCalibration &cal, double t) {
    double r = cal.ramp_duration, end = cal.duration();
    if (t < 0 || t > end) {
        return 0;
    }
    if (r <= 0) {
        return 1;
    }
    if (t < r) {
        return gaussian_ramp_profile(t, cal.ramp_tau, r);
    }
    if (t > r + cal.hold) {
        return gaussian_ramp_profile(end - t, cal.ramp_tau, r);
    }
    return 1;
}

// Piece boundaries of a schedule starting at t0.
std::array<double, 4> breakpoints(const CZCalibration &cal, double t0) {
    return {t0, t0 + cal.ramp_duration, t0 + cal.ramp_duration + cal.hold, t0 + cal.duration()};
}

CZCalibration trial(const TwoCQBSpec &spec, double hold, double op) {
    CZCalibration c;
    c.hold = hold;
    c.operating_detuning = op;
    c.ramp_duration = spec.ramp_duration;
    c.ramp_tau = spec.ramp_tau;
    c.calibrated = true;
    return c;
}

// Adds the cell averages of one schedule starting at t0 into `s`.
void add_event(CZSchedule &s, const TwoCQBSpec &spec, const CZCalibration &cal, double t0) {
    double dt = s.sample_period;
    auto bp = breakpoints(cal, t0);
    if (s.size() == 0 || bp[3] <= 0) {
        return;
    }
    size_t first = static_cast<size_t>(std::max(0.0, std::floor(t0 / dt)));
    size_t last = std::min(s.size(), static_cast<size_t>(std::ceil(bp[3] / dt)) + 1);
    for (size_t k = first; k < last; k++) {
        double a = static_cast<double>(k) * dt, b = a + dt;
        double det = 0, z = 0, sa = 0, sb = 0, covered = 0;
        for (int piece = 0; piece < 3; piece++) {
            double lo = std::max(a, bp[piece]), hi = std::min(b, bp[piece + 1]);
            integrate(lo, hi, 1, [&](double t, double w) {
                CZControls c = cz_controls_at(spec, cal, t - t0);
                det += w * c.detuning;
                z += w * c.zeta;
                sa += w * c.shift_a;
                sb += w * c.shift_b;
                covered += w;
            });
        }
        if (covered <= 0) {
            continue;
        }
        s.detuning[k] += (det + (dt - covered) * spec.idle_detuning) / dt - spec.idle_detuning;
        s.zeta[k] += z / dt;
        s.shift_a[k] += sa / dt;
        s.shift_b[k] += sb / dt;
    }
}

CZSchedule empty_schedule(const TwoCQBSpec &spec, size_t n, double dt) {
    CZSchedule s;
    s.sample_period = dt;
    s.detuning.assign(n, spec.idle_detuning);
    s.zeta.assign(n, 0.0);
    s.shift_a.assign(n, 0.0);
    s.shift_b.assign(n, 0.0);
    return s;
}

Mat4 embed(const Mat2 &u, int target) {
    return target == 0 ? kron(u, Mat2::Identity()) : kron(Mat2::Identity(), u);
}

const CalibratedGateSet &set_for(const TwoCQBGateSets &sets, int target) {
    if (target != 0 && target != 1) {
        throw ConfigError("target must be A (0) or B (1)", "target");
    }
    return target == 0 ? sets.a : sets.b;
}

}  // namespace

void CZCalibration::validate() const {
    if (!calibrated) {
        throw ConfigError("CZ is not calibrated", "cz");
    }
    if (!(hold >= 0) || !(ramp_duration >= 0) || !std::isfinite(hold)) {
        throw ConfigError("CZ hold and ramp must be finite and >= 0", "cz.hold_s");
    }
    if (ramp_duration > 0 && !(ramp_tau > 0)) {
        throw ConfigError("CZ ramp time constant must be > 0", "cz.ramp_tau_s");
    }
}

Json cz_calibration_to_json(const CZCalibration &c) {
    return Json{{"hold_s", c.hold},
                {"operating_detuning_hz", c.operating_detuning},
                {"ramp_s", c.ramp_duration},
                {"ramp_tau_s", c.ramp_tau},
                {"duration_s", c.duration()},
                {"phi_zz_rad", c.phi_zz},
                {"eta_a_rad_per_s", c.eta_a},
                {"eta_b_rad_per_s", c.eta_b}};
}

CZCalibration cz_calibration_from_json(const Json &j) {
    CZCalibration c;
    try {
        c.hold = j.at("hold_s").get<double>();
        c.operating_detuning = j.at("operating_detuning_hz").get<double>();
        c.ramp_duration = j.at("ramp_s").get<double>();
        c.ramp_tau = j.at("ramp_tau_s").get<double>();
        c.phi_zz = j.value("phi_zz_rad", 0.0);
        c.eta_a = j.at("eta_a_rad_per_s").get<double>();
        c.eta_b = j.at("eta_b_rad_per_s").get<double>();
    } catch (const Json::exception &e) {
        throw ConfigError(std::string("bad CZ calibration: ") + e.what(), "cz");
    }
    c.calibrated = true;
    c.validate();
    return c;
}

CZControls cz_controls_at(const TwoCQBSpec &spec, const CZCalibration &cal, double t) {
    CZControls c;
    c.detuning = spec.idle_detuning;
    if (t < 0 || t > cal.duration()) {
        return c;
    }
    double s = ramp_shape(cal, t);
    c.detuning = spec.idle_detuning + (cal.operating_detuning - spec.idle_detuning) * s;
    c.zeta = spec.zz_profile.at(c.detuning);
    c.shift_a = spec.cz_shift_a * s;
    c.shift_b = spec.cz_shift_b * s;
    return c;
}

double CZSchedule::conditional_phase() const {
    double acc = 0;
    for (double z : zeta) {
        acc += z;
    }
    return kTwoPi * acc * sample_period;
}

CZSchedule render_cz_schedule(const TwoCQBSpec &spec, const CZCalibration &cal, double t0, size_t n, double dt) {
    cal.validate();
    if (!(dt > 0)) {
        throw ConfigError("sample period must be > 0", "sample_period");
    }
    CZSchedule s = empty_schedule(spec, n, dt);
    s.start = t0;
    add_event(s, spec, cal, t0);
    return s;
}

CZSchedule cz_schedule(const TwoCQBSpec &spec, const CZCalibration &cal, double dt) {
    return render_cz_schedule(spec, cal, 0, samples_covering(cal.duration(), dt), dt);
}

CZPhases cz_phases(const TwoCQBSpec &spec, const CZCalibration &cal) {
    CZPhases p;
    auto bp = breakpoints(cal, 0);
    double za = 0, sa = 0, sb = 0;
    for (int piece = 0; piece < 3; piece++) {
        int pieces = piece == 1 ? 1 : 256;
        integrate(bp[piece], bp[piece + 1], pieces, [&](double t, double w) {
            CZControls c = cz_controls_at(spec, cal, t);
            za += w * c.zeta;
            sa += w * c.shift_a;
            sb += w * c.shift_b;
        });
    }
    double t = cal.duration();
    p.phi_zz = kTwoPi * za;
    p.theta_a = kTwoPi * (spec.cqb_a.delta * t + sa);
    p.theta_b = kTwoPi * (spec.cqb_b.delta * t + sb);
    return p;
}

CZCalibration calibrate_cz(const TwoCQBSpec &spec, const CZOptions &opt) {
    spec.validate();
    if (!(opt.target > 0)) {
        throw ConfigError("target conditional phase must be > 0", "target");
    }
    CZCalibration cal;
    if (opt.mode == CZMode::FreeHold) {
        CZCalibration ramps = trial(spec, 0, 0);
        double ramp_phase = cz_phases(spec, ramps).phi_zz;
        double zeta = spec.zz_profile.at(0);
        if (zeta <= 0) {
            throw ConvergenceError("zz_profile has no coupling at the operating point", "zz_profile");
        }
        double hold = (opt.target - ramp_phase) / (kTwoPi * zeta);
        if (hold < 0) {
            throw ConvergenceError("ramps alone overshoot the target conditional phase", "cz.ramp_s");
        }
        if (hold > opt.max_hold) {
            throw ConvergenceError("profile max zeta too small for the target phase within max_hold", "zz_profile");
        }
        cal = trial(spec, hold, 0);
    } else {
        auto phase_at = [&](double op) { return cz_phases(spec, trial(spec, spec.hold, op)).phi_zz; };
        double lo = 0, hi = spec.zz_profile.max_detuning();
        if (phase_at(lo) < opt.target) {
            throw ConvergenceError("profile max zeta too small for the target phase at this hold", "zz_profile");
        }
        if (phase_at(hi) > opt.target) {
            throw ConvergenceError("profile cannot reduce the phase to the target at this hold", "zz_profile");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-9; it++) {
            double mid = 0.5 * (lo + hi);
            (phase_at(mid) > opt.target ? lo : hi) = mid;
        }
        cal = trial(spec, spec.hold, 0.5 * (lo + hi));
    }
    CZPhases p = cz_phases(spec, cal);
    cal.phi_zz = p.phi_zz;
    double t = cal.duration();
    // ZZ(phi) = (Z(-phi/2) x Z(-phi/2)) CPhase(phi): each CQB also turns by -phi/2.
    cal.eta_a = t > 0 ? (p.theta_a - p.phi_zz / 2) / t : kTwoPi * spec.cqb_a.delta;
    cal.eta_b = t > 0 ? (p.theta_b - p.phi_zz / 2) / t : kTwoPi * spec.cqb_b.delta;
    return cal;
}

static Mat4 two_cqb_step(const TwoCQBSpec &spec, double eps_a, double eps_b, double zeta, double sa, double sb,
                         double dt) {
    double da = spec.cqb_a.delta + sa, db = spec.cqb_b.delta + sb;
    if (zeta == 0) {
        return kron(step_propagator(da, eps_a, dt), step_propagator(db, eps_b, dt));
    }
    if (eps_a == 0 && eps_b == 0) {
        Mat4 u = Mat4::Zero();
        for (int a = 0; a < 2; a++) {
            for (int b = 0; b < 2; b++) {
                double za = a ? -1 : 1, zb = b ? -1 : 1;
                double e = kPi * (da * za + db * zb - 0.5 * zeta * za * zb);
                u(2 * a + b, 2 * a + b) = std::polar(1.0, -e * dt);
            }
        }
        return u;
    }
    Mat4 h = kPi * (da * kron(pauli_z(), Mat2::Identity()) + db * kron(Mat2::Identity(), pauli_z()) +
                    eps_a * kron(pauli_x(), Mat2::Identity()) + eps_b * kron(Mat2::Identity(), pauli_x()) -
                    0.5 * zeta * kron(pauli_z(), pauli_z()));
    Mat4 g = cdouble(0, -dt) * h;
    return g.exp();
}

Vec4 evolve_two_cqb(const TwoCQBSpec &spec, const Vec4 &psi, const CZSchedule &schedule) {
    Vec4 v = psi;
    for (size_t k = 0; k < schedule.size(); k++) {
        v = two_cqb_step(spec, 0, 0, schedule.zeta[k], schedule.shift_a[k], schedule.shift_b[k],
                         schedule.sample_period) *
            v;
    }
    return v;
}

Mat4 propagate_two_cqb(const TwoCQBSpec &spec, const std::vector<double> &eps_a, const std::vector<double> &eps_b,
                       const CZSchedule &cz, double dt) {
    if (eps_a.size() != eps_b.size()) {
        throw ConfigError("XY tracks differ in length", "eps");
    }
    if (cz.size() != 0 && cz.size() != eps_a.size()) {
        throw ConfigError("CZ controls differ in length from the XY tracks", "cz");
    }
    if (cz.size() != 0 && std::abs(cz.sample_period - dt) > 1e-12 * dt) {
        throw ConfigError("CZ controls use another sample period", "sample_period");
    }
    Mat4 u = Mat4::Identity();
    for (size_t k = 0; k < eps_a.size(); k++) {
        double z = cz.size() ? cz.zeta[k] : 0, sa = cz.size() ? cz.shift_a[k] : 0, sb = cz.size() ? cz.shift_b[k] : 0;
        u = two_cqb_step(spec, eps_a[k], eps_b[k], z, sa, sb, dt) * u;
    }
    return u;
}

Mat4 cz_unitary() {
    Mat4 u = Mat4::Identity();
    u(3, 3) = -1;
    return u;
}

CZResync cz_with_resync(const TwoCQBSpec &spec, const CZCalibration &cal, const ZLedger &ledger, double dt) {
    cal.validate();
    CZResync r;
    double t = cal.duration();
    double omega_a = kTwoPi * spec.cqb_a.delta, omega_b = kTwoPi * spec.cqb_b.delta;
    double theta_a = cal.eta_a * t, theta_b = cal.eta_b * t;
    r.extra_phase_a = theta_a - omega_a * t;
    r.extra_phase_b = theta_b - omega_b * t;
    r.pad_a = wrap_angle(-(ledger.phase[0] + theta_a)) / omega_a;
    r.pad_b = wrap_angle(-(ledger.phase[1] + theta_b)) / omega_b;
    double end = std::max(t + r.pad_a, t + r.pad_b);
    size_t n = samples_covering(end, dt);
    double rendered = static_cast<double>(n) * dt;
    r.schedule = render_cz_schedule(spec, cal, 0, n, dt);
    std::vector<Annotation> ann_a = {{"cz", 0, std::min(n, samples_covering(t, dt))},
                                     {"resync", std::min(n, samples_covering(t, dt)), n}};
    r.eps_a = Waveform(std::vector<double>(n, 0.0), dt, 0, ann_a);
    r.eps_b = Waveform(std::vector<double>(n, 0.0), dt, 0, ann_a);
    r.ledger = ledger;
    r.ledger.phase[0] = wrap_angle(omega_a * (rendered - t - r.pad_a));
    r.ledger.phase[1] = wrap_angle(omega_b * (rendered - t - r.pad_b));
    return r;
}

TwoCQBProgram compile_two_cqb(const std::vector<SequenceItem> &seq, const TwoCQBSpec &spec,
                              const TwoCQBGateSets &sets, NegativeMode mode) {
    sets.a.validate();
    sets.b.validate();
    double dt = sets.a.sample_period;
    if (std::abs(sets.b.sample_period - dt) > 1e-12 * dt) {
        throw ConfigError("CQB-A and CQB-B gate sets use different sample periods", "sample_period");
    }
    GateTrack tracks[2] = {GateTrack(sets.a, mode), GateTrack(sets.b, mode)};
    double omega[2] = {kTwoPi * sets.a.delta, kTwoPi * sets.b.delta};
    double phase[2] = {0, 0};
    std::vector<double> cz_starts;
    TwoCQBProgram prog;
    prog.sample_period = dt;
    Mat4 ideal = Mat4::Identity();

    auto idle = [&](int q, double d, const std::string &label) {
        if (d > 0) {
            prog.gates.push_back(tracks[q].add(GatePrimitive::idle(d, q), label));
        }
    };
    auto resync = [&](int q) {
        if (std::abs(wrap_signed(phase[q])) > 1e-12) {
            idle(q, wrap_angle(-phase[q]) / omega[q], "sync");
        }
        phase[q] = 0;
    };
    auto single = [&](GatePrimitive p) {
        int q = p.target;
        set_for(sets, q);
        resync(q);
        Mat2 u = p.kind == GateKind::Idle ? rot_z(omega[q] * p.duration) : primitive_unitary(p);
        prog.gates.push_back(tracks[q].add(p));
        ideal = embed(u, q) * ideal;
    };

    for (const auto &item : seq) {
        if (item.clifford) {
            for (auto p : clifford_to_primitives(item.clifford)) {
                p.target = item.gate.target;
                single(p);
            }
            continue;
        }
        if (item.gate.kind != GateKind::CZ) {
            single(item.gate);
            continue;
        }
        sets.cz.validate();
        double t0 = std::max(tracks[0].cursor(), tracks[1].cursor());
        double t = sets.cz.duration();
        for (int q = 0; q < 2; q++) {
            double wait = t0 - tracks[q].cursor();
            idle(q, wait, "wait");
            phase[q] += omega[q] * std::max(wait, 0.0);
        }
        GatePrimitive g = GatePrimitive::cz();
        g.start = t0;
        g.length = t;
        g.snap_error = std::abs(std::round(t0 / dt) * dt - t0);
        prog.gates.push_back(g);
        cz_starts.push_back(t0);
        idle(0, t, "cz");
        idle(1, t, "cz");
        phase[0] += sets.cz.eta_a * t;
        phase[1] += sets.cz.eta_b * t;
        resync(0);
        resync(1);
        ideal = cz_unitary() * ideal;
    }
    double end = std::max(tracks[0].cursor(), tracks[1].cursor());
    size_t n = samples_covering(end, dt);
    double rendered = static_cast<double>(n) * dt;
    for (int q = 0; q < 2; q++) {
        phase[q] += omega[q] * (rendered - tracks[q].cursor());
        prog.ledger.phase[q] = wrap_angle(phase[q]);
    }
    prog.eps_a = tracks[0].render(rendered).samples();
    prog.eps_b = tracks[1].render(rendered).samples();
    prog.eps_a.resize(n, 0.0);
    prog.eps_b.resize(n, 0.0);
    prog.cz = empty_schedule(spec, cz_starts.empty() ? 0 : n, dt);
    for (double t0 : cz_starts) {
        add_event(prog.cz, spec, sets.cz, t0);
    }
    prog.ideal = ideal;
    prog.duration = end;
    return prog;
}

Mat4 simulate_two_cqb(const TwoCQBSpec &spec, const TwoCQBProgram &prog) {
    return propagate_two_cqb(spec, prog.eps_a, prog.eps_b, prog.cz, prog.sample_period);
}

Mat4 two_cqb_logical_frame(const Mat4 &lab, const TwoCQBGateSets &sets) {
    Mat4 f = kron(rot_z(sets.a.axis_phase), rot_z(sets.b.axis_phase));
    return f.adjoint() * lab * f;
}

Mat4 expected_logical(const TwoCQBProgram &prog) {
    return kron(rot_z(prog.ledger.phase[0]), rot_z(prog.ledger.phase[1])) * prog.ideal;
}

Mat4 ideal_two_cqb_unitary(const std::vector<SequenceItem> &seq, const TwoCQBGateSets &sets) {
    Mat4 u = Mat4::Identity();
    for (const auto &item : seq) {
        if (item.clifford) {
            u = embed(clifford_unitary(item.clifford), item.gate.target) * u;
        } else if (item.gate.kind == GateKind::CZ) {
            u = cz_unitary() * u;
        } else if (item.gate.kind == GateKind::Idle) {
            const auto &s = set_for(sets, item.gate.target);
            u = embed(rot_z(kTwoPi * s.delta * item.gate.duration), item.gate.target) * u;
        } else {
            u = embed(primitive_unitary(item.gate), item.gate.target) * u;
        }
    }
    return u;
}

}  // namespace cqbsim
