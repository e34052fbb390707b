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

#include "cqbsim/calibration.h"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "cqbsim/errors.h"
#include "cqbsim/fit.h"
#include "cqbsim/parallel.h"
#include "cqbsim/propagator.h"
#include "cqbsim/rng.h"

namespace cqbsim {

namespace {

// Stream offsets keep the shot noise of different stages independent.
constexpr uint64_t kAmplitudeStream = 1ULL << 40;
constexpr uint64_t kCoarseStream = 2ULL << 40;
constexpr uint64_t kCorrectionStream = 3ULL << 40;
constexpr uint64_t kFineStream = 4ULL << 40;
constexpr uint64_t kRamseyStream = 5ULL << 40;

double p0_of(const Vec2 &psi) {
    return std::min(1.0, std::max(0.0, std::norm(psi[0])));
}

double p1_of(const Vec2 &psi) {
    return std::min(1.0, std::max(0.0, std::norm(psi[1])));
}

Vec2 run_track(const CQBSpec &spec, const GateTrack &track) {
    Waveform w = track.render(track.cursor());
    return propagate_ket(spec.delta, Vec2(1, 0), w.samples(), w.sample_period());
}

CalibratedGateSet trial_set(double eps_p, double f_p, double delta, double t_c, double dt) {
    CalibratedGateSet c;
    c.eps_p = eps_p;
    c.f_p = f_p;
    c.delta = delta;
    c.t_c = t_c;
    c.t_d = 1.0 / delta + t_c;
    c.t_xy = 0.25 / delta;
    c.sample_period = dt;
    c.calibrated = true;
    return c;
}

CalibratedGateSet with_td(CalibratedGateSet c, double t_d) {
    c.t_d = t_d;
    c.t_c = t_d - 1.0 / c.delta;
    return c;
}

// Vertex of the parabola through (x-h, a), (x, b), (x+h, c), as an offset in units of h.
double parabola_offset(double a, double b, double c) {
    double den = a - 2 * b + c;
    if (den == 0) {
        return 0;
    }
    return std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
}

double peak_of(const std::vector<double> &x, const std::vector<double> &y, double period) {
    size_t k = static_cast<size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    size_t n = y.size();
    bool periodic = period > 0 && n > 3 && std::abs(x.back() - x.front() - period) < 1e-9 * period;
    double a, c;
    if (k > 0 && k + 1 < n) {
        a = y[k - 1];
        c = y[k + 1];
    } else if (periodic) {
        // First and last points coincide modulo the period.
        a = k == 0 ? y[n - 2] : y[k - 1];
        c = k + 1 == n ? y[1] : y[k + 1];
    } else {
        return x[k];
    }
    double h = x[1] - x[0];
    return x[k] + h * parabola_offset(a, y[k], c);
}

std::vector<double> scan(size_t n, const CalibrationOptions &opt, uint64_t stream,
                         const std::function<double(size_t)> &exact) {
    auto p = parallel_map(n, opt.workers, exact);
    for (size_t i = 0; i < n; i++) {
        p[i] = measure(p[i], opt, stream + i);
    }
    return p;
}

}  // namespace

double measure(double p, const CalibrationOptions &opt, uint64_t stream) {
    if (opt.shots <= 0) {
        return p;
    }
    Rng rng = Rng::derive(opt.seed, stream);
    return static_cast<double>(rng.binomial(opt.shots, p)) / opt.shots;
}

std::vector<double> linear_grid(double lo, double hi, int n) {
    if (n < 1) {
        throw ConfigError("grid needs at least one point", "grid");
    }
    std::vector<double> g(static_cast<size_t>(n));
    for (int k = 0; k < n; k++) {
        g[k] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
    }
    if (n > 1) {
        g.back() = hi;
    }
    return g;
}

double single_pulse_excitation(const CQBSpec &spec, double eps_p, double f_p, double dt) {
    double pad = 1e-9;
    std::vector<double> s(samples_covering(1.0 / f_p + 2 * pad, dt), 0.0);
    add_sinusoid(s, dt, pad, eps_p, f_p, +1);
    return p1_of(propagate_ket(spec.delta, Vec2(1, 0), s, dt));
}

ScanResult scan_amplitude_for_half_excitation(const CQBSpec &spec, double f_p, const std::vector<double> &grid,
                                              const CalibrationOptions &opt) {
    if (grid.size() < 2) {
        throw ConfigError("amplitude grid needs at least two points", "grid");
    }
    ScanResult r;
    r.parameter = "eps_p_hz";
    r.values = grid;
    r.probability = scan(grid.size(), opt, kAmplitudeStream,
                         [&](size_t i) { return single_pulse_excitation(spec, grid[i], f_p, opt.sample_period); });
    for (size_t k = 1; k < grid.size(); k++) {
        double a = r.probability[k - 1], b = r.probability[k];
        if (a < 0.5 && b >= 0.5) {
            double lo = grid[k - 1], hi = grid[k];
            double x = lo + (0.5 - a) * (hi - lo) / (b - a);
            if (opt.shots <= 0) {
                // Secant-bisection polish on the exact model.
                double pa = a, pb = b;
                for (int it = 0; it < 60; it++) {
                    double p = single_pulse_excitation(spec, x, f_p, opt.sample_period);
                    if (std::abs(p - 0.5) < 0.01 * opt.half_tolerance) {
                        break;
                    }
                    (p < 0.5 ? lo : hi) = x;
                    (p < 0.5 ? pa : pb) = p;
                    double next = lo + (0.5 - pa) * (hi - lo) / (pb - pa);
                    x = (next > lo && next < hi) ? next : (lo + hi) / 2;
                }
            }
            r.optimum = x;
            return r;
        }
    }
    throw ConvergenceError("amplitude scan never crosses P = 0.5", "grid");
}

double dominant_frequency(const std::vector<double> &y, std::vector<double> *freq, std::vector<double> *power) {
    size_t n = y.size();
    if (n < 8) {
        throw ConfigError("need at least 8 samples for a spectrum", "samples");
    }
    // Remove the best straight line before transforming.
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd v(n);
    for (size_t k = 0; k < n; k++) {
        a(k, 0) = 1;
        a(k, 1) = static_cast<double>(k);
        v[k] = y[k];
    }
    Eigen::VectorXd resid = v - a * linear_least_squares(a, v);
    size_t m = 8 * n;
    std::vector<double> pw(m / 2 + 1);
    for (size_t j = 0; j <= m / 2; j++) {
        cdouble acc = 0;
        for (size_t k = 0; k < n; k++) {
            acc += resid[k] * std::polar(1.0, -kTwoPi * static_cast<double>(j * k % m) / m);
        }
        pw[j] = std::abs(acc);
    }
    // Skip the detrending notch around zero frequency.
    size_t first = std::max<size_t>(1, m / n);
    size_t best = first;
    for (size_t j = first; j <= m / 2; j++) {
        if (pw[j] > pw[best]) {
            best = j;
        }
    }
    double off = 0;
    if (best > 0 && best < m / 2) {
        off = parabola_offset(pw[best - 1], pw[best], pw[best + 1]);
    }
    if (freq) {
        freq->clear();
        for (size_t j = 0; j <= m / 2; j++) {
            freq->push_back(static_cast<double>(j) / m);
        }
    }
    if (power) {
        *power = pw;
    }
    return (static_cast<double>(best) + off) / m;
}

ScanResult coarse_delta_fourier(const CQBSpec &spec, double eps_p, double delta_guess,
                                const CalibrationOptions &opt) {
    if (!(delta_guess > 0)) {
        throw ConfigError("gap guess must be > 0", "delta");
    }
    double step = 0.25 / delta_guess;
    double period = 1.0 / opt.f_p, pad = 1e-9, dt = opt.sample_period;
    size_t n = static_cast<size_t>(std::max(opt.coarse_ramsey_points, 8));
    ScanResult r;
    r.parameter = "idle_s";
    for (size_t k = 0; k < n; k++) {
        r.values.push_back(static_cast<double>(k) * step);
    }
    r.probability = scan(n, opt, kCoarseStream, [&](size_t k) {
        double tau = r.values[k];
        std::vector<double> s(samples_covering(2 * period + tau + 2 * pad, dt), 0.0);
        add_sinusoid(s, dt, pad, eps_p, opt.f_p, +1);
        add_sinusoid(s, dt, pad + period + tau, eps_p, opt.f_p, +1);
        return p1_of(propagate_ket(spec.delta, Vec2(1, 0), s, dt));
    });
    double f = dominant_frequency(r.probability, &r.frequency, &r.spectrum);
    r.optimum = f / step;
    return r;
}

ScanResult scan_correction_time(const CQBSpec &spec, double eps_p, double delta, const std::vector<double> &grid,
                                const CalibrationOptions &opt) {
    if (grid.empty()) {
        throw ConfigError("t_c grid is empty", "grid");
    }
    ScanResult r;
    r.parameter = "t_c_s";
    r.values = grid;
    r.probability = scan(grid.size(), opt, kCorrectionStream, [&](size_t i) {
        GateTrack t(trial_set(eps_p, opt.f_p, delta, grid[i], opt.sample_period));
        t.add(GatePrimitive::x(+1));
        t.add(GatePrimitive::x(-1));
        return p0_of(run_track(spec, t));
    });
    auto [lo, hi] = std::minmax_element(r.probability.begin(), r.probability.end());
    if (grid.size() > 1 && *hi - *lo < 1e-6) {
        throw ConvergenceError("flat t_c response", "grid");
    }
    r.optimum = grid.size() > 1 ? peak_of(grid, r.probability, 1.0 / delta) : grid[0];
    return r;
}

FineScan fine_scan_chained(const CQBSpec &spec, const CalibratedGateSet &calib, int n_gates, FineParameter param,
                           const CalibrationOptions &opt) {
    calib.validate();
    if (n_gates < 1) {
        throw ConfigError("n_gates must be >= 1", "n_gates");
    }
    if (n_gates > 400) {
        throw ConfigError("n_gates too large for the timing budget", "n_gates");
    }
    FineScan out;
    ScanResult &r = out.scan;
    double centre = param == FineParameter::EpsP ? calib.eps_p : calib.t_d;
    r.parameter = param == FineParameter::EpsP ? "eps_p_hz" : "t_d_s";
    r.values = linear_grid(centre * (1 - opt.fine_span), centre * (1 + opt.fine_span), opt.fine_points);
    if (param == FineParameter::EpsP) {
        if (n_gates % 4 != 1) {
            throw ConfigError("amplitude fine scan needs n_gates = 1 mod 4", "n_gates");
        }
        r.probability = scan(r.values.size(), opt, kFineStream, [&](size_t i) {
            CalibratedGateSet c = calib;
            c.eps_p = r.values[i];
            GateTrack t(c);
            for (int k = 0; k < n_gates; k++) {
                t.add(GatePrimitive::x(+1));
            }
            return p1_of(run_track(spec, t));
        });
        // Crossing of 0.5 nearest the centre.
        double best = NAN, dist = INFINITY;
        for (size_t k = 1; k < r.values.size(); k++) {
            double a = r.probability[k - 1] - 0.5, b = r.probability[k] - 0.5;
            if ((a <= 0 && b > 0) || (a >= 0 && b < 0)) {
                double x = r.values[k - 1] - a * (r.values[k] - r.values[k - 1]) / (b - a);
                if (std::abs(x - centre) < dist) {
                    dist = std::abs(x - centre);
                    best = x;
                    out.sensitivity = (b - a) / (r.values[k] - r.values[k - 1]);
                }
            }
        }
        if (std::isnan(best)) {
            throw ConvergenceError("chained amplitude scan has no 0.5 crossing", "eps_p");
        }
        out.value = best;
    } else {
        r.probability = scan(r.values.size(), opt, kFineStream + (1ULL << 32), [&](size_t i) {
            GateTrack t(with_td(calib, r.values[i]));
            for (int k = 0; k < n_gates; k++) {
                t.add(GatePrimitive::x(+1));
                t.add(GatePrimitive::x(-1));
            }
            return p0_of(run_track(spec, t));
        });
        out.value = peak_of(r.values, r.probability, 0);
        size_t k = static_cast<size_t>(std::max_element(r.probability.begin(), r.probability.end()) -
                                       r.probability.begin());
        if (k > 0 && k + 1 < r.values.size()) {
            double h = r.values[1] - r.values[0];
            out.sensitivity = (r.probability[k + 1] - 2 * r.probability[k] + r.probability[k - 1]) / (h * h);
        }
    }
    r.optimum = out.value;
    return out;
}

RamseyResult measure_delta_ramsey(const CQBSpec &spec, const CalibratedGateSet &calib, int m, int max_n,
                                  const CalibrationOptions &opt) {
    calib.validate();
    if (m < 1 || m % 2 == 0) {
        throw ConfigError("Ramsey increment m must be odd (even m aliases)", "m");
    }
    if (max_n < 8) {
        throw ConfigError("Ramsey needs max_n >= 8", "max_n");
    }
    RamseyResult out;
    ScanResult &r = out.trace;
    r.parameter = "n";
    size_t n = static_cast<size_t>(max_n) + 1;
    double quarter = calib.t_delta() / 4;
    for (size_t k = 0; k < n; k++) {
        r.values.push_back(static_cast<double>(k));
    }
    r.probability = scan(n, opt, kRamseyStream, [&](size_t k) {
        GateTrack t(calib);
        t.add(GatePrimitive::x(+1));
        t.add_idle(static_cast<double>(k * m) * quarter);
        t.add(GatePrimitive::x(+1));
        return p0_of(run_track(spec, t));
    });
    Eigen::VectorXd y(n);
    for (size_t k = 0; k < n; k++) {
        y[k] = r.probability[k];
    }
    double f0 = dominant_frequency(r.probability, &r.frequency, &r.spectrum);
    auto basis = [&](const Eigen::VectorXd &th) {
        Eigen::MatrixXd a(n, 3);
        for (size_t k = 0; k < n; k++) {
            double ph = kTwoPi * th[0] * static_cast<double>(k);
            a(k, 0) = 1;
            a(k, 1) = std::cos(ph);
            a(k, 2) = std::sin(ph);
        }
        return a;
    };
    FitResult fit = fit_separable(basis, y, {Eigen::VectorXd::Constant(1, f0)});
    double f_obs = std::abs(fit.params[0]);
    f_obs -= std::floor(f_obs);
    if (f_obs > 0.5) {
        f_obs = 1 - f_obs;
    }
    // Unfold the alias nearest the expected m/4 cycles per step.
    double expect = 0.25 * m, best = f_obs;
    for (int k = 0; k <= m; k++) {
        for (double cand : {k + f_obs, k - f_obs}) {
            if (std::abs(cand - expect) < std::abs(best - expect)) {
                best = cand;
            }
        }
    }
    out.frequency = best;
    out.delta = 4 * calib.delta * best / m;
    out.delta_error = 4 * calib.delta * fit.errors[0] / m;
    r.optimum = out.delta;
    return out;
}

static Mat2 lab_window(const CQBSpec &spec, const CalibratedGateSet &calib, Axis axis, int sign) {
    GateTrack t(calib);
    t.add(axis == Axis::X ? GatePrimitive::x(sign) : GatePrimitive::y(sign));
    Waveform w = t.render(t.cursor());
    Mat2 u = unitary_of_waveform(spec, w);
    // Remove the grid tail so the window is exactly t_d long.
    return special_unitary(rot_z(-kTwoPi * calib.delta * (w.duration() - calib.t_d)) * u);
}

Mat2 window_unitary(const CQBSpec &spec, const CalibratedGateSet &calib, Axis axis, int sign) {
    return to_logical_frame(lab_window(spec, calib, axis, sign), calib);
}

void finalize_frame(const CQBSpec &spec, CalibratedGateSet &calib) {
    Mat2 u = lab_window(spec, calib, Axis::X, +1);
    PauliCoefficients p = pauli_coefficients(u);
    if (p.a0 < 0) {
        p.ax = -p.ax;
        p.ay = -p.ay;
    }
    calib.axis_phase = std::atan2(p.ay, p.ax);
    calib.residual_infidelity = 1 - trace_fidelity(to_logical_frame(u, calib), rot_x(kPi / 2));
}

CalibrationReport refine_gate_set(const CQBSpec &spec, const CalibratedGateSet &start, const CalibrationOptions &opt) {
    CalibrationReport rep;
    rep.coarse = start;
    finalize_frame(spec, rep.coarse);
    rep.coarse_infidelity = rep.coarse.residual_infidelity;
    CalibratedGateSet c = start;
    rep.ramsey = measure_delta_ramsey(spec, c, opt.ramsey_m, opt.ramsey_max_n, opt);
    c.delta = rep.ramsey.delta;
    c.t_xy = 0.25 / c.delta;
    c = with_td(c, c.t_d);
    for (int round = 0; round < 2; round++) {
        rep.fine_eps = fine_scan_chained(spec, c, opt.fine_gates, FineParameter::EpsP, opt);
        c.eps_p = rep.fine_eps.value;
        rep.fine_td = fine_scan_chained(spec, c, opt.fine_gates, FineParameter::TD, opt);
        c = with_td(c, rep.fine_td.value);
    }
    finalize_frame(spec, c);
    rep.gates = c;
    return rep;
}

CalibrationReport calibrate_gate_set(const CQBSpec &spec, const CalibrationOptions &opt) {
    spec.validate();
    double nominal = spec.delta;
    // Small gaps need more drive than 2 delta; widen the range before giving up.
    ScanResult amp;
    for (double top = 2 * nominal;; top *= 2) {
        try {
            amp = scan_amplitude_for_half_excitation(spec, opt.f_p, linear_grid(0, top, opt.amplitude_points), opt);
            break;
        } catch (const ConvergenceError &) {
            if (top > 16 * nominal) {
                throw;
            }
        }
    }
    ScanResult coarse = coarse_delta_fourier(spec, amp.optimum, nominal, opt);
    double delta = coarse.optimum;
    double t_delta = 1.0 / delta;
    double tc_min = std::max(0.0, 1.0 / opt.f_p + 0.25 * t_delta - t_delta + 2 * opt.sample_period);
    ScanResult corr =
        scan_correction_time(spec, amp.optimum, delta, linear_grid(tc_min, tc_min + t_delta, opt.tc_points), opt);
    double tc = corr.optimum;
    if (tc < tc_min) {
        tc += t_delta;
    }
    CalibratedGateSet start = trial_set(amp.optimum, opt.f_p, delta, tc, opt.sample_period);
    CalibrationReport rep = refine_gate_set(spec, start, opt);
    rep.amplitude = amp;
    rep.coarse_delta = coarse;
    rep.correction = corr;
    return rep;
}

static Json scan_summary(const ScanResult &s) {
    Json j;
    j["parameter"] = s.parameter;
    j["points"] = s.values.size();
    if (!s.values.empty()) {
        j["from"] = s.values.front();
        j["to"] = s.values.back();
    }
    j["optimum"] = s.optimum;
    return j;
}

Json calibration_report_to_json(const CalibrationReport &r, const CQBSpec &spec, const CalibrationOptions &opt) {
    Json j;
    j["cqb"] = spec.name;
    j["gate_set"] = calibrated_gate_set_to_json(r.gates);
    j["coarse_gate_set"] = calibrated_gate_set_to_json(r.coarse);
    j["coarse_infidelity"] = r.coarse_infidelity;
    j["scans"] = {{"amplitude", scan_summary(r.amplitude)},
                  {"coarse_delta", scan_summary(r.coarse_delta)},
                  {"correction", scan_summary(r.correction)},
                  {"fine_eps", scan_summary(r.fine_eps.scan)},
                  {"fine_td", scan_summary(r.fine_td.scan)},
                  {"ramsey", scan_summary(r.ramsey.trace)}};
    j["ramsey"] = {{"m", opt.ramsey_m},
                   {"max_n", opt.ramsey_max_n},
                   {"delta_hz", r.ramsey.delta},
                   {"delta_error_hz", r.ramsey.delta_error},
                   {"cycles_per_step", r.ramsey.frequency}};
    j["fine"] = {{"gates", opt.fine_gates},
                 {"eps_sensitivity_per_hz", r.fine_eps.sensitivity},
                 {"td_curvature_per_s2", r.fine_td.sensitivity}};
    Json prov;
    prov["spec_hash"] = hex64(fnv1a64(dump_json(cqb_spec_to_json(spec))));
    prov["seed"] = opt.seed;
    prov["shots"] = opt.shots;
    prov["sample_period_s"] = opt.sample_period;
    prov["f_p_hz"] = opt.f_p;
    prov["grids"] = {{"amplitude_points", opt.amplitude_points},
                     {"tc_points", opt.tc_points},
                     {"fine_points", opt.fine_points},
                     {"fine_span", opt.fine_span},
                     {"coarse_ramsey_points", opt.coarse_ramsey_points}};
    j["provenance"] = prov;
    return j;
}

static void write_scan(const std::string &path, const ScanResult &s, const std::string &observable) {
    std::vector<std::vector<double>> rows;
    for (size_t k = 0; k < s.values.size(); k++) {
        rows.push_back({s.values[k], s.probability[k]});
    }
    write_csv(path, {s.parameter, observable}, rows);
}

std::vector<std::string> write_calibration_report(const std::string &dir, const CalibrationReport &r,
                                                  const CQBSpec &spec, const CalibrationOptions &opt) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> files = {"calibration.json"};
    write_text(dir + "/calibration.json", dump_json(calibration_report_to_json(r, spec, opt)));
    auto add = [&](const std::string &name, const ScanResult &s, const std::string &obs) {
        if (s.values.empty()) {
            return;
        }
        write_scan(dir + "/" + name, s, obs);
        files.push_back(name);
    };
    add("scan_amplitude.csv", r.amplitude, "p1");
    add("scan_coarse_delta.csv", r.coarse_delta, "p1");
    add("scan_correction.csv", r.correction, "p0");
    add("scan_ramsey.csv", r.ramsey.trace, "p0");
    add("scan_fine_eps.csv", r.fine_eps.scan, "p1");
    add("scan_fine_td.csv", r.fine_td.scan, "p0");
    if (!r.coarse_delta.spectrum.empty()) {
        std::vector<std::vector<double>> rows;
        for (size_t k = 0; k < r.coarse_delta.spectrum.size(); k++) {
            rows.push_back({r.coarse_delta.frequency[k], r.coarse_delta.spectrum[k]});
        }
        write_csv(dir + "/spectrum_coarse_delta.csv", {"cycles_per_step", "magnitude"}, rows);
        files.push_back("spectrum_coarse_delta.csv");
    }
    return files;
}

}  // namespace cqbsim
