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

#include "cqbsim/waveform.h"

#include <algorithm>
#include <cmath>

#include "cqbsim/errors.h"
#include "cqbsim/io.h"
#include "cqbsim/linalg.h"

namespace cqbsim {

Waveform::Waveform(std::vector<double> samples, double sample_period, double start_time,
                   std::vector<Annotation> annotations)
    : samples_(std::move(samples)), dt_(sample_period), start_time_(start_time), annotations_(std::move(annotations)) {
    if (!(dt_ > 0) || !std::isfinite(dt_)) {
        throw ConfigError("sample_period must be > 0", "sample_period");
    }
    double sum = 0;
    for (double x : samples_) {
        if (!std::isfinite(x)) {
            throw NumericError("waveform samples must be finite", "samples");
        }
        sum += x;
    }
    mean_ = samples_.empty() ? 0 : sum / static_cast<double>(samples_.size());
    for (const auto &a : annotations_) {
        if (a.start > a.end || a.end > samples_.size()) {
            throw ConfigError("annotation '" + a.label + "' outside the waveform", "annotations");
        }
    }
}

double Waveform::max_abs() const {
    double m = 0;
    for (double x : samples_) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

Waveform Waveform::labelled(const std::string &label) const {
    std::vector<Annotation> a = annotations_;
    a.push_back({label, 0, samples_.size()});
    return Waveform(samples_, dt_, start_time_, std::move(a));
}

GateWindowSpec GateWindowSpec::from_delta(double eps_p, double f_p, double delta, double t_c) {
    GateWindowSpec s;
    s.eps_p = eps_p;
    s.f_p = f_p;
    s.t_c = t_c;
    s.t_d = 1.0 / delta + t_c;
    s.t_xy = 0.25 / delta;
    return s;
}

void GateWindowSpec::validate() const {
    if (!(f_p > 0)) {
        throw ConfigError("pulse frequency must be > 0", "f_p");
    }
    if (!std::isfinite(eps_p)) {
        throw ConfigError("pulse amplitude must be finite", "eps_p");
    }
    if (t_d < pulse_period()) {
        throw ConfigError("window shorter than one pulse period", "t_d");
    }
    if (!(t_delta() > 0) || std::abs(t_xy - t_delta() / 4) > 1e-9 * t_delta()) {
        throw ConfigError("t_xy must equal (t_d - t_c) / 4", "t_xy");
    }
}

double ideal_pulse_onset(const GateWindowSpec &spec, Axis axis) {
    double centre = spec.t_d / 2 + (axis == Axis::X ? spec.t_xy / 2 : -spec.t_xy / 2);
    return centre - spec.pulse_period() / 2;
}

std::vector<double> sinusoid_cells(double dt, double frac, double eps_p, double f_p, double sign) {
    double w = kTwoPi * f_p;
    double end = frac + 1.0 / f_p;
    size_t n = static_cast<size_t>(std::ceil(end / dt - 1e-12));
    std::vector<double> cells(n, 0.0);
    double scale = sign * eps_p / (w * dt);
    for (size_t j = 0; j < n; j++) {
        double a = std::max(frac, static_cast<double>(j) * dt);
        double b = std::min(end, static_cast<double>(j + 1) * dt);
        if (b > a) {
            cells[j] = scale * (std::cos(w * (a - frac)) - std::cos(w * (b - frac)));
        }
    }
    return cells;
}

void add_sinusoid(std::vector<double> &out, double dt, double onset, double eps_p, double f_p, double sign) {
    if (eps_p == 0) {
        return;
    }
    long k0 = static_cast<long>(std::floor(onset / dt));
    std::vector<double> shape = sinusoid_cells(dt, onset - static_cast<double>(k0) * dt, eps_p, f_p, sign);
    if (k0 < 0 || k0 + static_cast<long>(shape.size()) > static_cast<long>(out.size())) {
        throw ConfigError("pulse extends beyond its waveform", "t_d");
    }
    for (size_t j = 0; j < shape.size(); j++) {
        out[k0 + j] += shape[j];
    }
}

static void check_resolution(double f_p, double dt) {
    if (1.0 / (f_p * dt) < 16 - 1e-9) {
        throw ConfigError("sample rate resolves the pulse with fewer than 16 samples per period", "sample_period");
    }
}

Waveform synth_xy_pulse(const GateWindowSpec &spec, Axis axis, int sign, double dt) {
    spec.validate();
    check_resolution(spec.f_p, dt);
    if (sign != 1 && sign != -1) {
        throw ConfigError("sign must be +1 or -1", "sign");
    }
    size_t n = static_cast<size_t>(std::llround(spec.t_d / dt));
    long shift = std::lround(spec.t_xy / dt);
    double onset_x = ideal_pulse_onset(spec, Axis::X);
    double onset = axis == Axis::X ? onset_x : onset_x - shift * dt;
    // Both placements must leave the first and last samples of the window at zero.
    double first = onset_x - shift * dt;
    double last = onset_x + spec.pulse_period();
    if (first < dt - 1e-15 || last > (static_cast<double>(n) - 1) * dt + 1e-15) {
        throw ConfigError("window too short for the pulse plus the X/Y shift", "t_d");
    }
    std::vector<double> s(n, 0.0);
    add_sinusoid(s, dt, onset, spec.eps_p, spec.f_p, sign);
    std::string label = std::string(axis == Axis::X ? "X" : "Y") + (sign > 0 ? "+" : "-");
    return Waveform(std::move(s), dt, 0, {{label, 0, n}});
}

double xy_snap_error(const GateWindowSpec &spec, double dt) {
    return std::abs(std::lround(spec.t_xy / dt) * dt - spec.t_xy);
}

Waveform synth_z_idle(double duration, double dt) {
    if (!(duration >= 0)) {
        throw ConfigError("idle duration must be >= 0", "duration");
    }
    size_t n = static_cast<size_t>(std::llround(duration / dt));
    std::vector<Annotation> a;
    if (n) {
        a.push_back({"Z", 0, n});
    }
    return Waveform(std::vector<double>(n, 0.0), dt, 0, std::move(a));
}

double z_angle_of_idle(double delta, double duration) {
    return kTwoPi * delta * duration;
}

double gaussian_ramp_profile(double t, double time_constant, double duration) {
    if (t <= 0) {
        return 0;
    }
    if (t >= duration) {
        return 1;
    }
    double a = std::sqrt(2.0) / time_constant;
    double c = std::erf(a * duration / 2);
    return (std::erf(a * (t - duration / 2)) + c) / (2 * c);
}

double gaussian_ramp_profile_integral(double t, double time_constant, double duration) {
    if (t <= 0) {
        return 0;
    }
    double extra = 0;
    if (t > duration) {
        extra = t - duration;
        t = duration;
    }
    double a = std::sqrt(2.0) / time_constant;
    double c = std::erf(a * duration / 2);
    auto g = [](double x) { return x * std::erf(x) + std::exp(-x * x) / std::sqrt(kPi); };
    double erf_part = (g(a * (t - duration / 2)) - g(-a * duration / 2)) / a;
    return (erf_part + c * t) / (2 * c) + extra;
}

Waveform synth_gaussian_ramp(double from_level, double to_level, double time_constant, double duration,
                             double dt) {
    if (!(time_constant > 0)) {
        throw ConfigError("ramp time constant must be > 0", "time_constant");
    }
    if (duration < 4 * time_constant * (1 - 1e-12)) {
        throw ConfigError("ramp duration must be at least four time constants", "duration");
    }
    size_t n = static_cast<size_t>(std::llround(duration / dt));
    std::vector<double> s(n);
    double span = to_level - from_level;
    double prev = 0;
    for (size_t k = 0; k < n; k++) {
        double next = gaussian_ramp_profile_integral((k + 1) * dt, time_constant, duration);
        s[k] = from_level + span * (next - prev) / dt;
        prev = next;
    }
    return Waveform(std::move(s), dt, 0, {{"ramp", 0, n}});
}

Waveform concat(const std::vector<Waveform> &waveforms) {
    if (waveforms.empty()) {
        return Waveform({}, kDefaultSamplePeriod);
    }
    double dt = waveforms.front().sample_period();
    std::vector<double> s;
    std::vector<Annotation> a;
    for (const auto &w : waveforms) {
        if (std::abs(w.sample_period() - dt) > 1e-12 * dt) {
            throw ConfigError("concat: mismatched sample periods", "sample_period");
        }
        size_t off = s.size();
        for (const auto &ann : w.annotations()) {
            a.push_back({ann.label, ann.start + off, ann.end + off});
        }
        s.insert(s.end(), w.samples().begin(), w.samples().end());
    }
    return Waveform(std::move(s), dt, waveforms.front().start_time(), std::move(a));
}

ZeroAverageCheck check_zero_average(const Waveform &w, double tolerance) {
    ZeroAverageCheck c;
    c.mean = w.mean();
    c.max_abs = w.max_abs();
    c.ok = std::abs(c.mean) <= tolerance * c.max_abs;
    return c;
}

void write_waveform(const std::string &csv_path, const Waveform &w) {
    std::vector<std::vector<double>> rows;
    rows.reserve(w.size());
    for (size_t k = 0; k < w.size(); k++) {
        rows.push_back({w.start_time() + static_cast<double>(k) * w.sample_period(), w.samples()[k]});
    }
    write_csv(csv_path, {"time_s", "epsilon_hz"}, rows);
    Json side;
    side["sample_period_s"] = w.sample_period();
    side["start_time_s"] = w.start_time();
    side["samples"] = w.size();
    side["mean_epsilon_hz"] = w.mean();
    Json ann = Json::array();
    for (const auto &a : w.annotations()) {
        ann.push_back({{"label", a.label}, {"start", a.start}, {"end", a.end}});
    }
    side["annotations"] = ann;
    write_text(csv_path + ".json", dump_json(side));
}

Waveform read_waveform(const std::string &csv_path) {
    CsvTable t = read_csv(csv_path);
    if (t.header != std::vector<std::string>{"time_s", "epsilon_hz"}) {
        throw ConfigError("waveform CSV header must be time_s,epsilon_hz", "path");
    }
    Json side = read_json(csv_path + ".json");
    std::vector<double> s;
    s.reserve(t.rows.size());
    for (const auto &r : t.rows) {
        s.push_back(r[1]);
    }
    std::vector<Annotation> ann;
    for (const auto &a : side.at("annotations")) {
        ann.push_back({a.at("label").get<std::string>(), a.at("start").get<size_t>(), a.at("end").get<size_t>()});
    }
    return Waveform(std::move(s), side.at("sample_period_s").get<double>(), side.at("start_time_s").get<double>(),
                    std::move(ann));
}

std::vector<double> waveform_to_flux(const CQBSpec &spec, const Waveform &w) {
    std::vector<double> out;
    out.reserve(w.size());
    for (double e : w.samples()) {
        out.push_back(flux_of_epsilon(spec, e));
    }
    return out;
}

}  // namespace cqbsim
