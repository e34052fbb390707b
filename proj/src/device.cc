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

#include "cqbsim/device.h"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "cqbsim/errors.h"
#include "cqbsim/linalg.h"

namespace cqbsim {

namespace {

void require(bool ok, const std::string &field, const std::string &what) {
    if (!ok) {
        throw ConfigError(field + ": " + what, field);
    }
}

double number_field(const Json &j, const std::string &key, const std::string &prefix, bool required = true,
                    double fallback = 0) {
    std::string field = prefix + key;
    if (!j.contains(key)) {
        require(!required, field, "missing");
        return fallback;
    }
    const Json &v = j.at(key);
    require(v.is_number(), field, "must be a number");
    double x = v.get<double>();
    require(std::isfinite(x), field, "must be finite");
    return x;
}

}  // namespace

void TransmonSpec::validate(const std::string &prefix) const {
    require(f_min > 0, prefix + "f_min_hz", "must be > 0");
    require(f_max > f_min, prefix + "f_max_hz", "must exceed f_min_hz");
    require(e_c > 0, prefix + "e_c_hz", "must be > 0");
    require(kappa >= 0, prefix + "kappa_hz", "must be >= 0");
    require(chi >= 0, prefix + "chi_hz", "must be >= 0");
}

double CQBSpec::asymmetry() const {
    return std::abs(transmon_a.f_max - transmon_b.f_max) / delta;
}

void CQBSpec::validate() const {
    transmon_a.validate("transmon_a.");
    transmon_b.validate("transmon_b.");
    require(delta > 0, "delta_hz", "must be > 0");
    require(phi_star > 0 && phi_star < 0.5, "phi_star", "must lie in (0, 0.5)");
}

double ZZProfile::at(double detuning_hz) const {
    double d = std::abs(detuning_hz);
    if (detuning.empty() || d > detuning.back() * (1 + 1e-12)) {
        throw ConfigError("zz_profile does not cover detuning " + fmt(detuning_hz) + " Hz", "zz_profile");
    }
    auto it = std::upper_bound(detuning.begin(), detuning.end(), d);
    if (it == detuning.end()) {
        return zeta.back();
    }
    size_t k = static_cast<size_t>(it - detuning.begin());
    if (k == 0) {
        return zeta.front();
    }
    double x0 = detuning[k - 1], x1 = detuning[k];
    double w = (d - x0) / (x1 - x0);
    return zeta[k - 1] * (1 - w) + zeta[k] * w;
}

void ZZProfile::validate() const {
    require(detuning.size() >= 2 && detuning.size() == zeta.size(), "zz_profile",
            "needs >= 2 points and equal-length detuning_hz / zeta_hz arrays");
    require(detuning.front() == 0, "zz_profile.detuning_hz", "must start at 0");
    for (size_t k = 1; k < detuning.size(); k++) {
        require(detuning[k] > detuning[k - 1], "zz_profile.detuning_hz", "must be strictly increasing");
        require(zeta[k] <= zeta[k - 1], "zz_profile.zeta_hz", "must be non-increasing away from zero detuning");
    }
    for (double z : zeta) {
        require(std::isfinite(z) && z >= 0, "zz_profile.zeta_hz", "must be finite and >= 0");
    }
}

void TwoCQBSpec::validate() const {
    cqb_a.validate();
    cqb_b.validate();
    require(g23 > 0, "g23_hz", "must be > 0");
    zz_profile.validate();
    require(ramp_duration >= 0, "cz.ramp_s", "must be >= 0");
    require(ramp_duration == 0 || ramp_duration >= 4 * ramp_tau, "cz.ramp_tau_s",
            "ramp must last at least four time constants");
    require(hold >= 0, "cz.hold_s", "must be >= 0");
    require(std::abs(idle_detuning) <= zz_profile.max_detuning(), "idle_detuning_hz", "outside zz_profile");
}

double transmon_frequency(const TransmonSpec &spec, double phi) {
    return spec.delta_omega() * std::cos(kTwoPi * phi) + spec.omega_bar();
}

double epsilon_of_flux(const CQBSpec &spec, double df) {
    return 2 * spec.mean_delta_omega() * std::sin(kTwoPi * spec.phi_star) * std::sin(kTwoPi * df);
}

double epsilon_of_flux_linear(const CQBSpec &spec, double df) {
    return 2 * kTwoPi * spec.mean_delta_omega() * std::sin(kTwoPi * spec.phi_star) * df;
}

double flux_of_epsilon(const CQBSpec &spec, double epsilon) {
    double scale = 2 * spec.mean_delta_omega() * std::sin(kTwoPi * spec.phi_star);
    double s = epsilon / scale;
    if (std::abs(s) > 1) {
        throw NumericError("epsilon " + fmt(epsilon) + " Hz is beyond the reachable range", "epsilon");
    }
    return std::asin(s) / kTwoPi;
}

bool linear_epsilon_valid(const CQBSpec &spec, double df, double tol) {
    if (df == 0) {
        return true;
    }
    double exact = epsilon_of_flux(spec, df);
    return std::abs(epsilon_of_flux_linear(spec, df) - exact) <= tol * std::abs(exact);
}

double cqb_frequency(const CQBSpec &spec, double epsilon) {
    return std::hypot(spec.delta, epsilon);
}

double flux_noise_sensitivity(const CQBSpec &spec, double dphi1, double dphi2) {
    double dw = spec.mean_delta_omega();
    double s = std::sin(kTwoPi * spec.phi_star);
    double sum = dphi1 + dphi2;
    return 2 * kPi * kPi * dw * dw * s * s / spec.delta * sum * sum;
}

double transmon_sweet_spot_shift(double delta_omega, double dphi) {
    return 2 * kPi * kPi * delta_omega * dphi * dphi;
}

double flux_noise_ratio(const CQBSpec &spec) {
    // Evaluated through the two shift formulas rather than in closed form.
    const double dphi = 1e-4;
    return flux_noise_sensitivity(spec, dphi, 0) / transmon_sweet_spot_shift(spec.mean_delta_omega(), dphi);
}

double photon_noise_sensitivity(const CQBSpec &spec, double dE1, double dE2) {
    double d = dE1 - dE2;
    return d * d / (2 * spec.delta);
}

ZZProfile zz_profile_from_coupling(double g23, double max_detuning, int points) {
    if (!(g23 > 0) || !(max_detuning > 0) || points < 2) {
        throw ConfigError("zz_profile_from_coupling: need g23 > 0, max_detuning > 0, points >= 2", "g23_hz");
    }
    double w = g23 / 4;
    ZZProfile p;
    p.detuning.resize(points);
    p.zeta.resize(points);
    // sinh spacing: dense near the crossing, sparse in the tail.
    double umax = std::asinh(max_detuning / w);
    for (int k = 0; k < points; k++) {
        double d = k + 1 == points ? max_detuning : w * std::sinh(umax * k / (points - 1));
        p.detuning[k] = d;
        p.zeta[k] = w * w / (2 * (std::sqrt(d * d + w * w) + d));
    }
    return p;
}

double g23_from_interaction_time(double hold) {
    return 4.0 / hold;
}

TransmonSpec transmon_from_json(const Json &j, const std::string &prefix) {
    require(j.is_object(), prefix.empty() ? "transmon" : prefix.substr(0, prefix.size() - 1), "must be an object");
    TransmonSpec t;
    t.name = j.value("name", "");
    t.f_max = number_field(j, "f_max_hz", prefix);
    t.f_min = number_field(j, "f_min_hz", prefix);
    t.e_c = number_field(j, "e_c_hz", prefix);
    t.kappa = number_field(j, "kappa_hz", prefix, false);
    t.chi = number_field(j, "chi_hz", prefix, false);
    t.validate(prefix);
    return t;
}

CQBSpec cqb_spec_from_json(const Json &j) {
    require(j.is_object(), "spec", "must be a JSON object");
    CQBSpec s;
    s.name = j.value("name", "");
    require(j.contains("transmon_a"), "transmon_a", "missing");
    require(j.contains("transmon_b"), "transmon_b", "missing");
    s.transmon_a = transmon_from_json(j.at("transmon_a"), "transmon_a.");
    s.transmon_b = transmon_from_json(j.at("transmon_b"), "transmon_b.");
    s.delta = number_field(j, "delta_hz", "");
    s.phi_star = number_field(j, "phi_star", "");
    if (j.contains("annotations")) {
        require(j.at("annotations").is_object(), "annotations", "must be an object");
        for (auto it = j.at("annotations").begin(); it != j.at("annotations").end(); ++it) {
            require(it.value().is_number(), "annotations." + it.key(), "must be a number");
            s.annotations[it.key()] = it.value().get<double>();
        }
    }
    s.validate();
    return s;
}

static Json transmon_to_json(const TransmonSpec &t) {
    Json j;
    j["name"] = t.name;
    j["f_max_hz"] = t.f_max;
    j["f_min_hz"] = t.f_min;
    j["e_c_hz"] = t.e_c;
    j["kappa_hz"] = t.kappa;
    j["chi_hz"] = t.chi;
    return j;
}

Json cqb_spec_to_json(const CQBSpec &spec) {
    Json j;
    j["name"] = spec.name;
    j["transmon_a"] = transmon_to_json(spec.transmon_a);
    j["transmon_b"] = transmon_to_json(spec.transmon_b);
    j["delta_hz"] = spec.delta;
    j["phi_star"] = spec.phi_star;
    Json a = Json::object();
    for (const auto &[k, v] : spec.annotations) {
        a[k] = v;
    }
    j["annotations"] = a;
    return j;
}

CQBSpec load_cqb_spec(const std::string &path) {
    return cqb_spec_from_json(read_json(path));
}

TwoCQBSpec two_cqb_spec_from_json(const Json &j, const std::string &base_dir) {
    require(j.is_object(), "spec", "must be a JSON object");
    auto nested = [&](const std::string &key) {
        require(j.contains(key), key, "missing");
        const Json &v = j.at(key);
        if (v.is_string()) {
            std::filesystem::path p(v.get<std::string>());
            if (p.is_relative() && !base_dir.empty()) {
                p = std::filesystem::path(base_dir) / p;
            }
            return load_cqb_spec(p.string());
        }
        return cqb_spec_from_json(v);
    };
    TwoCQBSpec s;
    s.cqb_a = nested("cqb_a");
    s.cqb_b = nested("cqb_b");
    if (j.contains("g23_hz")) {
        s.g23 = number_field(j, "g23_hz", "");
    } else {
        require(j.contains("interaction_time_s"), "g23_hz", "missing (or give interaction_time_s)");
        s.g23 = g23_from_interaction_time(number_field(j, "interaction_time_s", ""));
    }
    s.idle_detuning = number_field(j, "idle_detuning_hz", "", false, 0);
    if (j.contains("zz_profile")) {
        const Json &p = j.at("zz_profile");
        require(p.is_object() && p.contains("detuning_hz") && p.contains("zeta_hz"), "zz_profile",
                "needs detuning_hz and zeta_hz arrays");
        try {
            s.zz_profile.detuning = p.at("detuning_hz").get<std::vector<double>>();
            s.zz_profile.zeta = p.at("zeta_hz").get<std::vector<double>>();
        } catch (const Json::exception &) {
            throw ConfigError("zz_profile: arrays must hold numbers", "zz_profile");
        }
    } else {
        double span = std::max(1e9, 2 * std::abs(s.idle_detuning));
        s.zz_profile = zz_profile_from_coupling(s.g23, span);
    }
    if (j.contains("cz")) {
        const Json &c = j.at("cz");
        s.ramp_duration = number_field(c, "ramp_s", "cz.", false, s.ramp_duration);
        s.ramp_tau = number_field(c, "ramp_tau_s", "cz.", false, s.ramp_tau);
        s.hold = number_field(c, "hold_s", "cz.", false, s.hold);
        s.cz_shift_a = number_field(c, "shift_a_hz", "cz.", false, 0);
        s.cz_shift_b = number_field(c, "shift_b_hz", "cz.", false, 0);
    }
    s.validate();
    return s;
}

TwoCQBSpec load_two_cqb_spec(const std::string &path) {
    std::string dir = std::filesystem::path(path).parent_path().string();
    return two_cqb_spec_from_json(read_json(path), dir);
}

}  // namespace cqbsim
