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

#include "cqbsim/noise.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cqbsim/calibration.h"
#include "cqbsim/errors.h"
#include "cqbsim/linalg.h"
#include "cqbsim/parallel.h"
#include "cqbsim/rng.h"

namespace cqbsim {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using cd = std::complex<double>;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double require_number(const Json &j, const char *key) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw ConfigError(std::string("missing numeric field ") + key, key);
    }
    return j[key].get<double>();
}

}  // namespace

void FluxNoiseSpec::validate() const {
    if (!(amplitude >= 0) || !std::isfinite(amplitude)) {
        throw ConfigError("flux noise amplitude must be finite and >= 0", "amplitude");
    }
    if (!std::isfinite(exponent) || exponent < 0) {
        throw ConfigError("spectral exponent must be finite and >= 0", "exponent");
    }
    if (!(f_low > 0) || !(f_high > f_low) || !std::isfinite(f_high)) {
        throw ConfigError("flux noise cutoffs must satisfy 0 < f_low < f_high", "f_low");
    }
}

double FluxNoiseSpec::band_variance(double lo, double hi) const {
    if (!(hi > lo)) {
        return 0;
    }
    double a2 = amplitude * amplitude;
    if (std::abs(exponent - 1) < 1e-12) {
        return a2 * std::log(hi / lo);
    }
    double k = 1 - exponent;
    return a2 * (std::pow(hi, k) - std::pow(lo, k)) / k;
}

namespace {

// integral of u^-alpha g(u) over [a, b], with g a sinc^2 filter (optionally times
// cos(2 pi u)). Beyond u = 4096 the oscillation is replaced by its mean.
double filtered_integral(double alpha, double a, double b, bool adjacent) {
    static const double x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                0.7966664774136267,  0.9602898564975363};
    static const double w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                                0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    auto g = [&](double u) {
        double s = u < 1e-8 ? 1 - kPi * kPi * u * u / 3 : std::sin(kPi * u) / (kPi * u);
        double v = s * s * std::pow(u, -alpha);
        return adjacent ? v * std::cos(kTwoPi * u) : v;
    };
    auto gauss = [&](double lo, double hi) {
        double m = (lo + hi) / 2, r = (hi - lo) / 2, sum = 0;
        for (int k = 0; k < 8; k++) {
            sum += w[k] * g(m + r * x[k]);
        }
        return sum * r;
    };
    // Same in log u for the slowly varying low end.
    auto gauss_log = [&](double lo, double hi) {
        double m = (std::log(lo) + std::log(hi)) / 2, r = (std::log(hi) - std::log(lo)) / 2, sum = 0;
        for (int k = 0; k < 8; k++) {
            double u = std::exp(m + r * x[k]);
            sum += w[k] * g(u) * u;
        }
        return sum * r;
    };
    const double cut = 4096;
    double total = 0;
    double lo = a;
    while (lo < std::min(b, 1.0)) {
        double hi = std::min({lo * std::exp(0.25), b, 1.0});
        total += gauss_log(lo, hi);
        lo = hi;
    }
    lo = std::max(lo, a);
    while (lo < std::min(b, cut)) {
        double hi = std::min({std::floor(lo) + 1, b, cut});
        total += gauss(lo, hi);
        lo = hi;
    }
    if (b > cut) {
        // Mean of sin^2(pi u) is 1/2; of sin^2(pi u) cos(2 pi u) it is -1/4.
        double c = (adjacent ? -0.25 : 0.5) / (kPi * kPi);
        double p = -alpha - 1;
        double from = std::max(a, cut);
        total += c * (std::pow(b, p) - std::pow(from, p)) / p;
    }
    return total;
}

}  // namespace

double FluxNoiseSpec::window_variance(double t) const {
    if (!(t > 0)) {
        return variance();
    }
    return amplitude * amplitude * std::pow(t, exponent - 1) * filtered_integral(exponent, f_low * t, f_high * t, false);
}

double FluxNoiseSpec::window_covariance(double t) const {
    if (!(t > 0)) {
        return variance();
    }
    return amplitude * amplitude * std::pow(t, exponent - 1) * filtered_integral(exponent, f_low * t, f_high * t, true);
}

FluxNoiseSpec flux_noise_from_json(const Json &j) {
    FluxNoiseSpec s;
    s.amplitude = require_number(j, "amplitude_phi0_per_rthz");
    s.exponent = j.value("exponent", 1.0);
    s.f_low = j.value("f_low_hz", 1.0);
    s.f_high = j.value("f_high_hz", 1e6);
    s.independent = j.value("independent", true);
    s.drift = j.value("drift", true);
    s.validate();
    return s;
}

Json flux_noise_to_json(const FluxNoiseSpec &s) {
    Json j;
    j["amplitude_phi0_per_rthz"] = s.amplitude;
    j["exponent"] = s.exponent;
    j["f_low_hz"] = s.f_low;
    j["f_high_hz"] = s.f_high;
    j["independent"] = s.independent;
    j["drift"] = s.drift;
    return j;
}

std::vector<std::array<double, 2>> sample_quasistatic_flux(const FluxNoiseSpec &spec, int n_traj, uint64_t seed) {
    spec.validate();
    if (n_traj < 0) {
        throw ConfigError("n_traj must be >= 0", "n_traj");
    }
    double sd = std::sqrt(spec.variance());
    std::vector<std::array<double, 2>> out(static_cast<size_t>(n_traj));
    for (int i = 0; i < n_traj; i++) {
        Rng rng = Rng::derive(seed, static_cast<uint64_t>(i));
        double a = sd * rng.normal();
        double b = spec.independent ? sd * rng.normal() : a;
        out[static_cast<size_t>(i)] = {a, b};
    }
    return out;
}

void PhotonNoiseSpec::validate() const {
    if (!(n_bar >= 0) || !std::isfinite(n_bar)) {
        throw ConfigError("n_bar must be finite and >= 0", "n_bar");
    }
    if (!(kappa > 0) || !std::isfinite(kappa)) {
        throw ConfigError("kappa must be > 0", "kappa");
    }
    if (!std::isfinite(chi) || !std::isfinite(detuning)) {
        throw ConfigError("chi and detuning must be finite", "chi");
    }
}

GambettaTerms gambetta_terms(const PhotonNoiseSpec &spec) {
    spec.validate();
    double k = kTwoPi * spec.kappa;
    double x = kTwoPi * spec.chi;
    double dr = kTwoPi * spec.detuning;
    // Resonator field for the qubit in g and in e, with the drive scaled so that
    // the ground-state steady state holds n_bar photons.
    double eps = std::sqrt(spec.n_bar * (k * k / 4 + (dr - x) * (dr - x)));
    cd i(0, 1);
    cd alpha_g = -i * eps / cd(k / 2, dr - x);
    cd alpha_e = -i * eps / cd(k / 2, dr + x);
    GambettaTerms t;
    t.lambda = cd(k / 2, x + dr);
    cd rate = 2.0 * i * x * alpha_e * std::conj(alpha_g);
    t.gamma = rate.real();
    t.b = rate.imag();
    t.a = -2.0 * i * x * std::conj(alpha_g) * (alpha_g - alpha_e) / t.lambda;
    return t;
}

namespace {

cd gambetta_signal(const GambettaTerms &g, double base_t2r, double omega_a, double t) {
    double base = std::isfinite(base_t2r) ? 1 / base_t2r : 0;
    cd lin(-(base + g.gamma) * t, -(omega_a + g.b) * t);
    return std::exp(lin + g.a * (1.0 - std::exp(-g.lambda * t)));
}

}  // namespace

std::complex<double> gambetta_signal(const PhotonNoiseSpec &spec, double base_t2r, double omega_a, double t) {
    return gambetta_signal(gambetta_terms(spec), base_t2r, omega_a, t);
}

DecayCurve gambetta_ramsey(const PhotonNoiseSpec &spec, double base_t2r, const std::vector<double> &tau,
                           double omega_a) {
    if (!(base_t2r > 0)) {
        throw ConfigError("base T2R must be > 0", "base_t2r");
    }
    GambettaTerms g = gambetta_terms(spec);
    DecayCurve c;
    c.tau = tau;
    for (double t : tau) {
        cd s = gambetta_signal(g, base_t2r, omega_a, t);
        c.p_e.push_back((1 + s.real()) / 2);
        c.coherence.push_back(std::abs(s));
    }
    // 1/e time: march until |S| drops below 1/e, then bisect.
    double rate = (std::isfinite(base_t2r) ? 1 / base_t2r : 0) + g.gamma;
    if (!(rate > 0)) {
        c.one_over_e = kInf;
        return c;
    }
    const double target = std::exp(-1.0);
    auto f = [&](double t) { return std::abs(gambetta_signal(g, base_t2r, omega_a, t)) - target; };
    double t_eff = 1 / rate;
    double t_res = 1 / g.lambda.real();
    double lo = 0;
    double hi = 0;
    bool found = false;
    for (int step = 0; step < 10000000; step++) {
        double h = 0.01 * (hi * g.lambda.real() > 50 ? t_eff : std::min(t_eff, t_res));
        lo = hi;
        hi = lo + h;
        if (f(hi) <= 0) {
            found = true;
            break;
        }
    }
    if (!found) {
        c.one_over_e = kInf;
        return c;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; it++) {
        double mid = (lo + hi) / 2;
        (f(mid) <= 0 ? hi : lo) = mid;
    }
    c.one_over_e = (lo + hi) / 2;
    return c;
}

double one_over_e_time(const std::vector<double> &tau, const std::vector<double> &coherence) {
    const double target = std::exp(-1.0);
    for (size_t k = 1; k < tau.size() && k < coherence.size(); k++) {
        if (coherence[k] <= target) {
            double c0 = coherence[k - 1], c1 = coherence[k];
            if (c0 <= target) {
                return tau[k - 1];
            }
            return tau[k - 1] + (c0 - target) / (c0 - c1) * (tau[k] - tau[k - 1]);
        }
    }
    return kInf;
}

namespace {

void require_sorted_times(const std::vector<double> &tau) {
    if (tau.empty()) {
        throw ConfigError("tau grid is empty", "tau");
    }
    for (size_t k = 0; k < tau.size(); k++) {
        if (!(tau[k] >= 0) || !std::isfinite(tau[k]) || (k > 0 && tau[k] < tau[k - 1])) {
            throw ConfigError("tau grid must be finite, >= 0 and non-decreasing", "tau");
        }
    }
}

}  // namespace

DecayCurve cqb_photon_ramsey(const CQBSpec &cqb, const PhotonNoiseSpec &t1, const PhotonNoiseSpec &t2,
                             double base_t2r, const std::vector<double> &tau, int n_traj, uint64_t seed,
                             int workers) {
    t1.validate();
    t2.validate();
    require_sorted_times(tau);
    if (!(base_t2r > 0)) {
        throw ConfigError("base T2R must be > 0", "base_t2r");
    }
    if (n_traj < 1) {
        throw ConfigError("n_traj must be >= 1", "n_traj");
    }
    // Coherent-state photon number fluctuations decay at the field rate kappa/2.
    const std::array<double, 2> theta = {kPi * t1.kappa, kPi * t2.kappa};
    const std::array<double, 2> sd = {std::sqrt(t1.n_bar), std::sqrt(t2.n_bar)};
    const std::array<double, 2> shift = {2 * t1.chi, 2 * t2.chi};
    const double h_max = 0.05 / std::max(theta[0], theta[1]);
    auto one = [&](size_t i) {
        Rng rng = Rng::derive(seed, i);
        std::array<double, 2> n = {sd[0] * rng.normal(), sd[1] * rng.normal()};
        auto df = [&]() { return photon_noise_sensitivity(cqb, shift[0] * n[0], shift[1] * n[1]); };
        std::vector<cd> out(tau.size());
        double t = 0;
        double phase = 0;
        double f_prev = df();
        for (size_t k = 0; k < tau.size(); k++) {
            double span = tau[k] - t;
            int steps = span > 0 ? static_cast<int>(std::ceil(span / h_max)) : 0;
            for (int s = 0; s < steps; s++) {
                double h = span / steps;
                for (int q = 0; q < 2; q++) {
                    double decay = std::exp(-theta[q] * h);
                    n[q] = n[q] * decay + sd[q] * std::sqrt(1 - decay * decay) * rng.normal();
                }
                double f_now = df();
                phase += kPi * (f_prev + f_now) * h;
                f_prev = f_now;
            }
            t = tau[k];
            out[k] = std::polar(1.0, phase);
        }
        return out;
    };
    auto traj = parallel_map(static_cast<size_t>(n_traj), workers, one);
    DecayCurve c;
    c.tau = tau;
    for (size_t k = 0; k < tau.size(); k++) {
        cd mean = 0;
        for (const auto &v : traj) {
            mean += v[k];
        }
        mean /= static_cast<double>(n_traj);
        double env = std::exp(-tau[k] / base_t2r);
        c.p_e.push_back((1 + env * mean.real()) / 2);
        c.coherence.push_back(env * std::abs(mean));
    }
    c.one_over_e = one_over_e_time(c.tau, c.coherence);
    return c;
}

Json DecayFit::to_json() const {
    Json j;
    j["model"] = model;
    j["gamma_cqb_per_s"] = gamma_cqb;
    j["gamma_cqb_error_per_s"] = gamma_cqb_error;
    j["gamma_leak_per_s"] = gamma_leak;
    j["gamma_leak_error_per_s"] = gamma_leak_error;
    j["amplitude"] = amplitude;
    j["t1_lower_bound_s"] = std::isfinite(t1_lower_bound) ? Json(t1_lower_bound) : Json("inf");
    j["residual_norm"] = residual_norm;
    j["fit"] = fit.to_json();
    return j;
}

namespace {

struct TripleData {
    VectorXd t;
    VectorXd y;  // [p_prep; p_other; p_gg - 1]
};

MatrixXd triple_basis(const VectorXd &t, double gc, double gl) {
    Eigen::Index n = t.size();
    MatrixXd a(3 * n, 1);
    for (Eigen::Index k = 0; k < n; k++) {
        double ec = std::exp(-gc * t[k]);
        double el = std::exp(-gl * t[k]);
        a(k, 0) = (0.5 + 0.5 * ec) * el;
        a(n + k, 0) = (0.5 - 0.5 * ec) * el;
        a(2 * n + k, 0) = -el;
    }
    return a;
}

// Unweighted residual sum of squares with Gc held fixed, minimized over GL and A.
double profile_rss(const TripleData &d, double gc, double gl_start, double *gl_out) {
    auto basis = [&](const VectorXd &th) { return triple_basis(d.t, gc, th[0]); };
    FitOptions opt;
    opt.lower = VectorXd::Zero(1);
    VectorXd s(1);
    s << gl_start;
    FitResult r = fit_separable(basis, d.y, {s}, {}, opt);
    if (gl_out) {
        *gl_out = r.params[0];
    }
    return r.residuals.squaredNorm();
}

}  // namespace

DecayFit fit_t1_leakage(const std::vector<double> &t, const std::vector<double> &p_prep,
                        const std::vector<double> &p_other, const std::vector<double> &p_gg, double sigma) {
    size_t n = t.size();
    if (n < 3 || p_prep.size() != n || p_other.size() != n || p_gg.size() != n) {
        throw ConfigError("three population curves on a common grid of >= 3 points are required", "populations");
    }
    require_sorted_times(t);
    double tol = std::max(0.05, 5 * std::max(sigma, 0.0));
    for (const auto *curve : {&p_prep, &p_other, &p_gg}) {
        for (double p : *curve) {
            if (!std::isfinite(p) || p < -tol || p > 1 + tol) {
                throw ConfigError("non-physical population outside [0, 1] beyond the noise tolerance", "populations");
            }
        }
    }
    TripleData d;
    d.t = Eigen::Map<const VectorXd>(t.data(), static_cast<Eigen::Index>(n));
    d.y.resize(3 * static_cast<Eigen::Index>(n));
    for (size_t k = 0; k < n; k++) {
        d.y[static_cast<Eigen::Index>(k)] = p_prep[k];
        d.y[static_cast<Eigen::Index>(n + k)] = p_other[k];
        d.y[static_cast<Eigen::Index>(2 * n + k)] = p_gg[k] - 1;
    }
    double span = t.back() - t.front();
    if (!(span > 0)) {
        throw ConfigError("time grid has zero span", "t");
    }
    auto basis = [&](const VectorXd &th) { return triple_basis(d.t, th[0], th[1]); };
    std::vector<VectorXd> starts;
    for (double gl : log_spaced(0.1 / span, 10 / span, 5)) {
        for (double gc : {0.0, 1 / span}) {
            VectorXd s(2);
            s << gc, gl;
            starts.push_back(s);
        }
    }
    FitOptions opt;
    opt.lower = VectorXd::Zero(2);
    VectorXd sig;
    if (sigma > 0) {
        sig = VectorXd::Constant(d.y.size(), sigma);
    }
    FitResult r = fit_separable(basis, d.y, starts, sig, opt);
    r.names = {"gamma_cqb", "gamma_leak", "amplitude"};

    DecayFit out;
    out.model = "T1-triple";
    out.fit = r;
    out.gamma_cqb = std::max(r.params[0], 0.0);
    out.gamma_leak = std::max(r.params[1], 0.0);
    out.amplitude = r.params[2];
    out.gamma_cqb_error = r.errors.size() > 0 ? r.errors[0] : 0;
    out.gamma_leak_error = r.errors.size() > 1 ? r.errors[1] : 0;
    double rss = profile_rss(d, out.gamma_cqb, out.gamma_leak, nullptr);
    out.residual_norm = std::sqrt(rss);

    // Profile likelihood for the upper end of Gc: delta chi2 = 2.71 (one-sided 95%).
    int dof = static_cast<int>(d.y.size()) - 3;
    double var = sigma > 0 ? sigma * sigma : (dof > 0 ? rss / dof : 0);
    bool consistent_with_zero = out.gamma_cqb <= 2 * out.gamma_cqb_error || out.gamma_cqb == 0;
    if (!consistent_with_zero) {
        out.t1_lower_bound = 0;
        return out;
    }
    if (!(var > 0)) {
        out.t1_lower_bound = kInf;
        return out;
    }
    const double target = 2.71;
    double gl = out.gamma_leak;
    auto excess = [&](double gc) {
        double next = gl;
        double v = (profile_rss(d, gc, gl, &next) - rss) / var - target;
        gl = next;
        return v;
    };
    double lo = out.gamma_cqb;
    double hi = std::max({out.gamma_cqb_error, 1e-3 / span, 2 * out.gamma_cqb});
    int grow = 0;
    while (excess(hi) < 0) {
        lo = hi;
        hi *= 2;
        if (++grow > 200) {
            out.t1_lower_bound = 0;
            return out;
        }
    }
    for (int it = 0; it < 100 && hi - lo > 1e-6 * hi; it++) {
        double mid = (lo + hi) / 2;
        (excess(mid) < 0 ? lo : hi) = mid;
    }
    out.t1_lower_bound = 1 / hi;
    return out;
}

const char *protocol_name(CoherenceProtocol p) {
    return p == CoherenceProtocol::Ramsey ? "ramsey" : "echo";
}

CoherenceProtocol protocol_from_string(const std::string &s) {
    if (s == "ramsey") {
        return CoherenceProtocol::Ramsey;
    }
    if (s == "echo") {
        return CoherenceProtocol::Echo;
    }
    throw ConfigError("unknown coherence protocol '" + s + "' (ramsey, echo)", "protocol");
}

double flux_dephasing_scale(const CQBSpec &spec, const FluxNoiseSpec &noise) {
    noise.validate();
    double c = flux_noise_sensitivity(spec, 1, 0);
    double v = noise.variance() * (noise.independent ? 2 : 4);
    return c * v > 0 ? 1 / (kTwoPi * c * v) : kInf;
}

CoherenceResult simulate_coherence(const CQBSpec &spec, const CalibratedGateSet &calib, const FluxNoiseSpec &noise,
                                   CoherenceProtocol protocol, const std::vector<double> &tau, int n_traj,
                                   uint64_t seed, int workers) {
    spec.validate();
    calib.validate();
    noise.validate();
    if (n_traj < 100) {
        throw ConfigError("n_traj must be at least 100 for a stable fit", "n_traj");
    }
    require_sorted_times(tau);
    if (tau.size() < 3) {
        throw ConfigError("tau grid needs at least 3 points", "tau");
    }
    const bool echo = protocol == CoherenceProtocol::Echo;
    const double t_period = calib.t_delta();
    // Whole Z(2 pi) idles; echo halves need an even count.
    std::vector<long long> periods;
    CoherenceResult res;
    res.protocol = protocol;
    for (double t : tau) {
        long long n = echo ? 2 * std::llround(t / (2 * t_period)) : std::llround(t / t_period);
        periods.push_back(n);
        res.tau.push_back(static_cast<double>(n) * t_period);
    }
    const Mat2 wx = window_unitary(spec, calib, Axis::X, 1);
    const Mat2 wy = window_unitary(spec, calib, Axis::Y, 1);
    // Quasi-static offset with the full-band variance. Echo halves share it up to
    // the change in segment mean, variance 2 (V - C) of the filtered spectrum.
    const double v_full = noise.variance();
    std::vector<double> increment;
    for (double t : res.tau) {
        double seg = t / 2;
        increment.push_back(echo && noise.drift && seg > 0
                                ? std::max(0.0, 2 * (noise.window_variance(seg) - noise.window_covariance(seg)))
                                : 0.0);
    }
    // A frequency offset df during a window adds 2 pi df t_d of precession, split
    // evenly on either side of the drive.
    auto shifted = [&](const Mat2 &w, double df) {
        Mat2 z = rot_z(kPi * df * calib.t_d);
        return Mat2(z * w * z);
    };
    struct Point {
        double p0;
        cd rho01;
    };
    auto one = [&](size_t i) {
        Rng rng = Rng::derive(seed, i);
        // Common random numbers across the tau grid: two draws per transmon.
        std::array<std::array<double, 2>, 2> z{};
        for (auto &q : z) {
            for (double &v : q) {
                v = rng.normal();
            }
        }
        if (!noise.independent) {
            z[1] = z[0];
        }
        std::vector<Point> out(tau.size());
        for (size_t k = 0; k < tau.size(); k++) {
            double d = increment[k];
            double sd_common = std::sqrt(std::max(0.0, v_full - d / 4));
            std::array<double, 2> x1{}, x2{};
            for (int q = 0; q < 2; q++) {
                double half_step = std::sqrt(d) * z[q][1] / 2;
                x1[q] = sd_common * z[q][0] - half_step;
                x2[q] = sd_common * z[q][0] + half_step;
            }
            double df1 = flux_noise_sensitivity(spec, x1[0], x1[1]);
            double df2 = echo ? flux_noise_sensitivity(spec, x2[0], x2[1]) : df1;
            Vec2 psi(1, 0);
            Mat2 last;
            if (!echo) {
                double idle = kTwoPi * (spec.delta + df1) * static_cast<double>(periods[k]) * t_period;
                psi = rot_z(idle) * shifted(wx, df1) * psi;
                last = shifted(wx, df1);
            } else {
                double half = static_cast<double>(periods[k] / 2) * t_period;
                Mat2 wy1 = shifted(wy, df1);
                psi = rot_z(kTwoPi * (spec.delta + df2) * half) * wy1 * wy1 *
                      rot_z(kTwoPi * (spec.delta + df1) * half) * shifted(wx, df1) * psi;
                last = shifted(wx, df2);
            }
            Vec2 fin = last * psi;
            out[k] = {std::norm(fin[0]), psi[0] * std::conj(psi[1])};
        }
        return out;
    };
    auto traj = parallel_map(static_cast<size_t>(n_traj), workers, one);
    for (size_t k = 0; k < tau.size(); k++) {
        double p0 = 0;
        cd rho = 0;
        for (const auto &v : traj) {
            p0 += v[k].p0;
            rho += v[k].rho01;
        }
        res.p0.push_back(p0 / n_traj);
        res.coherence.push_back(2 * std::abs(rho) / n_traj);
    }

    // Exponential envelope c exp(-gamma tau) down to the first point below 1/e, so
    // algebraic tails do not dominate; multi-start over 5 log-spaced rates.
    size_t used = tau.size();
    for (size_t k = 0; k < tau.size(); k++) {
        if (res.coherence[k] < std::exp(-1.0)) {
            used = std::max<size_t>(k + 1, 3);
            break;
        }
    }
    auto n_used = static_cast<Eigen::Index>(used);
    VectorXd x = Eigen::Map<const VectorXd>(res.tau.data(), n_used);
    VectorXd y = Eigen::Map<const VectorXd>(res.coherence.data(), n_used);
    double t_max = x.maxCoeff();
    if (!(t_max > 0)) {
        throw ConfigError("tau grid has zero span", "tau");
    }
    auto basis = [&](const VectorXd &th) -> MatrixXd { return (-th[0] * x).array().exp().matrix(); };
    std::vector<VectorXd> starts;
    for (double g : log_spaced(0.1 / t_max, 10 / t_max, 5)) {
        starts.push_back(VectorXd::Constant(1, g));
    }
    FitOptions opt;
    opt.lower = VectorXd::Zero(1);
    res.fit = fit_separable(basis, y, starts, {}, opt);
    res.fit.names = {"gamma", "amplitude"};
    double g = res.fit.params[0];
    res.t2 = g > 1e-300 ? 1 / g : kInf;
    res.t2_error = g > 1e-300 ? res.fit.errors[0] / (g * g) : kInf;
    return res;
}

}  // namespace cqbsim
