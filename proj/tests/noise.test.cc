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

#include <cmath>

#include "gtest/gtest.h"

#include "cqbsim/errors.h"
#include "cqbsim/propagator.h"
#include "cqbsim/rng.h"
#include "test_util.h"

using namespace cqbsim;
using cqbsim_test::calibrated_a;
using cqbsim_test::cqb_a;

namespace {

using cd = std::complex<double>;

PhotonNoiseSpec q1(double n_bar) {
    PhotonNoiseSpec p;
    p.n_bar = n_bar;
    p.kappa = 0.26e6;
    p.chi = 0.28e6;
    return p;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v;
    for (int k = 0; k < n; k++) {
        v.push_back(lo + (hi - lo) * k / (n - 1));
    }
    return v;
}

// Coherent-state fields for the qubit in g and e, integrated with RK4; the qubit
// coherence picks up exp(-2 i chi integral(alpha_e conj(alpha_g))).
cd integrate_fields(const PhotonNoiseSpec &p, double t_end, int steps) {
    double k = kTwoPi * p.kappa, x = kTwoPi * p.chi, dr = kTwoPi * p.detuning;
    double eps = std::sqrt(p.n_bar * (k * k / 4 + (dr - x) * (dr - x)));
    cd i(0, 1);
    cd ag = -i * eps / cd(k / 2, dr - x);
    cd ae = ag;
    cd phase = 0;
    auto de = [&](cd a) { return -cd(k / 2, dr + x) * a - i * eps; };
    double h = t_end / steps;
    for (int s = 0; s < steps; s++) {
        cd k1 = de(ae), k2 = de(ae + h / 2 * k1), k3 = de(ae + h / 2 * k2), k4 = de(ae + h * k3);
        cd a_mid = ae + h / 2 * k1 / 2.0 + h / 2 * k2 / 2.0;
        cd a_next = ae + h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        // Simpson on the product over the step.
        phase += h / 6 * (ae + 4.0 * a_mid + a_next) * std::conj(ag);
        ae = a_next;
    }
    return std::exp(-2.0 * i * x * phase);
}

struct Triple {
    std::vector<double> t, prep, other, gg;
};

Triple generate(const LeakageRates &r, int prep, const std::vector<double> &t, double sigma, uint64_t seed) {
    Triple d;
    d.t = t;
    Rng rng(seed);
    CQBState s = CQBState::basis(prep);
    for (double x : t) {
        auto p = idle_populations(r, s, x);
        d.prep.push_back(p[static_cast<size_t>(prep)] + sigma * rng.normal());
        d.other.push_back(p[static_cast<size_t>(1 - prep)] + sigma * rng.normal());
        d.gg.push_back(p[2] + sigma * rng.normal());
    }
    return d;
}

}  // namespace

TEST(noise, flux_variance_matches_integral) {
    FluxNoiseSpec s;
    s.amplitude = 5e-6;
    auto draws = sample_quasistatic_flux(s, 100000, 3);
    double expect = 25e-12 * std::log(1e6);
    for (int q = 0; q < 2; q++) {
        double v = 0;
        for (const auto &d : draws) {
            v += d[q] * d[q];
        }
        ASSERT_NEAR(v / draws.size(), expect, 0.02 * expect);
    }
    double cross = 0;
    for (const auto &d : draws) {
        cross += d[0] * d[1];
    }
    ASSERT_LT(std::abs(cross / draws.size()), 0.02 * expect);
}

TEST(noise, flux_draws_trivial_cases) {
    FluxNoiseSpec s;
    for (const auto &d : sample_quasistatic_flux(s, 50, 1)) {
        ASSERT_EQ(d[0], 0);
        ASSERT_EQ(d[1], 0);
    }
    s.amplitude = 1e-5;
    auto a = sample_quasistatic_flux(s, 50, 9);
    auto b = sample_quasistatic_flux(s, 50, 9);
    ASSERT_EQ(a, b);
    s.independent = false;
    for (const auto &d : sample_quasistatic_flux(s, 50, 9)) {
        ASSERT_EQ(d[0], d[1]);
    }
    s.f_high = s.f_low;
    ASSERT_THROW(sample_quasistatic_flux(s, 5, 1), ConfigError);
}

TEST(noise, white_band_variance) {
    FluxNoiseSpec s;
    s.amplitude = 2;
    s.exponent = 0;
    ASSERT_NEAR(s.band_variance(10, 30), 4 * 20, 1e-9);
    s.exponent = 2;
    ASSERT_NEAR(s.band_variance(1, 2), 4 * 0.5, 1e-12);
}

TEST(noise, window_moments_white_oracle) {
    // White noise: the mean over a window t has variance A^2 / (2 t), and adjacent
    // windows are uncorrelated.
    FluxNoiseSpec s;
    s.amplitude = 3;
    s.exponent = 0;
    s.f_low = 1e-3;
    s.f_high = 1e9;
    double t = 1e-3;
    ASSERT_NEAR(s.window_variance(t), 9 / (2 * t), 1e-3 * 9 / (2 * t));
    ASSERT_LT(std::abs(s.window_covariance(t)), 1e-3 * 9 / (2 * t));
    ASSERT_EQ(s.window_variance(0), s.variance());
}

TEST(noise, window_moments_one_over_f) {
    FluxNoiseSpec s;
    s.amplitude = 1;
    // Short windows see nearly the whole band; long ones lose the fast part.
    ASSERT_NEAR(s.window_variance(1e-9), s.variance(), 1e-3 * s.variance());
    double prev = s.variance();
    for (double t : {1e-6, 1e-4, 1e-2}) {
        double v = s.window_variance(t), c = s.window_covariance(t);
        ASSERT_LT(v, prev);
        ASSERT_LT(c, v);
        ASSERT_GT(c, 0.5 * v);
        prev = v;
        // Inside the band V - C -> A^2 integral 2 sin^4(pi u) / (pi u)^2 u du = 2 ln 2 A^2.
        if (t >= 1e-4) {
            ASSERT_NEAR(v - c, 2 * std::log(2.0), 2e-3) << t;
        }
    }
}

TEST(noise, gambetta_without_photons) {
    auto c = gambetta_ramsey(q1(0), 8e-6, linspace(0, 40e-6, 41));
    ASSERT_NEAR(c.one_over_e, 8e-6, 1e-15);
    for (size_t k = 0; k < c.tau.size(); k++) {
        ASSERT_NEAR(c.coherence[k], std::exp(-c.tau[k] / 8e-6), 1e-14);
    }
}

TEST(noise, gambetta_matches_field_integration) {
    for (double det : {0.0, 0.15e6}) {
        auto p = q1(2.5);
        p.detuning = det;
        for (double t : {0.2e-6, 1e-6, 3e-6}) {
            cd a = gambetta_signal(p, std::numeric_limits<double>::infinity(), 0, t);
            cd b = integrate_fields(p, t, 4000);
            ASSERT_LT(std::abs(a - b), 1e-9) << det << " " << t;
        }
    }
}

TEST(noise, gambetta_weak_dispersive_limit) {
    auto p = q1(3);
    p.chi = p.kappa * 1e-3;
    auto g = gambetta_terms(p);
    double k = kTwoPi * p.kappa, x = kTwoPi * p.chi;
    ASSERT_NEAR(g.gamma, 8 * x * x * p.n_bar / k, 1e-5 * g.gamma);
    ASSERT_NEAR(g.b, 2 * x * p.n_bar, 1e-5 * g.b);
}

TEST(noise, gambetta_decreasing_in_photon_number) {
    double prev = std::numeric_limits<double>::infinity();
    for (double n : {0.0, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0}) {
        double t = gambetta_ramsey(q1(n), 10e-6, {0}).one_over_e;
        ASSERT_LT(t, prev) << n;
        prev = t;
    }
}

TEST(noise, gambetta_markov_limit) {
    auto p = q1(1);
    double gamma = gambetta_terms(p).gamma;
    double t2r = 10e-6;
    for (double scale : {1e2, 1e4}) {
        PhotonNoiseSpec fast = p;
        fast.kappa = p.kappa * scale;
        // Hold Gamma fixed while the resonator gets fast.
        fast.n_bar = p.n_bar * gamma / gambetta_terms(fast).gamma;
        double t = gambetta_ramsey(fast, t2r, {0}).one_over_e;
        double markov = 1 / (1 / t2r + gamma);
        ASSERT_NEAR(t, markov, (scale > 1e3 ? 1e-3 : 5e-2) * markov);
    }
}

TEST(noise, cqb_photon_rate_slope_far_below_transmon) {
    auto cqb = cqb_a();
    double t2r = 10e-6;
    auto tau = linspace(0, 30e-6, 121);
    double base = 1 / t2r;
    double n = 1.0;
    double transmon = 1 / gambetta_ramsey(q1(n), t2r, {0}).one_over_e - base;
    auto c = cqb_photon_ramsey(cqb, q1(n), q1(n), t2r, tau, 400, 5);
    double cqb_rate = 1 / c.one_over_e - base;
    ASSERT_GT(transmon, 0);
    ASSERT_LT(std::abs(cqb_rate) * 10, transmon);
    // With the noise switched off the CQB curve is the bare envelope.
    auto quiet = cqb_photon_ramsey(cqb, q1(0), q1(0), t2r, tau, 10, 5);
    ASSERT_NEAR(quiet.one_over_e, t2r, 1e-3 * t2r);
}

TEST(noise, cqb_photon_phase_matches_quasistatic_limit) {
    // kappa -> 0 freezes dn; the coherence is then the chi-square characteristic
    // function of the static Stark shifts.
    auto cqb = cqb_a();
    auto p = q1(4);
    p.kappa = 1;
    double t = 40e-6;
    auto c = cqb_photon_ramsey(cqb, p, p, std::numeric_limits<double>::infinity(), {0, t}, 20000, 2);
    // dE1 - dE2 ~ N(0, 2 (2 chi)^2 n_bar); df = d^2 / (2 Delta).
    double v = 2 * std::pow(2 * p.chi, 2) * p.n_bar;
    cd expect = std::pow(cd(1, -kTwoPi * t * v / cqb.delta), -0.5);
    ASSERT_NEAR(c.coherence[1], std::abs(expect), 0.02);
}

TEST(noise, t1_fit_recovers_device_rates) {
    auto t = linspace(0, 100e-6, 201);
    for (int prep : {1, 0}) {
        double rate = prep == 1 ? 1 / 27e-6 : 1 / 41e-6;
        LeakageRates r;
        (prep == 1 ? r.leak_from_1 : r.leak_from_0) = rate;
        auto d = generate(r, prep, t, 0.005, 17 + prep);
        auto f = fit_t1_leakage(d.t, d.prep, d.other, d.gg, 0.005);
        ASSERT_NEAR(f.gamma_leak, rate, 0.03 * rate) << prep;
        ASSERT_GT(f.t1_lower_bound, 100e-6) << prep;
        ASSERT_GE(f.gamma_cqb, 0);
    }
}

TEST(noise, t1_fit_noiseless_constant) {
    auto t = linspace(0, 50e-6, 51);
    std::vector<double> one(t.size(), 1.0), zero(t.size(), 0.0);
    auto f = fit_t1_leakage(t, one, zero, zero);
    ASSERT_NEAR(f.gamma_cqb, 0, 1e-6);
    ASSERT_NEAR(f.gamma_leak, 0, 1e-6);
    ASSERT_NEAR(f.amplitude, 1, 1e-9);
}

TEST(noise, t1_bound_in_device_regime) {
    LeakageRates r;
    r.leak_from_1 = 1 / 27e-6;
    auto d = generate(r, 1, linspace(0, 100e-6, 201), 0.01, 4);
    auto f = fit_t1_leakage(d.t, d.prep, d.other, d.gg, 0.01);
    ASSERT_GT(f.t1_lower_bound, 2e-3);
}

TEST(noise, t1_fit_round_trips_random_draws) {
    Rng rng(2026);
    for (int trial = 0; trial < 20; trial++) {
        double lo = std::log(1 / 100e-6), hi = std::log(1 / 5e-6);
        LeakageRates r;
        r.gamma_cqb = std::exp(lo + (hi - lo) * rng.uniform());
        r.leak_from_1 = r.leak_from_0 = std::exp(lo + (hi - lo) * rng.uniform());
        // Record until the populations have leaked away, densely sampled.
        auto t = linspace(0, std::min(100e-6, 8 / r.leak_from_1), 1001);
        auto d = generate(r, 1, t, 0.005, 100 + trial);
        auto f = fit_t1_leakage(d.t, d.prep, d.other, d.gg, 0.005);
        ASSERT_NEAR(f.gamma_cqb, r.gamma_cqb, 0.05 * r.gamma_cqb) << trial;
        ASSERT_NEAR(f.gamma_leak, r.leak_from_1, 0.05 * r.leak_from_1) << trial;
    }
}

TEST(noise, t1_fit_rejects_nonphysical) {
    auto t = linspace(0, 1e-6, 5);
    std::vector<double> bad = {1, 1, 1.3, 1, 1}, zero(5, 0.0);
    ASSERT_THROW(fit_t1_leakage(t, bad, zero, zero), ConfigError);
    ASSERT_THROW(fit_t1_leakage(t, zero, zero, {0, 0}), ConfigError);
}

namespace {

FluxNoiseSpec strong_flux(double amplitude) {
    FluxNoiseSpec s;
    s.amplitude = amplitude;
    return s;
}

std::vector<double> grid_for(double scale) {
    return linspace(0, 12 * scale, 41);
}

}  // namespace

TEST(noise, coherence_flat_without_noise) {
    auto spec = cqb_a();
    const auto &cal = calibrated_a().gates;
    auto tau = linspace(0, 5e-6, 11);
    for (auto p : {CoherenceProtocol::Ramsey, CoherenceProtocol::Echo}) {
        auto r = simulate_coherence(spec, cal, strong_flux(0), p, tau, 100, 1);
        for (size_t k = 0; k < tau.size(); k++) {
            ASSERT_NEAR(r.coherence[k], r.coherence[0], 1e-6);
            ASSERT_NEAR(r.p0[k], r.p0[0], 1e-6);
        }
        ASSERT_LT(r.p0[0], 1e-3);
        ASSERT_GT(r.t2, 1);
    }
}

TEST(noise, coherence_rejects_few_trajectories) {
    auto spec = cqb_a();
    ASSERT_THROW(simulate_coherence(spec, calibrated_a().gates, strong_flux(1e-5), CoherenceProtocol::Ramsey,
                                    {0, 1e-6, 2e-6}, 99, 1),
                 ConfigError);
}

TEST(noise, ramsey_matches_chi_square_oracle) {
    auto spec = cqb_a();
    auto noise = strong_flux(2e-4);
    noise.drift = false;
    double scale = flux_dephasing_scale(spec, noise);
    auto tau = grid_for(scale);
    auto r = simulate_coherence(spec, calibrated_a().gates, noise, CoherenceProtocol::Ramsey, tau, 20000, 8);
    // phase = 2 pi c s^2 tau with s ~ N(0, v): |<e^i phase>| = |1 - 4 pi i c v tau|^(-1/2).
    for (size_t k = 0; k < r.tau.size(); k += 8) {
        double x = 2 * r.tau[k] / scale;
        ASSERT_NEAR(r.coherence[k], std::pow(1 + x * x, -0.25), 0.02) << k;
    }
}

TEST(noise, echo_outlives_ramsey_every_seed) {
    auto spec = cqb_a();
    auto noise = strong_flux(2e-4);
    auto tau = grid_for(flux_dephasing_scale(spec, noise));
    for (uint64_t seed = 1; seed <= 5; seed++) {
        auto ram = simulate_coherence(spec, calibrated_a().gates, noise, CoherenceProtocol::Ramsey, tau, 200, seed);
        auto echo = simulate_coherence(spec, calibrated_a().gates, noise, CoherenceProtocol::Echo, tau, 200, seed);
        ASSERT_GT(echo.t2, ram.t2) << seed;
    }
}

TEST(noise, doubling_amplitude_quarters_dephasing_time) {
    auto spec = cqb_a();
    auto noise = strong_flux(1e-4);
    noise.drift = false;
    auto doubled = noise;
    doubled.amplitude *= 2;
    double scale = flux_dephasing_scale(spec, noise);
    auto one = simulate_coherence(spec, calibrated_a().gates, noise, CoherenceProtocol::Ramsey, grid_for(scale), 2000,
                                  3);
    auto two = simulate_coherence(spec, calibrated_a().gates, doubled, CoherenceProtocol::Ramsey,
                                  grid_for(scale / 4), 2000, 3);
    ASSERT_NEAR(one.t2 / two.t2, 4, 0.1);
}

TEST(noise, coherence_independent_of_worker_count) {
    auto spec = cqb_a();
    auto noise = strong_flux(2e-4);
    auto tau = grid_for(flux_dephasing_scale(spec, noise));
    auto a = simulate_coherence(spec, calibrated_a().gates, noise, CoherenceProtocol::Echo, tau, 150, 4, 1);
    auto b = simulate_coherence(spec, calibrated_a().gates, noise, CoherenceProtocol::Echo, tau, 150, 4, 3);
    ASSERT_EQ(a.coherence, b.coherence);
    ASSERT_EQ(a.p0, b.p0);
    ASSERT_EQ(a.t2, b.t2);
}
