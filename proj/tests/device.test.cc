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

#include <cmath>

#include "gtest/gtest.h"

#include "cqbsim/errors.h"
#include "test_util.h"

using namespace cqbsim;
using cqbsim_test::cqb_a;
using cqbsim_test::symmetric_spec;

TEST(device, transmon_frequency_endpoints) {
    auto q1 = cqb_a().transmon_a;
    ASSERT_DOUBLE_EQ(transmon_frequency(q1, 0), 3.825e9);
    ASSERT_NEAR(transmon_frequency(q1, 0.5), 3.540e9, 1e-3);
    ASSERT_NEAR(transmon_frequency(q1, 0.28), 3655798162.671534, 1e-3);
}

TEST(device, transmon_frequency_periodic) {
    auto q1 = cqb_a().transmon_a;
    for (double phi : {-0.7, -0.1, 0.0, 0.13, 0.28, 0.49}) {
        ASSERT_NEAR(transmon_frequency(q1, phi), transmon_frequency(q1, phi + 1), 1e-4);
    }
}

TEST(device, epsilon_of_flux) {
    auto s = symmetric_spec(65e6);
    ASSERT_EQ(epsilon_of_flux(s, 0), 0);
    ASSERT_NEAR(epsilon_of_flux(s, 0.01), 17640001.464878727, 1e-4);
    for (double df : {1e-4, 3e-3, 0.02, 0.2}) {
        ASSERT_EQ(epsilon_of_flux(s, -df), -epsilon_of_flux(s, df));
    }
}

TEST(device, epsilon_linearization) {
    auto s = symmetric_spec(65e6);
    for (double df : {-0.005, -0.001, 1e-5, 0.002, 0.005}) {
        double exact = epsilon_of_flux(s, df);
        ASSERT_LT(std::abs(epsilon_of_flux_linear(s, df) - exact), 0.01 * std::abs(exact));
        ASSERT_TRUE(linear_epsilon_valid(s, df));
    }
    ASSERT_FALSE(linear_epsilon_valid(s, 0.1));
    ASSERT_NEAR(flux_of_epsilon(s, epsilon_of_flux(s, 0.0123)), 0.0123, 1e-14);
}

TEST(device, cqb_frequency) {
    auto s = cqb_a();
    ASSERT_DOUBLE_EQ(cqb_frequency(s, 0), 65.4e6);
    ASSERT_NEAR(cqb_frequency(s, 65.4e6), 65.4e6 * std::sqrt(2.0), 1e-6);
    ASSERT_NEAR(cqb_frequency(s, 80e6), 103330344.04278348, 1e-4);
}

TEST(device, cqb_frequency_curvature) {
    auto s = cqb_a();
    double h = 1e4;
    double first = (cqb_frequency(s, h) - cqb_frequency(s, -h)) / (2 * h);
    double second = (cqb_frequency(s, h) - 2 * cqb_frequency(s, 0) + cqb_frequency(s, -h)) / (h * h);
    ASSERT_EQ(first, 0);
    ASSERT_NEAR(second * s.delta, 1.0, 1e-6);
}

TEST(device, flux_noise_sensitivity_is_taylor_term) {
    auto s = cqb_a();
    ASSERT_EQ(flux_noise_sensitivity(s, 0, 0), 0);
    ASSERT_EQ(flux_noise_sensitivity(s, 3e-4, -3e-4), 0);
    // Common excursion df of both transmons is the epsilon_of_flux argument, so the
    // Taylor coefficient K of f(df) = Delta + K df^2 equals 4x the formula prefactor.
    auto f = [&](double df) { return cqb_frequency(s, epsilon_of_flux(s, df)); };
    auto k_at = [&](double h) { return (f(h) - 2 * f(0) + f(-h)) / (2 * h * h); };
    for (double h : {1e-5, 1e-4, 1e-3}) {
        // Richardson step removes the O(h^2) truncation of the central difference.
        double k_fd = (4 * k_at(h / 2) - k_at(h)) / 3;
        double k_formula = flux_noise_sensitivity(s, h, h) / (h * h);
        ASSERT_NEAR(k_formula / k_fd, 1.0, 1e-4) << h;
    }
}

TEST(device, flux_noise_ratio_arithmetic) {
    // delta_omega = 143 MHz, Delta = 65 MHz, phi* = 0.28.
    auto s = symmetric_spec(65e6);
    ASSERT_NEAR(s.mean_delta_omega(), 143e6, 1e-3);
    ASSERT_NEAR(flux_noise_ratio(s), 2.122754134477076, 1e-12);
}

TEST(device, photon_noise_sensitivity) {
    auto s = cqb_a();
    ASSERT_EQ(photon_noise_sensitivity(s, 1e5, 1e5), 0);
    ASSERT_NEAR(photon_noise_sensitivity(s, 65.4e6 / 10, 0), 65.4e6 / 200, 1e-6);
    // Differential shifts enter as epsilon.
    for (double d : {1e3, 1e5, 1e6}) {
        double exact = cqb_frequency(s, d) - s.delta;
        ASSERT_NEAR(photon_noise_sensitivity(s, d, 0) / exact, 1.0, 1e-4);
    }
}

TEST(device, loader_reports_field) {
    Json j = Json::parse(R"({"transmon_a": {"f_max_hz": 3.8e9, "f_min_hz": 3.9e9, "e_c_hz": 2e8},
                           "transmon_b": {"f_max_hz": 3.8e9, "f_min_hz": 3.5e9, "e_c_hz": 2e8},
                           "delta_hz": 6e7, "phi_star": 0.28})");
    try {
        cqb_spec_from_json(j);
        FAIL();
    } catch (const ConfigError &e) {
        ASSERT_EQ(e.field(), "transmon_a.f_max_hz");
    }
    j["transmon_a"]["f_min_hz"] = 3.5e9;
    j.erase("delta_hz");
    try {
        cqb_spec_from_json(j);
        FAIL();
    } catch (const ConfigError &e) {
        ASSERT_EQ(e.field(), "delta_hz");
    }
    j["delta_hz"] = 6e7;
    j["phi_star"] = 0.6;
    ASSERT_THROW(cqb_spec_from_json(j), ConfigError);
}

TEST(device, bundled_specs_round_trip) {
    auto a = cqb_a();
    ASSERT_EQ(a.name, "CQB-A");
    ASSERT_DOUBLE_EQ(a.delta, 65.4e6);
    ASSERT_NEAR(a.asymmetry(), 3e6 / 65.4e6, 1e-12);
    auto again = cqb_spec_from_json(cqb_spec_to_json(a));
    ASSERT_EQ(again.transmon_b.f_min, a.transmon_b.f_min);
    ASSERT_EQ(again.annotations, a.annotations);
    auto b = cqbsim_test::cqb_b();
    ASSERT_DOUBLE_EQ(b.delta, 70.2e6);
}

TEST(device, zz_profile_from_coupling) {
    double g23 = g23_from_interaction_time(250e-9);
    ASSERT_NEAR(g23, 16e6, 1e-6);
    auto p = zz_profile_from_coupling(g23, 1e9);
    p.validate();
    ASSERT_NEAR(p.at(0), 2e6, 1e-6);
    ASSERT_NEAR(p.at(0) * 250e-9, 0.5, 1e-12);
    ASSERT_EQ(p.at(3e6), p.at(-3e6));
    double w = 4e6, d = 7.5e6;
    ASSERT_NEAR(p.at(d), (std::sqrt(d * d + w * w) - d) / 2, 2e2);
    ASSERT_THROW(p.at(2e9), ConfigError);
}

TEST(device, two_cqb_loader) {
    auto t = load_two_cqb_spec(cqbsim_test::data_path("two-cqb.json"));
    ASSERT_NEAR(t.g23, 16e6, 1e-6);
    ASSERT_EQ(t.cqb_b.name, "CQB-B");
    ASSERT_NEAR(t.zz_profile.at(t.idle_detuning), 16.46e3, 0.05e3);
    ASSERT_DOUBLE_EQ(t.ramp_duration, 20e-9);
}
