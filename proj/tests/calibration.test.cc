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

#include <cmath>
#include <filesystem>

#include "gtest/gtest.h"

#include "cqbsim/errors.h"
#include "cqbsim/propagator.h"
#include "cqbsim/rng.h"
#include "test_util.h"

using namespace cqbsim;
using cqbsim_test::calibrated_a;
using cqbsim_test::cqb_a;

namespace {

// Independent chain builder: n X(pi/2) windows laid back to back in continuous time.
std::vector<double> chain(const CalibratedGateSet &c, int n, double dt) {
    double onset0 = c.t_d / 2 + c.t_xy / 2 - 1 / (2 * c.f_p);
    size_t len = static_cast<size_t>(std::ceil(n * c.t_d / dt));
    std::vector<double> s(len, 0.0);
    for (int k = 0; k < n; k++) {
        add_sinusoid(s, dt, k * c.t_d + onset0, c.eps_p, c.f_p, +1);
    }
    return s;
}

double chain_p1(const CQBSpec &spec, const CalibratedGateSet &c, int n) {
    Vec2 psi = propagate_ket(spec.delta, Vec2(1, 0), chain(c, n, c.sample_period), c.sample_period);
    return std::norm(psi[1]);
}

}  // namespace

TEST(calibration, amplitude_scan) {
    auto spec = cqb_a();
    auto grid = linear_grid(0, 2 * spec.delta, 201);
    ASSERT_EQ(grid.size(), 201u);
    auto r = scan_amplitude_for_half_excitation(spec, 125e6, grid);
    ASSERT_EQ(r.probability[0], 0);
    ASSERT_GT(r.optimum, 80e6 * 0.75);
    ASSERT_LT(r.optimum, 80e6 * 1.25);
    ASSERT_NEAR(single_pulse_excitation(spec, r.optimum, 125e6), 0.5, 0.005);
    ASSERT_NEAR(single_pulse_excitation(spec, r.optimum, 125e6, 0.5e-10), 0.5, 0.002);
    ASSERT_THROW(scan_amplitude_for_half_excitation(spec, 125e6, linear_grid(0, 10e6, 11)), ConvergenceError);
}

TEST(calibration, dominant_frequency) {
    std::vector<double> y(200);
    for (size_t k = 0; k < y.size(); k++) {
        y[k] = 0.3 + 0.01 * k + 0.4 * std::cos(2 * kPi * 0.1234 * k + 0.7);
    }
    ASSERT_NEAR(dominant_frequency(y), 0.1234, 1e-3);
}

TEST(calibration, coarse_delta) {
    auto spec = cqb_a();
    auto amp = scan_amplitude_for_half_excitation(spec, 125e6, linear_grid(0, 2 * spec.delta, 201));
    // A 5% wrong prior still lands near the true gap.
    auto r = coarse_delta_fourier(spec, amp.optimum, 1.05 * spec.delta);
    ASSERT_NEAR(r.optimum / spec.delta, 1.0, 2e-3);
}

TEST(calibration, correction_time_scan) {
    auto spec = cqb_a();
    const auto &rep = calibrated_a();
    double t_delta = 1 / spec.delta;
    ASSERT_EQ(rep.correction.values.size(), 101u);
    ASSERT_NEAR(rep.correction.values.back() - rep.correction.values.front(), 1 / rep.coarse.delta, 1e-15);
    double eps = rep.coarse.eps_p;
    double tc = rep.correction.optimum;
    auto at = [&](double t) { return scan_correction_time(spec, eps, spec.delta, {t}).probability[0]; };
    ASSERT_GE(at(tc), 0.9999);
    // Half a precession period away the pair no longer cancels.
    double worst = *std::min_element(rep.correction.probability.begin(), rep.correction.probability.end());
    ASSERT_LT(at(tc + t_delta / 2), worst + 0.02);
    ASSERT_LT(at(tc + t_delta / 2), 0.5);
    // Z(2 pi) periodicity.
    for (double t : {0.0, 1.3e-9, 4e-9}) {
        ASSERT_NEAR(at(t), at(t + t_delta), 1e-6);
    }
    ASSERT_THROW(scan_correction_time(spec, 0, spec.delta, linear_grid(0, t_delta, 11)), ConvergenceError);
}

TEST(calibration, chained_scan_amplifies_amplitude_error) {
    auto spec = cqb_a();
    CalibratedGateSet c = calibrated_a().gates;
    double base1 = chain_p1(spec, c, 1), base21 = chain_p1(spec, c, 21);
    c.eps_p *= 1.01;
    double d1 = std::abs(chain_p1(spec, c, 1) - base1);
    double d21 = std::abs(chain_p1(spec, c, 21) - base21);
    ASSERT_GT(d21, 10 * d1);
}

TEST(calibration, fine_scan_single_gate_reduces_to_coarse) {
    auto spec = cqb_a();
    const auto &rep = calibrated_a();
    auto f = fine_scan_chained(spec, rep.coarse, 1, FineParameter::EpsP);
    // With one gate the crossing is the single-window half excitation.
    CalibratedGateSet c = rep.coarse;
    c.eps_p = f.value;
    ASSERT_NEAR(chain_p1(spec, c, 1), 0.5, 1e-3);
    ASSERT_THROW(fine_scan_chained(spec, rep.coarse, 3, FineParameter::EpsP), ConfigError);
}

TEST(calibration, pipeline_fixed_point) {
    auto spec = cqb_a();
    const auto &rep = calibrated_a();
    const auto &g = rep.gates;
    ASSERT_TRUE(g.calibrated);
    ASSERT_NEAR(g.t_xy, 3.823e-9, 0.05e-9);
    ASSERT_NEAR(g.t_d - g.t_c, 1 / g.delta, 1e-18);
    ASSERT_NEAR(g.t_xy, 1 / (4 * g.delta), 1e-18);
    // Oracle: the independent chain builder and the frame from the report.
    Mat2 u = propagate_samples(spec.delta, chain(g, 1, g.sample_period), g.sample_period);
    double tail = std::ceil(g.t_d / g.sample_period) * g.sample_period - g.t_d;
    u = rot_z(-kTwoPi * spec.delta * tail) * u;
    Mat2 logical = rot_z(-g.axis_phase) * u * rot_z(g.axis_phase);
    double infid = 1 - trace_fidelity(logical, rot_x(kPi / 2));
    ASSERT_LT(infid, 1e-4);
    ASSERT_NEAR(infid, g.residual_infidelity, 1e-9);
    ASSERT_GT(1 - chain_p1(spec, g, 4), 0.9999);
    ASSERT_LE(g.residual_infidelity, rep.coarse_infidelity);
}

TEST(calibration, pipeline_idempotent) {
    auto spec = cqb_a();
    const auto &g = calibrated_a().gates;
    auto again = refine_gate_set(spec, g).gates;
    ASSERT_NEAR(again.eps_p / g.eps_p, 1, 1e-3);
    ASSERT_NEAR(again.t_d / g.t_d, 1, 1e-3);
    ASSERT_NEAR(again.t_c / g.t_c, 1, 1e-3);
    ASSERT_NEAR(again.delta / g.delta, 1, 1e-3);
}

TEST(calibration, step_halving_on_calibrated_windows) {
    auto spec = cqb_a();
    const auto &g = calibrated_a().gates;
    CalibrationOptions fine;
    fine.sample_period = g.sample_period / 2;
    auto h = calibrate_gate_set(spec, fine).gates;
    ASSERT_LT(std::abs(g.residual_infidelity - h.residual_infidelity), 1e-8);
    // Fixed parameters re-rendered on finer grids converge at fourth order in fidelity.
    for (int n : {1, 2, 4}) {
        Mat2 ideal = Mat2::Identity();
        for (int k = 0; k < n; k++) {
            ideal = rot_x(kPi / 2) * ideal;
        }
        Vec2 target = rot_z(g.axis_phase) * ideal * Vec2(1, 0);
        auto state = [&](double dt) {
            auto s = chain(g, n, dt);
            Vec2 psi = propagate_ket(spec.delta, Vec2(1, 0), s, dt);
            return Vec2(rot_z(-kTwoPi * spec.delta * (s.size() * dt - n * g.t_d)) * psi);
        };
        double dt = g.sample_period;
        Vec2 a = state(dt), b = state(dt / 2), c = state(dt / 4);
        ASSERT_GT(std::norm(target.dot(a)), 1 - 1e-4);
        double e1 = 1 - std::norm(a.dot(c)), e2 = 1 - std::norm(b.dot(c));
        ASSERT_LT(std::abs(std::norm(target.dot(a)) - std::norm(target.dot(b))), 1e-7) << n;
        ASSERT_GT(e1 / e2, 8) << n;
    }
}

TEST(calibration, ramsey_recovers_delta) {
    auto spec = cqb_a();
    const auto &g = calibrated_a().gates;
    ASSERT_NEAR(g.delta, 65.4e6, 0.01e6);
    ASSERT_LT(std::abs(g.delta / spec.delta - 1), 1e-4);
    auto r3 = measure_delta_ramsey(spec, g, 3, 64);
    ASSERT_LT(std::abs(r3.delta / spec.delta - 1), 1e-4);
    ASSERT_NEAR(r3.frequency, 0.75 * spec.delta / g.delta, 1e-4);
    ASSERT_THROW(measure_delta_ramsey(spec, g, 2, 64), ConfigError);
    // N = 0 is two back-to-back X(pi/2): an X(pi).
    auto r1 = measure_delta_ramsey(spec, g, 1, 8);
    ASSERT_LT(r1.trace.probability[0], 1e-3);
}

TEST(calibration, ramsey_unbiased_over_random_gaps) {
    Rng rng(2024);
    for (int k = 0; k < 20; k++) {
        double delta = 40e6 + 80e6 * rng.uniform();
        auto spec = cqbsim_test::symmetric_spec(delta);
        CalibrationOptions opt;
        // Near 40 MHz one period cannot reach P = 0.5; any fringe contrast will do.
        double eps = 0, gap = 1;
        for (double e : linear_grid(10e6, 300e6, 59)) {
            double d = std::abs(single_pulse_excitation(spec, e, opt.f_p) - 0.5);
            if (d < gap) {
                gap = d;
                eps = e;
            }
        }
        auto coarse = coarse_delta_fourier(spec, eps, delta * (1 + 0.02 * (rng.uniform() - 0.5)), opt);
        CalibratedGateSet c;
        c.eps_p = eps;
        c.delta = coarse.optimum;
        c.t_xy = 1 / (4 * c.delta);
        c.t_c = 1 / c.delta;  // a full extra period always fits the pulse
        c.t_d = 2 / c.delta;
        c.calibrated = true;
        auto r = measure_delta_ramsey(spec, c, 1, 64, opt);
        ASSERT_LT(std::abs(r.delta / delta - 1), 1e-4) << delta;
    }
}

TEST(calibration, shot_sampling_is_seeded) {
    CalibrationOptions opt;
    opt.shots = 1000;
    opt.seed = 5;
    double a = measure(0.3, opt, 17), b = measure(0.3, opt, 17), c = measure(0.3, opt, 18);
    ASSERT_EQ(a, b);
    ASSERT_NE(a, c);
    ASSERT_NEAR(a, 0.3, 0.07);
    opt.shots = 0;
    ASSERT_EQ(measure(0.3, opt, 17), 0.3);
}

TEST(calibration, report_files) {
    auto spec = cqb_a();
    auto dir = (std::filesystem::temp_directory_path() / "cqbsim_cal_report").string();
    std::filesystem::remove_all(dir);
    auto files = write_calibration_report(dir, calibrated_a(), spec, {});
    ASSERT_GE(files.size(), 5u);
    for (const auto &f : files) {
        ASSERT_TRUE(std::filesystem::exists(dir + "/" + f)) << f;
    }
    Json j = read_json(dir + "/calibration.json");
    auto back = calibrated_gate_set_from_json(j.at("gate_set"));
    ASSERT_NEAR(back.t_xy, calibrated_a().gates.t_xy, 1e-20);
    ASSERT_TRUE(j.at("provenance").contains("spec_hash"));
}
