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

// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "cqbsim/benchmarking.h"
#include "cqbsim/calibration.h"
#include "cqbsim/device.h"
#include "cqbsim/experiments.h"
#include "cqbsim/gates.h"
#include "cqbsim/noise.h"
#include "cqbsim/propagator.h"
#include "cqbsim/protocols.h"
#include "cqbsim/rng.h"
#include "cqbsim/two_cqb.h"

using namespace cqbsim;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string &name) {
    return std::string(CQBSIM_DATA_DIR) + "/" + name;
}

std::string scratch(const std::string &name) {
    auto p = fs::temp_directory_path() / ("cqbsim_acceptance_" + name);
    fs::remove_all(p);
    return p.string();
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string num(double x, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

// Inverse-variance pooled estimate and its error.
std::pair<double, double> pooled(const std::vector<double> &x, const std::vector<double> &err) {
    double w = 0, s = 0;
    for (size_t i = 0; i < x.size(); i++) {
        double wi = 1 / std::max(err[i] * err[i], 1e-30);
        w += wi;
        s += wi * x[i];
    }
    return {s / w, 1 / std::sqrt(w)};
}

Verdict interference_map() {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig c;
    c.experiment = "scan2d";
    c.spec_path = data("cqb-a.json");
    c.out_dir = scratch("scan2d");
    auto m = run_experiment(c);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double f = m.summary["contour_at"]["f_p_hz"].get<double>();
    double eps = m.summary["contour_at"]["eps_p_hz"].get<double>();
    bool ok = std::abs(f / 125e6 - 1) <= 0.25 && std::abs(eps / 80e6 - 1) <= 0.25 && secs < 60;
    return {ok, "half contour at (" + num(f / 1e6, 5) + " MHz, " + num(eps / 1e6, 5) + " MHz), 101x101 in " +
                    num(secs, 3) + " s"};
}

Verdict calibration_fixed_point(const CQBSpec &spec, const CalibrationReport &r) {
    double infidelity = 1 - trace_fidelity(window_unitary(spec, r.gates), rot_x(kPi / 2));
    std::vector<SequenceItem> seq(4, SequenceItem::of_gate(GatePrimitive::x(1)));
    auto cs = compile_sequence(seq, r.gates);
    double p0 = evolve_coherent(spec, CQBState::basis(0), cs.waveform).population(0);
    return {infidelity < 1e-4 && p0 > 0.9999,
            "X(pi/2) infidelity " + num(infidelity, 3) + ", P0 after four X(pi/2) " + num(p0, 10)};
}

Verdict z_timing(const CalibrationReport &r) {
    double rel = std::abs(r.ramsey.delta / 65.4e6 - 1);
    double snap = std::abs(r.gates.t_xy - 3.823e-9);
    return {rel < 1e-4 && snap <= r.gates.sample_period,
            "Ramsey Delta " + num(r.ramsey.delta, 9) + " Hz (rel err " + num(rel, 3) + "), t_xy " +
                num(r.gates.t_xy * 1e9, 6) + " ns"};
}

Mat2 primitive_matrix(const GatePrimitive &g) {
    // exp(-i theta n.sigma / 2), built directly.
    auto rot = [](double theta, const Mat2 &sigma) {
        return Mat2(std::cos(theta / 2) * Mat2::Identity() - cdouble(0, 1) * std::sin(theta / 2) * sigma);
    };
    Mat2 sx, sy, sz;
    sx << 0, 1, 1, 0;
    sy << 0, cdouble(0, -1), cdouble(0, 1), 0;
    sz << 1, 0, 0, -1;
    switch (g.kind) {
        case GateKind::XPlus: return rot(kPi / 2, sx);
        case GateKind::XMinus: return rot(-kPi / 2, sx);
        case GateKind::YPlus: return rot(kPi / 2, sy);
        case GateKind::YMinus: return rot(-kPi / 2, sy);
        case GateKind::Z: return rot(g.angle, sz);
        default: return Mat2::Identity();
    }
}

bool same_up_to_phase(const Mat2 &a, const Mat2 &b) {
    return std::abs(std::abs((a.adjoint() * b).trace()) / 2 - 1) < 1e-9;
}

Verdict clifford_algebra() {
    std::vector<Mat2> c(kNumCliffords + 1);
    for (int id = 1; id <= kNumCliffords; id++) {
        c[id] = Mat2::Identity();
        for (const auto &g : clifford_to_primitives(id)) {
            c[id] = primitive_matrix(g) * c[id];
        }
    }
    int distinct_failures = 0;
    for (int a = 1; a <= kNumCliffords; a++) {
        for (int b = a + 1; b <= kNumCliffords; b++) {
            distinct_failures += same_up_to_phase(c[a], c[b]) ? 1 : 0;
        }
    }
    int products = 0, closed = 0;
    for (int a = 1; a <= kNumCliffords; a++) {
        for (int b = 1; b <= kNumCliffords; b++) {
            Mat2 ab = c[b] * c[a];
            int matches = 0, match = 0;
            for (int k = 1; k <= kNumCliffords; k++) {
                if (same_up_to_phase(ab, c[k])) {
                    matches++;
                    match = k;
                }
            }
            products++;
            closed += (matches == 1 && clifford_compose(a, b) == match) ? 1 : 0;
        }
    }
    Rng rng(2026);
    int exact = 0;
    for (int trial = 0; trial < 1000; trial++) {
        std::vector<int> seq(1 + rng.below(100));
        Mat2 u = Mat2::Identity();
        for (int &id : seq) {
            id = 1 + static_cast<int>(rng.below(24));
            u = c[id] * u;
        }
        u = c[recovery_clifford(seq)] * u;
        exact += same_up_to_phase(u, Mat2::Identity()) ? 1 : 0;
    }
    return {distinct_failures == 0 && closed == 576 && products == 576 && exact == 1000,
            std::to_string(closed) + "/576 products closed, " + std::to_string(exact) + "/1000 recoveries exact"};
}

Verdict rb_oracle(const CalibratedGateSet &gates) {
    bool ok = true;
    std::string detail;
    for (double p : {1e-3, 3e-3, 1e-2}) {
        for (double leak : {0.999, 0.995}) {
            std::vector<double> f, fe, l, le;
            for (uint64_t seed = 1; seed <= 10; seed++) {
                RBConfig cfg;
                cfg.lengths = {1, 2, 4, 8, 16, 32, 64, 128};
                cfg.sequences_per_length = 30;
                cfg.shots = 1000;
                cfg.seed = seed;
                auto out = run_rb(cfg, depolarizing_executor({p, leak}));
                f.push_back(out.fit.fidelity);
                fe.push_back(out.fit.fidelity_error);
                l.push_back(out.fit.fidelity_leak);
                le.push_back(out.fit.fidelity_leak_error);
            }
            auto [fm, fs] = pooled(f, fe);
            auto [lm, ls] = pooled(l, le);
            double zf = (fm - (1 - p / 2)) / fs, zl = (lm - leak) / ls;
            ok = ok && std::abs(zf) < 2 && std::abs(zl) < 2;
            detail += " p=" + num(p, 2) + "/leak=" + num(leak, 4) + ": zF=" + num(zf, 2) + " zL=" + num(zl, 2) + ";";
        }
    }
    // Bundled noisy-model demo against the hardware plausibility band.
    ExperimentConfig c;
    c.experiment = "rb";
    c.spec_path = data("cqb-a.json");
    c.seed = 1;
    c.out_dir = scratch("rb_demo");
    write_text(c.out_dir + ".gates.json", dump_json(calibrated_gate_set_to_json(gates)));
    c.params = {{"gates_file", c.out_dir + ".gates.json"}};
    double demo = run_experiment(c).summary["fidelity"].get<double>();
    ok = ok && std::abs(demo - 0.9983) <= 0.002;
    return {ok, "pooled over 10 seeds:" + detail + " demo F = " + num(demo, 6)};
}

Verdict leakage_fit() {
    // Closed-form populations with Gamma_CQB = 0, plus Gaussian readout noise.
    const double record = 100e-6, sigma = 0.005;
    bool ok = true;
    std::string detail;
    for (int prep : {1, 0}) {
        double rate = prep == 1 ? 1 / 27e-6 : 1 / 41e-6;
        Rng rng(100 + static_cast<uint64_t>(prep));
        std::vector<double> t, a, b, gg;
        for (int k = 0; k <= 200; k++) {
            double x = record * k / 200;
            double keep = std::exp(-rate * x);
            t.push_back(x);
            a.push_back(keep + sigma * rng.normal());
            b.push_back(sigma * rng.normal());
            gg.push_back(1 - keep + sigma * rng.normal());
        }
        auto f = fit_t1_leakage(t, a, b, gg, sigma);
        double rel = std::abs(f.gamma_leak / rate - 1);
        ok = ok && rel < 0.03 && f.t1_lower_bound > record;
        detail += " |" + std::to_string(prep) + ">: T1_leak " + num(1e6 / f.gamma_leak, 4) + " us (rel err " +
                  num(rel, 2) + "), T1_CQB > " + num(f.t1_lower_bound * 1e3, 3) + " ms;";
    }
    return {ok, detail.substr(1)};
}

Verdict noise_formulas(const CQBSpec &a) {
    // CQB-A as quoted with the ratio: delta_omega 143 MHz, Delta 65 MHz, phi* 0.28.
    CQBSpec s = a;
    s.delta = 65e6;
    s.phi_star = 0.28;
    s.transmon_a.f_max = s.transmon_b.f_max = 3.822e9;
    s.transmon_a.f_min = s.transmon_b.f_min = 3.822e9 - 2 * 143e6;
    double ratio = flux_noise_ratio(s);
    bool ratio_ok = std::abs(ratio - 2.108) < 5e-4;
    // Second-order differences against the exact spectrum.
    auto f = [&](double df) { return cqb_frequency(a, epsilon_of_flux(a, df)); };
    auto k_at = [&](double h) { return (f(h) - 2 * f(0) + f(-h)) / (2 * h * h); };
    double h = 1e-4;
    double k_fd = (4 * k_at(h / 2) - k_at(h)) / 3;
    double flux_rel = std::abs(flux_noise_sensitivity(a, h, h) / (h * h) / k_fd - 1);
    double d = 1e5;
    double photon_fd = (cqb_frequency(a, d) - 2 * cqb_frequency(a, 0) + cqb_frequency(a, -d)) / 2;
    double photon_rel = std::abs(photon_noise_sensitivity(a, d, 0) / photon_fd - 1);
    return {ratio_ok && flux_rel < 1e-4 && photon_rel < 1e-4,
            "ratio " + num(ratio, 7) + " vs 2.108; finite-difference rel err flux " + num(flux_rel, 2) + ", photon " +
                num(photon_rel, 2)};
}

Verdict lz_vs_dynamics() {
    double rate = 400e6 / 50e-9, worst = 0;
    for (double target = 0.1; target <= 0.99 + 1e-9; target += 0.089) {
        double omega = std::sqrt(-std::log(1 - target) * rate) / (2 * kPi);
        double sim = simulate_lz_sweep(omega, rate);
        worst = std::max(worst, std::abs(sim / lz_excitation_probability(omega, rate) - 1));
    }
    return {worst < 0.01, "worst relative deviation " + num(worst, 3) + " over P in [0.1, 0.99]"};
}

Verdict coherence_ordering(const CQBSpec &spec, const CalibratedGateSet &gates) {
    FluxNoiseSpec noise;
    noise.amplitude = 5e-6;
    double scale = flux_dephasing_scale(spec, noise);
    std::vector<double> tau;
    for (int k = 0; k <= 40; k++) {
        tau.push_back(12 * scale * k / 40);
    }
    bool ordered = true, in_range = true;
    double lo = 1e300, hi = 0;
    for (uint64_t seed = 1; seed <= 5; seed++) {
        auto r = simulate_coherence(spec, gates, noise, CoherenceProtocol::Ramsey, tau, 400, seed);
        auto e = simulate_coherence(spec, gates, noise, CoherenceProtocol::Echo, tau, 400, seed);
        ordered = ordered && e.t2 > r.t2;
        in_range = in_range && r.t2 >= 3e-6 && r.t2 <= 24e-6;
        lo = std::min(lo, r.t2);
        hi = std::max(hi, r.t2);
    }
    return {ordered && in_range, std::string("T2E > T2R for every seed: ") + (ordered ? "yes" : "no") +
                                     "; T2R in [" + num(lo, 3) + ", " + num(hi, 3) + "] s vs [3, 24] us"};
}

Verdict cz_phase() {
    auto spec = load_two_cqb_spec(data("two-cqb.json"));
    auto cal = calibrate_cz(spec);
    auto rs = cz_with_resync(spec, cal);
    Mat4 u = propagate_two_cqb(spec, rs.eps_a.samples(), rs.eps_b.samples(), rs.schedule, rs.schedule.sample_period);
    Mat4 expect = kron(rot_z(rs.ledger.phase[0]), rot_z(rs.ledger.phase[1])) * cz_unitary();
    double infidelity = 1 - trace_fidelity(u, expect);
    TwoQubitChannel ch{0.01, 0.999, 0.02, 0.998};
    std::vector<double> f, fe;
    for (uint64_t seed = 1; seed <= 10; seed++) {
        RBConfig ref;
        ref.lengths = {1, 2, 4, 8, 16, 32};
        ref.sequences_per_length = 20;
        ref.mode = RBMode::Interleaved;
        ref.shots = 1000;
        ref.seed = seed;
        RBConfig il = ref;
        il.interleave_cz = true;
        il.seed = splitmix64(seed ^ 0xC2);
        auto exec = two_qubit_channel_executor(ch);
        auto fit = fit_interleaved_cz(run_two_qubit_rb(ref, exec), run_two_qubit_rb(il, exec));
        f.push_back(fit.fidelity);
        fe.push_back(fit.fidelity_error);
    }
    auto [fm, fs] = pooled(f, fe);
    double z = (fm - (1 - 0.75 * ch.p_cz)) / fs;
    bool ok = std::abs(cal.phi_zz - kPi) < 1e-3 && infidelity < 1e-2 && std::abs(z) < 2 &&
              std::abs(cal.duration() - 290e-9) < 1e-12;
    return {ok, "duration " + num(cal.duration() * 1e9, 5) + " ns, phi_zz - pi = " + num(cal.phi_zz - kPi, 2) +
                    ", resync infidelity " + num(infidelity, 2) + ", interleaved F_CZ " + num(fm, 6) + " (z=" +
                    num(z, 2) + ")"};
}

Verdict determinism() {
    std::vector<ExperimentConfig> configs;
    ExperimentConfig scan;
    scan.experiment = "scan2d";
    scan.spec_path = data("cqb-a.json");
    scan.params = {{"eps_points", 41}, {"freq_points", 41}};
    configs.push_back(scan);
    ExperimentConfig rb;
    rb.experiment = "rb";
    rb.spec_path = data("cqb-a.json");
    rb.seed = 9;
    rb.shots = 500;
    configs.push_back(rb);
    ExperimentConfig coh;
    coh.experiment = "coherence";
    coh.spec_path = data("cqb-a.json");
    coh.seed = 9;
    coh.params = {{"trajectories", 100}, {"amplitude", 1e-4}};
    configs.push_back(coh);
    int compared = 0, identical = 0;
    for (auto &c : configs) {
        std::vector<std::string> dirs;
        for (int run = 0; run < 3; run++) {
            c.workers = run == 2 ? 4 : 1;
            c.out_dir = scratch(c.experiment + std::to_string(run));
            run_experiment(c);
            dirs.push_back(c.out_dir);
        }
        for (const auto &entry : fs::directory_iterator(dirs[0])) {
            std::string name = entry.path().filename().string();
            if (name == "manifest.json") {
                continue;  // carries the wall clock
            }
            for (size_t k = 1; k < dirs.size(); k++) {
                compared++;
                identical += read_text(dirs[0] + "/" + name) == read_text(dirs[k] + "/" + name) ? 1 : 0;
            }
        }
    }
    return {compared > 0 && identical == compared,
            std::to_string(identical) + "/" + std::to_string(compared) +
                " files byte-identical across reruns and 1 vs 4 workers (scan2d, rb, coherence)"};
}

}  // namespace

int main() {
    auto spec = load_cqb_spec(data("cqb-a.json"));
    const auto report = calibrate_gate_set(spec);
    std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"interference map", interference_map},
        {"calibration fixed point", [&] { return calibration_fixed_point(spec, report); }},
        {"Z-timing arithmetic", [&] { return z_timing(report); }},
        {"Clifford algebra", clifford_algebra},
        {"RB estimator oracle", [&] { return rb_oracle(report.gates); }},
        {"leakage-fit bound", leakage_fit},
        {"noise-sensitivity formulas", [&] { return noise_formulas(spec); }},
        {"LZ formula vs dynamics", lz_vs_dynamics},
        {"coherence ordering", [&] { return coherence_ordering(spec, report.gates); }},
        {"CZ conditional phase", cz_phase},
        {"determinism", determinism},
    };
    int failed = 0;
    for (size_t k = 0; k < criteria.size(); k++) {
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception &e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<size_t>(failed), criteria.size());
    return failed;
}
