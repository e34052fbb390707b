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

#ifndef CQBSIM_CALIBRATION_H
#define CQBSIM_CALIBRATION_H

#include <cstdint>
#include <string>
#include <vector>

#include "cqbsim/device.h"
#include "cqbsim/gates.h"
#include "cqbsim/io.h"

namespace cqbsim {

struct ScanResult {
    std::string parameter;
    std::vector<double> values;
    std::vector<double> probability;
    std::vector<double> frequency;  ///< optional spectrum axis [cycles per sample]
    std::vector<double> spectrum;
    double optimum = 0;
};

struct CalibrationOptions {
    double f_p = 125e6;
    double sample_period = kDefaultSamplePeriod;
    int amplitude_points = 201;
    int tc_points = 101;
    int fine_points = 81;
    double fine_span = 0.02;  ///< relative half-width of the fine scans
    int fine_gates = 21;
    int ramsey_m = 1;
    int ramsey_max_n = 64;
    int coarse_ramsey_points = 128;
    double half_tolerance = 0.005;
    int workers = 1;
    int shots = 0;  ///< 0 = noiseless expectation values
    uint64_t seed = 0;
};

/// Simulated measurement: exact probability, or a binomial estimate over `shots`.
double measure(double p, const CalibrationOptions &opt, uint64_t stream);

/// Linear grid of n points over [lo, hi].
std::vector<double> linear_grid(double lo, double hi, int n);

/// Smallest grid crossing of P(|1>) = 0.5 after one isolated pulse.
ScanResult scan_amplitude_for_half_excitation(const CQBSpec &spec, double f_p, const std::vector<double> &grid,
                                              const CalibrationOptions &opt = {});
/// Excited population after one isolated single-period pulse.
double single_pulse_excitation(const CQBSpec &spec, double eps_p, double f_p, double dt = kDefaultSamplePeriod);

/// Gap estimate from a free-evolution Ramsey between two isolated pulses, by
/// detrending, a zero-padded DFT and 3-bin parabolic refinement.
ScanResult coarse_delta_fourier(const CQBSpec &spec, double eps_p, double delta_guess,
                                const CalibrationOptions &opt = {});
/// Dominant nonzero frequency [cycles per sample] of a uniformly sampled trace.
double dominant_frequency(const std::vector<double> &y, std::vector<double> *freq = nullptr,
                          std::vector<double> *power = nullptr);

/// Return probability of X(pi/2) X(-pi/2) over t_c; optimum by 3-point quadratic peak.
ScanResult scan_correction_time(const CQBSpec &spec, double eps_p, double delta, const std::vector<double> &grid,
                                const CalibrationOptions &opt = {});

enum class FineParameter { EpsP, TD };

struct FineScan {
    ScanResult scan;
    double value = 0;
    double sensitivity = 0;  ///< d(observable)/d(parameter) at the optimum
};

/// Chained fine scan. EpsP: crossing of P(|1>) = 0.5 after n_gates X(pi/2) windows
/// (n_gates = 1 mod 4). TD: peak of P(|0>) after n_gates X(pi/2) X(-pi/2) pairs.
FineScan fine_scan_chained(const CQBSpec &spec, const CalibratedGateSet &calib, int n_gates, FineParameter param,
                           const CalibrationOptions &opt = {});

struct RamseyResult {
    double delta = 0;
    double delta_error = 0;
    double frequency = 0;  ///< unfolded cycles per step
    ScanResult trace;
};

/// X(pi/2) - [Z(pi/2)]^(N m) - X(pi/2) for N = 0..max_n, with Z(pi/2) an idle of
/// t_delta/4 from the current calibration. m must be odd.
RamseyResult measure_delta_ramsey(const CQBSpec &spec, const CalibratedGateSet &calib, int m, int max_n,
                                  const CalibrationOptions &opt = {});

/// Axis angle of the window's rotation and the frame-corrected infidelity vs X(pi/2).
void finalize_frame(const CQBSpec &spec, CalibratedGateSet &calib);

/// Noiseless logical-frame unitary of one calibrated window.
Mat2 window_unitary(const CQBSpec &spec, const CalibratedGateSet &calib, Axis axis = Axis::X, int sign = 1);

struct CalibrationReport {
    CalibratedGateSet gates;
    CalibratedGateSet coarse;
    ScanResult amplitude;
    ScanResult coarse_delta;
    ScanResult correction;
    RamseyResult ramsey;
    FineScan fine_eps;
    FineScan fine_td;
    double coarse_infidelity = 0;
};

/// Full tune-up: amplitude, coarse gap, t_c, Ramsey gap, chained fine scans, frame.
CalibrationReport calibrate_gate_set(const CQBSpec &spec, const CalibrationOptions &opt = {});
/// Ramsey and fine scans from an existing calibration.
CalibrationReport refine_gate_set(const CQBSpec &spec, const CalibratedGateSet &start,
                                  const CalibrationOptions &opt = {});

Json calibration_report_to_json(const CalibrationReport &r, const CQBSpec &spec, const CalibrationOptions &opt);
/// Writes report.json plus one CSV per scan into `dir`; returns the file names written.
std::vector<std::string> write_calibration_report(const std::string &dir, const CalibrationReport &r,
                                                  const CQBSpec &spec, const CalibrationOptions &opt);

}  // namespace cqbsim

#endif
