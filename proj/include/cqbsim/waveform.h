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

#ifndef CQBSIM_WAVEFORM_H
#define CQBSIM_WAVEFORM_H

#include <cstddef>
#include <string>
#include <vector>

#include "cqbsim/device.h"

namespace cqbsim {

constexpr double kDefaultSamplePeriod = 1e-10;

/// Labelled sample range [start, end).
struct Annotation {
    std::string label;
    size_t start = 0;
    size_t end = 0;

    bool operator==(const Annotation &other) const = default;
};

/// Uniformly sampled epsilon(t) trace [Hz]. Sample k covers
/// [start_time + k dt, start_time + (k + 1) dt) and holds the mean of epsilon over it.
class Waveform {
   public:
    Waveform() = default;
    Waveform(std::vector<double> samples, double sample_period, double start_time = 0,
             std::vector<Annotation> annotations = {});

    const std::vector<double> &samples() const {
        return samples_;
    }
    double sample_period() const {
        return dt_;
    }
    double start_time() const {
        return start_time_;
    }
    size_t size() const {
        return samples_.size();
    }
    bool empty() const {
        return samples_.empty();
    }
    double duration() const {
        return static_cast<double>(samples_.size()) * dt_;
    }
    /// Sample mean, computed at construction.
    double mean() const {
        return mean_;
    }
    double max_abs() const;
    const std::vector<Annotation> &annotations() const {
        return annotations_;
    }
    /// Copy with one annotation spanning the whole trace.
    Waveform labelled(const std::string &label) const;

   private:
    std::vector<double> samples_;
    double dt_ = kDefaultSamplePeriod;
    double start_time_ = 0;
    double mean_ = 0;
    std::vector<Annotation> annotations_;
};

enum class Axis { X, Y };

/// Parameters of one X/Y gate window.
struct GateWindowSpec {
    double eps_p = 0;  ///< pulse amplitude [Hz]
    double f_p = 125e6;  ///< pulse frequency omega_p/2pi [Hz]
    double t_d = 0;  ///< window duration, t_Delta + t_c
    double t_c = 0;  ///< correction pad
    double t_xy = 0;  ///< X/Y onset shift, t_Delta / 4

    double t_delta() const {
        return t_d - t_c;
    }
    double pulse_period() const {
        return 1.0 / f_p;
    }
    /// Builds a consistent window from the gap Delta.
    static GateWindowSpec from_delta(double eps_p, double f_p, double delta, double t_c);
    void validate() const;
};

/// Pulse onset time within its window before grid snapping: the single period is
/// centred on t_d/2 + t_xy/2 for X and t_d/2 - t_xy/2 for Y.
double ideal_pulse_onset(const GateWindowSpec &spec, Axis axis);

/// Adds `sign * eps_p * sin(2 pi f_p (t - onset))` for t in [onset, onset + 1/f_p) to
/// `out`, cell-averaged over each sample. The cell average keeps the sampled
/// sinusoid exactly zero-mean for any sub-sample onset.
void add_sinusoid(std::vector<double> &out, double dt, double onset, double eps_p, double f_p, double sign);
/// Cell averages of one period starting `frac` into cell 0, 0 <= frac < dt.
std::vector<double> sinusoid_cells(double dt, double frac, double eps_p, double f_p, double sign);

/// One X/Y(+-pi/2) window of round(t_d/dt) samples. The Y pulse is the X pulse moved
/// earlier by round(t_xy/dt) whole samples.
Waveform synth_xy_pulse(const GateWindowSpec &spec, Axis axis, int sign, double dt = kDefaultSamplePeriod);
/// |round(t_xy/dt) dt - t_xy|, the X/Y shift lost to the grid.
double xy_snap_error(const GateWindowSpec &spec, double dt = kDefaultSamplePeriod);

/// Zero waveform of round(duration/dt) samples.
Waveform synth_z_idle(double duration, double dt = kDefaultSamplePeriod);
/// Z rotation angle 2 pi Delta t accumulated while idling.
double z_angle_of_idle(double delta, double duration);

/// Error-function ramp whose derivative is a Gaussian with 1/e^2 half-width
/// `time_constant`, truncated at +-duration/2 and re-pinned to hit both endpoints.
Waveform synth_gaussian_ramp(double from_level, double to_level, double time_constant, double duration,
                             double dt = kDefaultSamplePeriod);
/// Normalized ramp profile S(t) in [0, 1] used by synth_gaussian_ramp.
double gaussian_ramp_profile(double t, double time_constant, double duration);
/// Exact integral of S over [0, t].
double gaussian_ramp_profile_integral(double t, double time_constant, double duration);

Waveform concat(const std::vector<Waveform> &waveforms);

struct ZeroAverageCheck {
    bool ok = false;
    double mean = 0;
    double max_abs = 0;
};
ZeroAverageCheck check_zero_average(const Waveform &w, double tolerance);

/// CSV (time_s, epsilon_hz) plus a JSON sidecar `<path>.json` with annotations.
void write_waveform(const std::string &csv_path, const Waveform &w);
Waveform read_waveform(const std::string &csv_path);
/// Reduced-flux trace through the inverse of epsilon_of_flux.
std::vector<double> waveform_to_flux(const CQBSpec &spec, const Waveform &w);

}  // namespace cqbsim

#endif
