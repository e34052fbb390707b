# Copyright 2026 The cqbsim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python access to the cqbsim experiments and a few core formulas."""

import json

from . import _cqbsim
from ._cqbsim import (
    CqbError,
    clifford_compose,
    experiments,
    lz_excitation_probability,
    recovery_clifford,
    simulate_lz_sweep,
)

__all__ = [
    "CqbError",
    "calibrate",
    "clifford_compose",
    "config_hash",
    "error_info",
    "experiments",
    "flux_noise_ratio",
    "load_cqb_spec",
    "lz_excitation_probability",
    "recovery_clifford",
    "run_experiment",
    "simulate_lz_sweep",
    "single_pulse_excitation",
]


def run_experiment(experiment, spec, params=None, *, seed=None, workers=1, out_dir=".", shots=0, noiseless=False):
    """Runs one experiment and returns its manifest as a dict."""
    text = _cqbsim.run_experiment(
        experiment, str(spec), json.dumps(params or {}), seed, workers, str(out_dir), shots, noiseless
    )
    return json.loads(text)


def config_hash(experiment, spec, params=None, *, seed=None, shots=0, noiseless=False):
    return _cqbsim.config_hash(experiment, str(spec), json.dumps(params or {}), seed, shots, noiseless)


def load_cqb_spec(path):
    return json.loads(_cqbsim.load_cqb_spec(str(path)))


def calibrate(spec, workers=1):
    """Noiseless tune-up; returns the calibrated gate set."""
    return json.loads(_cqbsim.calibrate(str(spec), workers))


def error_info(exc):
    """The {"error", "message", "field"} object carried by a CqbError."""
    return json.loads(str(exc))


def single_pulse_excitation(spec, eps_p_hz, f_p_hz):
    """Excited population after one isolated single-period pulse."""
    return _cqbsim.single_pulse_excitation(str(spec), eps_p_hz, f_p_hz)


def flux_noise_ratio(spec):
    return _cqbsim.flux_noise_ratio(str(spec))
