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

import json
import math
import os
import pathlib

import pytest

import cqbsim

DATA = pathlib.Path(os.environ.get("CQBSIM_DATA_DIR", pathlib.Path(__file__).parents[2] / "data"))
CQB_A = DATA / "cqb-a.json"


def test_registry():
    assert set(cqbsim.experiments()) == {"scan2d", "calibrate", "rb", "coherence", "init", "cz", "compile"}


def test_lz_formula_and_sweep():
    rate = 1e15
    omega = math.sqrt(math.log(2) * rate) / (2 * math.pi)
    assert cqbsim.lz_excitation_probability(omega, rate) == pytest.approx(0.5, abs=1e-12)
    assert cqbsim.simulate_lz_sweep(omega, rate) == pytest.approx(0.5, rel=0.01)


def test_spec_and_calibration():
    spec = cqbsim.load_cqb_spec(CQB_A)
    assert spec["delta_hz"] == pytest.approx(65.4e6)
    gates = cqbsim.calibrate(CQB_A)
    assert gates["t_xy_s"] == pytest.approx(3.823e-9, abs=0.1e-9)
    assert cqbsim.single_pulse_excitation(CQB_A, 0.0, 125e6) == 0.0


def test_scan2d_manifest(tmp_path):
    params = {"eps_points": 5, "freq_points": 3}
    m = cqbsim.run_experiment("scan2d", CQB_A, params, out_dir=tmp_path)
    assert m["config_hash"] == cqbsim.config_hash("scan2d", CQB_A, params)
    for f in m["files"]:
        assert (tmp_path / f["path"]).exists()
    on_disk = json.loads((tmp_path / "manifest.json").read_text())
    assert on_disk["experiment"] == "scan2d"


def test_rb_deterministic(tmp_path):
    params = {"lengths": "1,4,16", "sequences": 10}
    a = cqbsim.run_experiment("rb", CQB_A, params, seed=3, out_dir=tmp_path / "a", noiseless=True)
    b = cqbsim.run_experiment("rb", CQB_A, params, seed=3, out_dir=tmp_path / "b", workers=2, noiseless=True)
    assert a["summary"] == b["summary"]
    assert (tmp_path / "a" / "rb_records.csv").read_text() == (tmp_path / "b" / "rb_records.csv").read_text()


def test_errors_carry_kind():
    with pytest.raises(cqbsim.CqbError) as info:
        cqbsim.run_experiment("rb", CQB_A)
    err = cqbsim.error_info(info.value)
    assert err["error"] == "config"
    assert err["field"] == "seed"


def test_clifford_helpers():
    assert cqbsim.recovery_clifford([1]) == 1
    assert cqbsim.clifford_compose(1, 7) == 7
