import json
import subprocess
import sys

import numpy as np
import pytest

import symflow as sf
from symflow import serialization as ser
from symflow.cli import main
from symflow.errors import SchemaError


def run_cli(*args, **kw):
    return subprocess.run([sys.executable, "-m", "symflow.cli", *args],
                          capture_output=True, text=True, **kw)


class TestMatrixJson:
    def test_round_trip(self):
        m = np.array([[1 + 2j, 0], [3, -1j]])
        again = ser.matrix_from_json(ser.matrix_to_json(m))
        np.testing.assert_allclose(again, m)

    def test_ragged_rejected(self):
        with pytest.raises(SchemaError):
            ser.matrix_from_json([[[1, 0], [0, 0]], [[0, 0]]])

    def test_scalar_forms(self):
        assert ser.complex_from_json(2) == 2
        assert ser.complex_from_json([1, -1]) == 1 - 1j
        with pytest.raises(SchemaError):
            ser.complex_from_json("1+i")


class TestLagrangianJson:
    def test_frame_form(self):
        lag = ser.lagrangian_from_json(
            {"space": "standard:1", "frame": [[[1, 0]], [[0, 0]]]})
        assert abs(lag.phi[0, 0] - 1) < 1e-12

    def test_phi_form(self):
        lag = ser.lagrangian_from_json({"space": "standard:1", "phi": [[[-1, 0]]]})
        assert sf.subspace_distance(
            lag.frame, np.array([[0], [1]], dtype=complex)) < 1e-12

    def test_needs_exactly_one_of_frame_phi(self):
        with pytest.raises(SchemaError):
            ser.lagrangian_from_json({"space": "standard:1"})

    def test_gamma_matrix_space(self):
        lag = ser.lagrangian_from_json(
            {"space": [[[0, 0], [-1, 0]], [[1, 0], [0, 0]]],
             "frame": [[[1, 0]], [[1, 0]]]})
        assert abs(lag.phi[0, 0] + 1j) < 1e-12


class TestPathJson:
    def test_samples_form(self):
        path = ser.unitary_path_from_json(
            {"samples": [[0.0, [[[1, 0]]]], [1.0, [[[0, 1]]]]]})
        assert path.size == 1

    def test_rotation_form_winds(self):
        path = ser.unitary_path_from_json(
            {"parametric": {"kind": "rotation", "phases": [0.0],
                            "rates": [2 * np.pi]}})
        assert sf.wind(path).value == 1

    def test_exp_interp_endpoints(self):
        u0 = np.eye(2)
        u1 = np.diag([1j, -1j])
        path = ser.unitary_path_from_json(
            {"parametric": {"kind": "exp-interp",
                            "u0": ser.matrix_to_json(u0),
                            "u1": ser.matrix_to_json(u1)}})
        np.testing.assert_allclose(path.mats[0], u0, atol=1e-12)
        np.testing.assert_allclose(path.mats[-1], u1, atol=1e-12)

    def test_unknown_kind_rejected(self):
        with pytest.raises(SchemaError):
            ser.unitary_path_from_json({"parametric": {"kind": "spline"}})


class TestRunCommand:
    def test_scenarios_stream(self, tmp_path):
        scen = {"scenarios": [
            {"name": "c2-triple", "op": "tsig",
             "inputs": {"space": "standard:1",
                        "V": {"frame": [[[1, 0]], [[0, 0]]]},
                        "W": {"frame": [[[1, 0]], [[1, 0]]]},
                        "U": {"frame": [[[0, 0]], [[1, 0]]]}}},
            {"name": "tauw-left-identity", "op": "tau_w",
             "inputs": {"U": [[[1, 0]]], "V": [[[-1, 0]]]}},
        ]}
        f = tmp_path / "scen.json"
        f.write_text(json.dumps(scen))
        r = run_cli("run", str(f))
        assert r.returncode == 0
        lines = [json.loads(l) for l in r.stdout.strip().splitlines()]
        assert lines[0]["value"] == 1
        assert lines[1]["value"] == 0

    def test_malformed_matrix_exits_2(self, tmp_path):
        f = tmp_path / "bad.json"
        f.write_text(json.dumps({"scenarios": [{
            "name": "bad", "op": "tr_log",
            "inputs": {"U": [[[1, 0], [0, 0]], [[0, 0]]]}}]}))
        assert run_cli("run", str(f)).returncode == 2

    def test_unknown_scenario_field_exits_2(self, tmp_path):
        f = tmp_path / "bad.json"
        f.write_text(json.dumps({"scenarios": [{
            "name": "x", "op": "tr_log", "inputs": {"U": [[[1, 0]]]},
            "extra": True}]}))
        assert run_cli("run", str(f)).returncode == 2

    def test_refinement_failure_exits_3(self, tmp_path):
        # sample-only path violating the step invariant
        f = tmp_path / "coarse.json"
        f.write_text(json.dumps({"scenarios": [{
            "name": "coarse", "op": "wind",
            "inputs": {"path": {"samples": [[0.0, [[[1, 0]]]],
                                            [1.0, [[[-1, 0]]]]]}}}]}))
        r = run_cli("run", str(f))
        assert r.returncode == 3

    def test_tolerance_priority(self, tmp_path, monkeypatch):
        f = tmp_path / "s.json"
        f.write_text(json.dumps({"scenarios": [{
            "name": "t", "op": "tr_log", "inputs": {"U": [[[1, 0]]]}}]}))
        r = run_cli("--tol", "1e-7", "run", str(f))
        rec = json.loads(r.stdout.strip())
        assert rec["tolerances"]["tol"] == 1e-7
        r2 = run_cli("run", str(f), env={"SYMFLOW_TOL": "1e-6",
                                         "PATH": "/usr/bin:/bin"})
        rec2 = json.loads(r2.stdout.strip())
        assert rec2["tolerances"]["tol"] == 1e-6

    def test_out_file_and_pretty(self, tmp_path):
        f = tmp_path / "s.json"
        f.write_text(json.dumps({"scenarios": [{
            "name": "t", "op": "tr_log", "inputs": {"U": [[[1, 0]]]}}]}))
        out = tmp_path / "report.json"
        r = run_cli("run", str(f), "--out", str(out), "--pretty")
        assert r.returncode == 0
        assert json.loads(out.read_text())["value"] == [0.0, 0.0]


class TestVerifyCommand:
    def test_deterministic_bytes(self):
        a = run_cli("verify", "triple", "--seed", "42", "--count", "20")
        b = run_cli("verify", "triple", "--seed", "42", "--count", "20")
        assert a.returncode == 0
        assert a.stdout == b.stdout

    def test_unknown_suite_exits_2(self):
        r = run_cli("verify", "nonsense")
        assert r.returncode == 2

    def test_all_runs_every_suite(self):
        r = run_cli("verify", "all", "--seed", "7", "--count", "6")
        assert r.returncode == 0
        from symflow.verification import SUITES

        for name in SUITES:
            assert f"suite {name}:" in r.stdout


class TestModelCommand:
    @pytest.fixture()
    def model_doc(self):
        return {
            "gamma": "standard:1",
            "A": ser.matrix_to_json(np.diag([1.0, -1.0])),
            "geometry": {"interval": 1.0},
            "boundary": {
                "P": {"frame": [[[1, 0]], [[0, 0]]]},
                "Q": {"frame": [[[0, 0]], [[1, 0]]]},
            },
            "window": 6.0,
        }

    def test_interval_spectrum(self, tmp_path, model_doc):
        f = tmp_path / "m.json"
        f.write_text(json.dumps(model_doc))
        r = run_cli("model", "spectrum", str(f))
        assert r.returncode == 0
        rec = json.loads(r.stdout)
        lams = np.array(rec["eigenvalues"])
        assert lams.size > 0
        # independent check against the library
        sp = sf.standard_space(1)
        op = sf.build_model(sp, np.diag([1.0, -1.0]), sf.Interval(1.0))
        p = sf.lagrangian_from_frame(sp, np.array([[1], [0]], dtype=complex))
        q = sf.lagrangian_from_frame(sp, np.array([[0], [1]], dtype=complex))
        np.testing.assert_allclose(lams, sf.interval_spectrum(op, p, q, 6.0),
                                   atol=1e-9)

    def test_circle_spectrum(self, tmp_path, model_doc):
        model_doc["geometry"] = {"circle": 2.0}
        del model_doc["boundary"]
        f = tmp_path / "m.json"
        f.write_text(json.dumps(model_doc))
        r = run_cli("model", "spectrum", str(f))
        rec = json.loads(r.stdout)
        assert min(abs(x) for x in rec["eigenvalues"]) == 1.0

    def test_stretch(self, tmp_path, model_doc):
        model_doc["stretch"] = {"nu": 0.0, "lengths": [2.0, 20.0, 60.0]}
        f = tmp_path / "m.json"
        f.write_text(json.dumps(model_doc))
        r = run_cli("model", "stretch", str(f))
        rec = json.loads(r.stdout)
        dists = [d["distance"] for d in rec["distances"]]
        assert dists[0] > dists[1] > dists[2] or dists[2] < 1e-12

    def test_glue(self, tmp_path, model_doc):
        dbs = sf.double_boundary(
            sf.build_model(sf.standard_space(1), np.diag([1.0, -1.0]),
                           sf.Interval(1.0)))
        lx = sf.cauchy_data(
            sf.build_model(sf.standard_space(1), np.diag([1.0, -1.0]),
                           sf.Interval(1.0)), dbs)
        model_doc["glue"] = {"length_minus": 0.7,
                             "P": {"frame": ser.matrix_to_json(lx.frame)},
                             "n_max": 2000}
        f = tmp_path / "m.json"
        f.write_text(json.dumps(model_doc))
        r = run_cli("model", "glue", str(f))
        assert r.returncode == 0
        rec = json.loads(r.stdout)
        assert rec["tau_mu"] == 0
        assert rec["defect"] <= rec["bound"] + 1e-9

    def test_schema_error_exits_2(self, tmp_path, model_doc):
        model_doc["bogus"] = 1
        f = tmp_path / "m.json"
        f.write_text(json.dumps(model_doc))
        assert run_cli("model", "spectrum", str(f)).returncode == 2


class TestMainEntry:
    def test_in_process_run(self, tmp_path, capsys):
        f = tmp_path / "s.json"
        f.write_text(json.dumps({"scenarios": [{
            "name": "t", "op": "eta_finite",
            "inputs": {"H": ser.matrix_to_json(np.diag([1.0, -2.0, 0.0]))}}]}))
        assert main(["run", str(f)]) == 0
        rec = json.loads(capsys.readouterr().out.strip())
        assert rec["value"] == {"eta": 0, "dim_ker": 1, "eta_tilde": 0.5}
