"""Command-line interface: exit codes, JSON/CSV output, config defaults,
file sources."""

import json
import shutil
import subprocess

import numpy as np
import pytest

from sg2c.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCertify:
    def test_certified_exit_zero(self, capsys):
        code, out, _ = run_cli(capsys, "certify", "--builtin",
                               "multistable4", "--param", "0.5",
                               "--method", "thm1")
        assert code == 0
        doc = json.loads(out)
        assert doc["verdict"] == "Certified"
        assert doc["method"] == "Thm3"
        assert doc["condition_value"] < 1.0

    def test_not_certified_exit_one(self, capsys):
        code, out, _ = run_cli(capsys, "certify", "--builtin",
                               "multistable4", "--param", "0.9",
                               "--method", "thm1")
        assert code == 1
        assert json.loads(out)["verdict"] == "NotCertified"

    def test_byte_identical_reruns(self, capsys):
        argv = ("certify", "--builtin", "thomas3", "--param", "0.5",
                "--method", "n3")
        _, first, _ = run_cli(capsys, *argv)
        _, second, _ = run_cli(capsys, *argv)
        assert first == second

    def test_output_file(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code, out, _ = run_cli(capsys, "certify", "--builtin",
                               "multistable4", "--param", "0.5",
                               "--method", "thm2", "--output", str(path))
        assert code == 0
        assert out == ""
        assert json.loads(path.read_text())["verdict"] == "Certified"


class TestUsageErrors:
    def test_wrong_partition_for_scalar_route(self, capsys):
        code, _, err = run_cli(capsys, "certify", "--builtin",
                               "multistable4", "--param", "0.5",
                               "--method", "n3")
        assert code == 2
        assert "error" in err

    def test_missing_model_file(self, capsys):
        code, _, err = run_cli(capsys, "certify", "--file",
                               "/no/such/model.json", "--method", "thm1")
        assert code == 2
        assert "error" in err

    def test_malformed_model_file(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{\n  broken\n")
        code, _, err = run_cli(capsys, "certify", "--file", str(path),
                               "--method", "thm1")
        assert code == 2
        assert "line" in err

    def test_curve_without_grid(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "--curve", "--builtin",
                               "multistable4")
        assert code == 2
        assert "error" in err

    def test_bad_flag_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["certify", "--builtin", "unknown-system",
                  "--method", "thm1"])
        assert exc.value.code == 2

    def test_invalid_parameter_value(self, capsys):
        code, _, err = run_cli(capsys, "certify", "--builtin", "thomas3",
                               "--param", "-1.0", "--method", "n3")
        assert code == 2
        assert "error" in err


class TestDecompose:
    def test_cascade_report_has_zero_blocks(self, capsys, tmp_path):
        # upper block-triangular vertex: the lower bridge and the first
        # off-diagonal channel must vanish in the report
        V = np.zeros((4, 4))
        V[:2, :2] = [[-2.0, 1.0], [0.0, -3.0]]
        V[2:, 2:] = [[-4.0, 0.5], [0.0, -5.0]]
        V[:2, 2:] = [[1.0, 2.0], [3.0, 4.0]]
        doc = {"name": "cascade", "n1": 2, "n2": 2,
               "vertices": [V.flatten().tolist()]}
        path = tmp_path / "cascade.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run_cli(capsys, "decompose", "--file", str(path))
        assert code == 0
        rep = json.loads(out)
        assert (rep["n1"], rep["n2"], rep["vertex_count"]) == (2, 2, 1)
        vtx = rep["vertices"][0]
        assert not any(vtx["b2"]["data"])
        assert not any(vtx["g1"]["data"])
        assert any(vtx["b1"]["data"])
        assert sorted(vtx["permutation"]) == list(range(6))

    def test_builtin_vertices(self, capsys):
        code, out, _ = run_cli(capsys, "decompose", "--builtin",
                               "multistable4", "--param", "0.5")
        assert code == 0
        rep = json.loads(out)
        assert rep["vertex_count"] == 2
        assert rep["vertices"][0]["compound"]["rows"] == 6


class TestGain:
    def test_gain_document(self, capsys):
        code, out, _ = run_cli(capsys, "gain", "--builtin", "multistable4",
                               "--param", "0.5")
        assert code == 0
        doc = json.loads(out)
        assert doc["gamma1"]["value"] == pytest.approx(0.5, abs=1e-3)
        assert doc["gamma2"]["value"] == pytest.approx(0.25, abs=1e-3)
        assert doc["gamma12"]["value"] > 0.0
        assert doc["gamma1"]["P"]["rows"] == doc["gamma1"]["P"]["cols"]


class TestSweep:
    def test_bisect_json(self, capsys):
        code, out, _ = run_cli(capsys, "sweep", "--bisect", "--builtin",
                               "multistable4", "--method", "thm1",
                               "--range", "0.5", "0.9", "--tol", "0.01")
        assert code == 0
        doc = json.loads(out)
        assert 0.70 < doc["threshold"] < 0.80
        assert doc["tolerance_achieved"] <= 0.01 + 1e-12
        assert len(doc["probes"]) >= 3
        assert {"param", "condition_value", "verdict"} <= set(
            doc["probes"][0])

    def test_no_sign_change_exits_three(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "--bisect", "--builtin",
                               "multistable4", "--method", "thm1",
                               "--range", "0.1", "0.4")
        assert code == 3
        assert "error" in err

    def test_curve_csv(self, capsys):
        code, out, _ = run_cli(capsys, "sweep", "--curve", "--builtin",
                               "multistable4", "--grid", "0.2,0.5")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "param,gamma1,gamma2,gamma12,Gamma1,Gamma2,verdict"
        assert len(lines) == 3
        assert lines[1].startswith("0.2,")
        assert out == run_cli(capsys, "sweep", "--curve", "--builtin",
                              "multistable4", "--grid", "0.2,0.5")[1]


class TestSimulate:
    def test_trajectory_csv(self, capsys):
        code, out, _ = run_cli(capsys, "simulate", "--builtin", "thomas3",
                               "--param", "0.9", "--x0", "0.1,0.2,0.3",
                               "--t-end", "1.0", "--step", "0.01")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "t,x1,x2,x3"
        assert len(lines) == 102
        assert lines[1].split(",")[0] == "0"

    def test_bad_initial_state(self, capsys):
        code, _, err = run_cli(capsys, "simulate", "--builtin", "thomas3",
                               "--param", "0.9", "--x0", "0.1,0.2")
        assert code == 2
        assert "error" in err


class TestConfig:
    def test_config_supplies_defaults(self, capsys, tmp_path):
        # param 0.9 from the config flips the verdict relative to the
        # built-in default 0.5
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"param": 0.9}))
        code, out, _ = run_cli(capsys, "--config", str(cfg), "certify",
                               "--builtin", "multistable4",
                               "--method", "thm1")
        assert code == 1
        assert json.loads(out)["verdict"] == "NotCertified"

    def test_command_line_overrides_config(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"param": 0.9}))
        code, _, _ = run_cli(capsys, "--config", str(cfg), "certify",
                             "--builtin", "multistable4", "--param", "0.5",
                             "--method", "thm1")
        assert code == 0

    def test_invalid_config_json(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("[1, 2")
        code, _, err = run_cli(capsys, "--config", str(cfg), "certify",
                               "--builtin", "multistable4",
                               "--method", "thm1")
        assert code == 2
        assert "line" in err

    def test_config_root_must_be_object(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("[]")
        code, _, err = run_cli(capsys, "--config", str(cfg), "certify",
                               "--builtin", "multistable4",
                               "--method", "thm1")
        assert code == 2
        assert "object" in err


class TestRepro:
    def test_feedback_example_table(self, capsys):
        code, out, _ = run_cli(capsys, "repro", "--example", "1")
        assert code == 0
        assert "multistable4" in out
        assert "gamma1" in out
        assert "checks within tolerance" in out


class TestConsoleScript:
    def test_entry_point_installed(self):
        path = shutil.which("sg2c")
        assert path is not None
        proc = subprocess.run([path, "--help"], capture_output=True,
                              text=True, timeout=120)
        assert proc.returncode == 0
        assert "decompose" in proc.stdout
