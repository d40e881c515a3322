import json

import pytest

from simplexflow.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION, main
from simplexflow.dynamics import FlowTrace
from simplexflow.geometry import unit_simplex_measure
from simplexflow.measure import DiscreteMeasure


@pytest.fixture
def triangle_path(tmp_path):
    path = tmp_path / "triangle.json"
    path.write_text(unit_simplex_measure(2).to_json())
    return str(path)


@pytest.fixture
def pair_path(tmp_path):
    path = tmp_path / "pair.json"
    path.write_text(DiscreteMeasure([[0.0], [0.4]]).to_json())
    return str(path)


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


class TestEnergyCommand:
    def test_basic(self, triangle_path, tmp_path, capsys):
        out = tmp_path / "e.json"
        rc = main(["energy", "--measure", triangle_path, "--alpha", "4", "--beta", "2", "--out", str(out)])
        assert rc == EXIT_OK
        data = read_json(out)
        assert data["command"] == "energy"
        assert data["result"]["value"] == pytest.approx(-1 / 6, abs=1e-13)
        assert data["config"]["alpha"] == 4.0

    def test_hard_flag(self, triangle_path, tmp_path):
        out = tmp_path / "eh.json"
        rc = main(["energy", "--measure", triangle_path, "--alpha", "0", "--beta", "2", "--hard", "--out", str(out)])
        assert rc == EXIT_OK
        assert read_json(out)["result"]["value"] == pytest.approx(-1 / 3, abs=1e-12)

    def test_missing_measure(self, tmp_path):
        rc = main(["energy", "--measure", str(tmp_path / "nope.json"), "--alpha", "4", "--beta", "2"])
        assert rc == EXIT_VALIDATION

    def test_missing_required_flag(self, triangle_path):
        rc = main(["energy", "--measure", triangle_path, "--alpha", "4"])
        assert rc == EXIT_VALIDATION


class TestMetricCommand:
    def test_self_distance_zero(self, triangle_path, tmp_path):
        out = tmp_path / "m.json"
        rc = main(["metric", "--p", "inf", "--a", triangle_path, "--b", triangle_path, "--out", str(out)])
        assert rc == EXIT_OK
        assert read_json(out)["result"]["distance"] == 0.0

    def test_bad_p(self, triangle_path):
        rc = main(["metric", "--p", "7", "--a", triangle_path, "--b", triangle_path])
        assert rc == EXIT_VALIDATION


class TestFlowCommand:
    def test_json_and_csv(self, pair_path, tmp_path):
        out_json = tmp_path / "f.json"
        rc = main([
            "flow", "--measure", pair_path, "--alpha", "4", "--beta", "2",
            "--dt", "0.02", "--t-max", "3", "--out", str(out_json),
        ])
        assert rc == EXIT_OK
        data = read_json(out_json)
        energies = data["result"]["energies"]
        assert energies == sorted(energies, reverse=True)

        out_csv = tmp_path / "f.csv"
        rc = main([
            "--format", "csv",
            "flow", "--measure", pair_path, "--alpha", "4", "--beta", "2",
            "--dt", "0.02", "--t-max", "3", "--out", str(out_csv),
        ])
        assert rc == EXIT_OK
        lines = out_csv.read_text().strip().split("\n")
        assert lines[0] == "t,energy"
        assert len(lines) > 2

    def test_step_failure_exit_code(self, pair_path, tmp_path, monkeypatch):
        def fake_flow(mu0, params, cfg, seed=0, threads=None):
            return FlowTrace(times=[0.0], energies=[0.0], configs=[mu0], terminated_by="step_failure")

        monkeypatch.setattr("simplexflow.cli.flow", fake_flow)
        rc = main(["flow", "--measure", pair_path, "--alpha", "4", "--beta", "2"])
        assert rc == EXIT_NUMERICAL


class TestMinimizeCommand:
    def test_small_run(self, tmp_path):
        out = tmp_path / "min.json"
        rc = main([
            "minimize", "--n", "1", "--alpha", "6", "--beta", "2",
            "--atoms", "8", "--restarts", "2", "--seed", "3", "--out", str(out),
        ])
        assert rc == EXIT_OK
        data = read_json(out)
        assert data["result"]["atom_count_after_collapse"] == 2
        assert data["result"]["is_unit_simplex"] is True

    def test_invalid_exponents(self):
        rc = main(["minimize", "--n", "1", "--alpha", "2", "--beta", "2", "--atoms", "8"])
        assert rc == EXIT_VALIDATION


class TestVerifyCommands:
    def test_variance(self, tmp_path):
        out = tmp_path / "v.json"
        rc = main(["verify", "variance", "--n", "1", "--clouds", "40", "--seed", "1", "--out", str(out)])
        assert rc == EXIT_OK
        data = read_json(out)
        assert data["result"]["violations"] == 0
        assert data["result"]["max_value"] <= 0.25 + 1e-9

    def test_vertex_potential(self, tmp_path):
        out = tmp_path / "vp.json"
        rc = main(["verify", "vertex-potential", "--beta", "2", "--n", "2", "--grid-h", "0.05", "--out", str(out)])
        assert rc == EXIT_OK
        assert read_json(out)["result"]["argmin_near_vertex"] is True

    def test_local_min(self, tmp_path):
        out = tmp_path / "lm.json"
        rc = main([
            "verify", "local-min", "--beta", "3", "--alpha", "3.75",
            "--masses", "0.2,0.3,0.5", "--n", "2", "--radius", "0.01",
            "--trials", "50", "--split-factor", "3", "--out", str(out),
        ])
        assert rc == EXIT_OK
        assert read_json(out)["result"]["violations"] == 0

    def test_local_min_below_threshold_rejected(self):
        rc = main([
            "verify", "local-min", "--beta", "2", "--alpha", "4.5",
            "--masses", "0.25,0.75", "--n", "1",
        ])
        assert rc == EXIT_VALIDATION

    def test_jung(self, tmp_path):
        out = tmp_path / "j.json"
        rc = main(["verify", "jung", "--n-max", "3", "--out", str(out)])
        assert rc == EXIT_OK
        assert read_json(out)["result"]["radii_monotone"] is True

    def test_wrong_mass_count(self):
        rc = main([
            "verify", "local-min", "--beta", "3", "--alpha", "4",
            "--masses", "0.5,0.5", "--n", "2",
        ])
        assert rc == EXIT_VALIDATION

    def test_gamma(self, tmp_path):
        out = tmp_path / "g.json"
        rc = main([
            "verify", "gamma", "--beta", "2", "--alphas", "8,20", "--n", "2",
            "--atoms", "16", "--restarts", "2", "--seed", "4", "--out", str(out),
        ])
        assert rc == EXIT_OK
        data = read_json(out)
        assert len(data["result"]["rows"]) == 2
        assert data["result"]["rows"][-1]["is_unit_simplex"] is True

    def test_gamma_csv(self, tmp_path):
        out = tmp_path / "g.csv"
        rc = main([
            "--format", "csv",
            "verify", "gamma", "--beta", "2", "--alphas", "8,20", "--n", "2",
            "--atoms", "16", "--restarts", "2", "--seed", "4", "--out", str(out),
        ])
        assert rc == EXIT_OK
        assert out.read_text().startswith("alpha,distance,is_unit_simplex,energy,atoms")


class TestScanThreshold:
    def test_bracket(self, tmp_path):
        out = tmp_path / "s.json"
        rc = main([
            "scan-threshold", "--masses", "0.5,0.5", "--n", "1",
            "--bracket-tol", "0.5", "--out", str(out),
        ])
        assert rc == EXIT_OK
        data = read_json(out)
        assert data["result"]["lower"] <= 3.0 <= data["result"]["upper"]

    def test_csv_probes(self, tmp_path):
        out = tmp_path / "s.csv"
        rc = main([
            "--format", "csv",
            "scan-threshold", "--masses", "0.5,0.5", "--n", "1",
            "--bracket-tol", "1.0", "--out", str(out),
        ])
        assert rc == EXIT_OK
        assert out.read_text().startswith("alpha,descent_found")


class TestCandidates:
    def test_table(self, tmp_path):
        out = tmp_path / "c.json"
        rc = main(["candidates", "--n", "2", "--alpha", "10", "--beta", "2", "--out", str(out)])
        assert rc == EXIT_OK
        rows = {r["name"]: r for r in read_json(out)["result"]["rows"]}
        assert rows["uniform-simplex"]["energy"] == pytest.approx(-4 / 15, abs=1e-12)
        assert rows["single-atom"]["energy"] == 0.0

    def test_csv(self, tmp_path):
        out = tmp_path / "c.csv"
        rc = main(["--format", "csv", "candidates", "--n", "1", "--alpha", "6", "--beta", "2", "--out", str(out)])
        assert rc == EXIT_OK
        assert out.read_text().startswith("name,energy,atoms")


class TestConfigFile:
    def test_flags_override_file(self, tmp_path, triangle_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"measure": triangle_path, "alpha": 4.0, "beta": 2.0}))
        out = tmp_path / "o.json"
        rc = main(["--config", str(cfg), "energy", "--alpha", "6", "--out", str(out)])
        assert rc == EXIT_OK
        assert read_json(out)["config"]["alpha"] == 6.0

    def test_unknown_key_rejected(self, tmp_path, triangle_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"measure": triangle_path, "alpha": 4.0, "beta": 2.0, "bogus": 1}))
        rc = main(["--config", str(cfg), "energy"])
        assert rc == EXIT_VALIDATION

    def test_malformed_json(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{not json")
        rc = main(["--config", str(cfg), "energy"])
        assert rc == EXIT_VALIDATION


class TestDeterminism:
    def test_byte_identical_reruns(self, tmp_path):
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        args = [
            "minimize", "--n", "1", "--alpha", "6", "--beta", "2",
            "--atoms", "8", "--restarts", "2", "--seed", "9",
        ]
        assert main([*args, "--out", str(out1)]) == EXIT_OK
        assert main([*args, "--out", str(out2)]) == EXIT_OK
        assert out1.read_bytes() == out2.read_bytes()

    def test_threads_env_fallback(self, tmp_path, monkeypatch, triangle_path):
        monkeypatch.setenv("SIMPLEXFLOW_THREADS", "2")
        out = tmp_path / "e.json"
        rc = main(["energy", "--measure", triangle_path, "--alpha", "4", "--beta", "2", "--out", str(out)])
        assert rc == EXIT_OK
        assert read_json(out)["threads"] == 2

    def test_output_config_revalidates(self, tmp_path, triangle_path):
        # the embedded config block is itself a valid config file
        from simplexflow.cli import _resolve_config

        out = tmp_path / "e.json"
        rc = main(["energy", "--measure", triangle_path, "--alpha", "4", "--beta", "2", "--out", str(out)])
        assert rc == EXIT_OK
        cfg_path = tmp_path / "echo.json"
        cfg_path.write_text(json.dumps(read_json(out)["config"]))
        resolved = _resolve_config("energy", {}, str(cfg_path))
        assert resolved["alpha"] == 4.0

        out2 = tmp_path / "rerun.json"
        rc = main(["--config", str(cfg_path), "energy", "--out", str(out2)])
        assert rc == EXIT_OK
        assert read_json(out2)["result"] == read_json(out)["result"]

    def test_bad_threads(self, triangle_path):
        rc = main(["--threads", "0", "energy", "--measure", triangle_path, "--alpha", "4", "--beta", "2"])
        assert rc == EXIT_VALIDATION


class TestUsage:
    def test_no_command(self):
        assert main([]) == EXIT_VALIDATION

    def test_unknown_flag(self, triangle_path):
        rc = main(["energy", "--measure", triangle_path, "--alpha", "4", "--beta", "2", "--nope", "1"])
        assert rc == EXIT_VALIDATION

    def test_csv_unsupported_command(self, triangle_path):
        rc = main(["--format", "csv", "energy", "--measure", triangle_path, "--alpha", "4", "--beta", "2"])
        assert rc == EXIT_VALIDATION
