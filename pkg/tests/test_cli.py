"""Tests for the beamform command line: outputs, sidecars and exit codes."""

import csv
import dataclasses
import io
import json
import math

import pytest

import cli
from model import (Beamformer, ChannelVector, RobustInstance, ToleranceNotReached,
                   serialize_beamformer, serialize_instance)
from montecarlo import CSV_HEADER


@pytest.fixture
def instance_file(tmp_path, orthogonal_robust):
    path = tmp_path / "instance.json"
    path.write_bytes(serialize_instance(orthogonal_robust))
    return path


@pytest.fixture
def campaign_file(tmp_path):
    path = tmp_path / "campaign.toml"
    path.write_text(
        "[campaign]\n"
        "n_antennas = 2\n"
        "epsilons = [0.0, 0.2]\n"
        "rate_grid = [0.0, 2.0]\n"
        "n_channels = 3\n"
        "n_error_samples = 20\n"
        "seed = 5\n"
    )
    return path


def stderr_error(capsys) -> dict:
    lines = [line for line in capsys.readouterr().err.splitlines() if line.startswith("{")]
    return json.loads(lines[-1])


class TestSolve:

    def test_json_output(self, tmp_path, instance_file):
        out = tmp_path / "solution.json"
        assert cli.main(["solve", "-i", str(instance_file), "-o", str(out)]) == cli.EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["guaranteed_energy"] == pytest.approx((2 * math.sqrt(6) - 1) ** 2, rel=1e-9)
        assert doc["mu"] == pytest.approx(4.0, rel=1e-9)
        assert doc["cross_check"]["delta"] <= 1e-6
        assert doc["path"] in ("dual_sdp", "closed_form")

    def test_csv_output(self, tmp_path, instance_file):
        out = tmp_path / "solution.csv"
        assert cli.main(["solve", "-i", str(instance_file), "-o", str(out), "--format", "csv"]) == 0
        rows = list(csv.reader(io.StringIO(out.read_text())))
        assert tuple(rows[0]) == cli.SOLUTION_CSV_HEADER
        assert float(rows[1][1]) == pytest.approx(24.0, rel=1e-9)

    def test_solution_feeds_verify(self, tmp_path, instance_file):
        solution = tmp_path / "solution.json"
        report = tmp_path / "report.json"
        cli.main(["solve", "-i", str(instance_file), "-o", str(solution)])
        code = cli.main(["verify", "-i", str(instance_file), "-w", str(solution),
                         "-n", "200", "--seed", "3", "-o", str(report)])
        assert code == cli.EXIT_OK
        doc = json.loads(report.read_text())
        assert doc["seed"] == 3
        assert doc["n_samples"] == 200
        assert not doc["rate_outage"]

    def test_infeasible_exit_code(self, tmp_path, capsys, infeasible_instance):
        path = tmp_path / "infeasible.json"
        path.write_bytes(serialize_instance(infeasible_instance))
        assert cli.main(["solve", "-i", str(path)]) == cli.EXIT_INFEASIBLE
        error = stderr_error(capsys)
        assert error["error"] == "infeasible"
        assert error["margin"] < 0

    def test_parse_error_names_field(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"n": 1, "h_hat": [[1, 0]], "g_hat": [[1, 0]],
                                    "power": -1, "sigma2": 1, "rate_target": 1, "epsilon": 0}))
        assert cli.main(["solve", "-i", str(path)]) == cli.EXIT_INPUT
        error = stderr_error(capsys)
        assert error["error"] == "parse"
        assert error["field"] == "power"

    def test_missing_file(self, tmp_path, capsys):
        assert cli.main(["solve", "-i", str(tmp_path / "nope.json")]) == cli.EXIT_INPUT
        assert stderr_error(capsys)["field"] == "path"

    def test_tolerance_exit_code(self, monkeypatch, instance_file, capsys):
        def fail(instance):
            raise ToleranceNotReached("reduced dual not bracketed", residual=0.5)

        monkeypatch.setattr(cli, "solve_dual_sdp", fail)
        assert cli.main(["solve", "-i", str(instance_file)]) == cli.EXIT_TOLERANCE
        error = stderr_error(capsys)
        assert error["error"] == "tolerance"
        assert error["residual"] == 0.5

    def test_cross_check_disagreement_exit_code(self, monkeypatch, tmp_path, instance_file, capsys):
        real = cli.solve_closed_form

        def shifted(instance):
            reference = real(instance)
            return dataclasses.replace(reference,
                                       guaranteed_energy=reference.guaranteed_energy + 1.0)

        monkeypatch.setattr(cli, "solve_closed_form", shifted)
        out = tmp_path / "solution.json"
        assert cli.main(["solve", "-i", str(instance_file), "-o", str(out)]) == cli.EXIT_TOLERANCE
        assert json.loads(out.read_text())["cross_check"]["relative_delta"] > cli.CROSS_CHECK_TOL
        assert stderr_error(capsys)["error"] == "tolerance"

    def test_unwritable_output(self, tmp_path, instance_file, capsys):
        out = tmp_path / "no_such_dir" / "solution.json"
        assert cli.main(["solve", "-i", str(instance_file), "-o", str(out)]) == cli.EXIT_INPUT
        assert stderr_error(capsys)["error"] == "io"


class TestVerify:

    def test_nonrobust_beamformer_outage(self, tmp_path, capsys):
        instance = RobustInstance(ChannelVector([2, 0]), ChannelVector([0, 2]), 10.0, 1.0,
                                  math.log2(21.0), 0.3)
        instance_path = tmp_path / "instance.json"
        w_path = tmp_path / "w.json"
        instance_path.write_bytes(serialize_instance(instance))
        w_path.write_bytes(serialize_beamformer(Beamformer([math.sqrt(5), math.sqrt(5)])))
        code = cli.main(["verify", "-i", str(instance_path), "-w", str(w_path), "-n", "100"])
        assert code == cli.EXIT_OUTAGE
        doc = json.loads(capsys.readouterr().out)
        assert doc["rate_outage"]
        assert doc["seed"] == 0

    def test_dimension_mismatch(self, tmp_path, capsys, instance_file):
        w_path = tmp_path / "w.json"
        w_path.write_bytes(serialize_beamformer(Beamformer([1, 0, 0])))
        assert cli.main(["verify", "-i", str(instance_file), "-w", str(w_path)]) == cli.EXIT_INPUT
        assert stderr_error(capsys)["error"] == "dimension"

    def test_zero_beamformer(self, tmp_path, capsys, instance_file):
        w_path = tmp_path / "w.json"
        w_path.write_bytes(serialize_beamformer(Beamformer([0, 0])))
        assert cli.main(["verify", "-i", str(instance_file), "-w", str(w_path)]) == cli.EXIT_INPUT

    def test_seeded_runs_are_identical(self, tmp_path, instance_file):
        w_path = tmp_path / "w.json"
        w_path.write_bytes(serialize_beamformer(Beamformer([1 + 1j, 2])))
        outputs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            cli.main(["verify", "-i", str(instance_file), "-w", str(w_path), "-n", "50",
                      "--seed", "9", "-o", str(out)])
            outputs.append(out.read_text())
        assert outputs[0] == outputs[1]


class TestSimulate:

    def test_csv_and_sidecar(self, tmp_path, campaign_file):
        out = tmp_path / "campaign.csv"
        code = cli.main(["simulate", "-c", str(campaign_file), "-o", str(out), "--workers", "2"])
        assert code == cli.EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert len(lines) == 1 + 4
        meta = json.loads((tmp_path / "campaign.json").read_text())
        assert meta["seed"] == 5
        assert meta["config"]["workers"] == 2
        assert meta["worst_vectors_injected"] is True
        assert meta["version"]

    def test_same_seed_same_bytes(self, tmp_path, campaign_file):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        cli.main(["simulate", "-c", str(campaign_file), "-o", str(a), "--workers", "1"])
        cli.main(["simulate", "-c", str(campaign_file), "-o", str(b), "--workers", "8"])
        assert a.read_bytes() == b.read_bytes()

    def test_seed_flag_overrides_file(self, tmp_path, campaign_file):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        cli.main(["simulate", "-c", str(campaign_file), "-o", str(a)])
        cli.main(["simulate", "-c", str(campaign_file), "-o", str(b), "--seed", "6"])
        assert json.loads((tmp_path / "b.json").read_text())["seed"] == 6
        assert a.read_text() != b.read_text()

    def test_fig3_sweep(self, tmp_path, campaign_file):
        out = tmp_path / "fig3.csv"
        cli.main(["simulate", "-c", str(campaign_file), "-o", str(out), "--sweep", "fig3"])
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        assert {float(row["epsilon"]) for row in rows} == {0.2}
        assert json.loads((tmp_path / "fig3.json").read_text())["kind"] == "fig3"

    def test_missing_seed(self, tmp_path, capsys):
        path = tmp_path / "noseed.toml"
        path.write_text("[campaign]\nn_channels = 2\n")
        assert cli.main(["simulate", "-c", str(path)]) == cli.EXIT_INPUT
        error = stderr_error(capsys)
        assert error["error"] == "config"
        assert error["field"] == "seed"

    def test_bad_config_value(self, tmp_path, capsys):
        path = tmp_path / "bad.toml"
        path.write_text("[campaign]\nseed = 1\nrate_grid = [0.0, 9.0]\n")
        assert cli.main(["simulate", "-c", str(path)]) == cli.EXIT_INPUT
        assert stderr_error(capsys)["field"] == "rate_grid"

    def test_override_validation(self, tmp_path, campaign_file, capsys):
        code = cli.main(["simulate", "-c", str(campaign_file), "--n-channels", "0"])
        assert code == cli.EXIT_INPUT
        assert stderr_error(capsys)["field"] == "n_channels"

    def test_missing_config_file(self, tmp_path, capsys):
        code = cli.main(["simulate", "-c", str(tmp_path / "nope.toml"), "--seed", "1"])
        assert code == cli.EXIT_INPUT
        error = stderr_error(capsys)
        assert error["error"] == "config"
        assert error["field"] == "config"

    def test_unwritable_output(self, tmp_path, campaign_file, capsys):
        out = tmp_path / "no_such_dir" / "campaign.csv"
        assert cli.main(["simulate", "-c", str(campaign_file), "-o", str(out)]) == cli.EXIT_INPUT
        error = stderr_error(capsys)
        assert error["error"] == "io"
        assert "campaign.csv" in error["path"]

    def test_unwritable_sidecar(self, tmp_path, campaign_file, capsys):
        (tmp_path / "campaign.json").mkdir()
        out = tmp_path / "campaign.csv"
        assert cli.main(["simulate", "-c", str(campaign_file), "-o", str(out)]) == cli.EXIT_INPUT
        assert stderr_error(capsys)["error"] == "io"
