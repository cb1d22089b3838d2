import json
import math

import numpy as np
import pytest

from jumpstats import cli
from jumpstats.cli import GridSpec, parse_args, run


def parse_error_code(argv):
    with pytest.raises(SystemExit) as exc:
        parse_args(argv)
    return exc.value.code


class TestParseArgs:
    def test_scgf_single_point(self):
        cfg = parse_args(["scgf", "--gamma", "1", "--omega", "0.25",
                          "--alpha", "0", "--s", "0"])
        assert cfg.command == "scgf"
        assert cfg.s_values == (0.0,)
        assert cfg.s_grid is None
        assert cfg.gamma == 1.0 and cfg.omega == 0.25 and cfg.alpha == 0.0

    def test_defaults(self):
        cfg = parse_args(["scgf"])
        assert (cfg.gamma, cfg.omega, cfg.alpha) == (1.0, 0.25, 0.0)
        assert cfg.master_seed == 42
        assert cfg.s_values == (0.0,)
        assert cfg.init == "g"

    def test_s_list(self):
        cfg = parse_args(["traj", "--s", "0,0.2,-0.5"])
        assert cfg.s_values == (0.0, 0.2, -0.5)

    def test_conflicting_s_flags(self):
        assert parse_error_code(["scgf", "--s", "0", "--s-min", "-1"]) == 2

    def test_conflicting_alpha_flags(self):
        assert parse_error_code(
            ["sweep", "--alpha", "1", "--alpha-min", "-1"]
        ) == 2

    def test_unknown_flag(self):
        assert parse_error_code(["scgf", "--bogus", "1"]) == 2

    def test_invalid_gamma(self):
        assert parse_error_code(["scgf", "--gamma", "-2"]) == 2

    def test_sweep_default_grids(self):
        cfg = parse_args(["sweep", "--gamma", "4"])
        assert cfg.s_grid == GridSpec(-1.5, 1.5, 301)
        # alpha window scales with sqrt(gamma)
        assert cfg.alpha_grid == GridSpec(-4.0, 4.0, 201)

    def test_sweep_single_alpha_becomes_one_point_grid(self):
        cfg = parse_args(["sweep", "--alpha", "0.5", "--s", "0"])
        assert cfg.alpha_grid == GridSpec(0.5, 0.5, 1)

    def test_config_file(self, tmp_path):
        path = tmp_path / "fig.json"
        path.write_text(json.dumps({
            "omega": 0.25, "gamma": 1.0,
            "s-min": -1.0, "s-max": 1.0, "s-steps": 11,
            "alpha-min": -2.0, "alpha-max": 2.0, "alpha-steps": 21,
        }))
        cfg = parse_args(["sweep", "--config", str(path)])
        assert cfg.omega == 0.25
        assert cfg.s_grid == GridSpec(-1.0, 1.0, 11)
        assert cfg.alpha_grid == GridSpec(-2.0, 2.0, 21)

    def test_flags_override_config(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"omega": 0.25, "seed": 7}))
        cfg = parse_args(["scgf", "--config", str(path), "--omega", "1.5"])
        assert cfg.omega == 1.5
        assert cfg.master_seed == 7

    def test_malformed_config(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert parse_error_code(["scgf", "--config", str(path)]) == 2

    def test_unknown_config_key(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"gamme": 1.0}))
        assert parse_error_code(["scgf", "--config", str(path)]) == 2

    def test_missing_subcommand(self):
        assert parse_error_code([]) == 2

    def test_dump_config_round_trip(self, tmp_path, capsys):
        argv = ["sweep", "--gamma", "2", "--omega", "0.5", "--s-min", "-1",
                "--s-max", "1", "--s-steps", "5", "--alpha-min", "0",
                "--alpha-max", "1", "--alpha-steps", "3", "--seed", "9"]
        cfg = parse_args(argv + ["--dump-config"])
        assert run(cfg) == 0
        dumped = capsys.readouterr().out
        path = tmp_path / "dump.json"
        path.write_text(dumped)
        reparsed = parse_args(["sweep", "--config", str(path)])
        assert reparsed == cfg.__class__(**{**cfg.__dict__, "dump_config": False})


class TestRunScgf:
    def test_closed_form_point(self, capsys):
        code = cli.main(["scgf", "--gamma", "1", "--omega", "0.25",
                         "--alpha", "0", "--s", "0"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["s"] == 0.0
        assert abs(payload["theta"]) <= 1e-10
        assert payload["k"] == pytest.approx(0.1666667, abs=1e-6)
        assert payload["Q"] == pytest.approx(-0.6666667, abs=1e-6)
        assert payload["imag_residual"] <= 1e-9

    def test_multiple_s_values_one_line_each(self, capsys):
        code = cli.main(["scgf", "--s", "0,0.5"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2
        assert json.loads(lines[1])["s"] == 0.5

    def test_output_file(self, tmp_path):
        out = tmp_path / "scgf.json"
        code = cli.main(["scgf", "--s", "0", "--out", str(out)])
        assert code == 0
        assert json.loads(out.read_text())["k"] == pytest.approx(1 / 6, abs=1e-6)


class TestRunSweep:
    def test_two_by_two_grid(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = cli.main(["sweep", "--s-min", "-0.5", "--s-max", "0.5",
                         "--s-steps", "2", "--alpha-min", "0.0",
                         "--alpha-max", "1.0", "--alpha-steps", "2",
                         "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "s,alpha,theta,k,Q,imag_residual"
        assert len(lines) == 5

    def test_byte_identical_reruns(self, tmp_path):
        args = ["sweep", "--s-min", "-0.3", "--s-max", "0.3", "--s-steps", "3",
                "--alpha-min", "-0.5", "--alpha-max", "0.5",
                "--alpha-steps", "3"]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(args + ["--out", str(out1)]) == 0
        assert cli.main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_line_endings_and_precision(self, tmp_path):
        out = tmp_path / "sweep.csv"
        cli.main(["sweep", "--s", "0", "--alpha", "0", "--out", str(out)])
        raw = out.read_bytes()
        assert b"\r" not in raw
        row = raw.decode().splitlines()[1].split(",")
        # 17 significant digits survive in the activity column
        assert float(row[3]) == pytest.approx(1 / 6, abs=1e-12)
        assert len(row) == 6

    def test_failed_points_are_nan_with_warning(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code = cli.main(["sweep", "--s=-800,0", "--alpha", "0",
                         "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 3
        assert "nan" in lines[1]
        assert "warning" in capsys.readouterr().err


class TestRunTraj:
    def test_summary_and_histogram(self, tmp_path, capsys):
        out = tmp_path / "hist.csv"
        code = cli.main(["traj", "--gamma", "1", "--omega", "1",
                         "--alpha", "0", "--t", "5", "--dt", "1e-3",
                         "--ntraj", "150", "--seed", "4", "--s", "0,0.1",
                         "--out", str(out)])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["n_traj"] == 150
        assert summary["k_hat"] > 0.0
        assert summary["se_k"] > 0.0
        assert len(summary["biased"]) == 2
        assert summary["biased"][0]["ess"] == pytest.approx(150.0)
        lines = out.read_text().splitlines()
        assert lines[0] == "K,count"
        total = sum(int(line.split(",")[1]) for line in lines[1:])
        assert total == 150

    def test_deterministic_given_seed(self, tmp_path, capsys):
        args = ["traj", "--t", "2", "--dt", "1e-3", "--ntraj", "50",
                "--seed", "10"]
        out1, out2 = tmp_path / "h1.csv", tmp_path / "h2.csv"
        assert cli.main(args + ["--out", str(out1)]) == 0
        first = capsys.readouterr().out
        assert cli.main(args + ["--out", str(out2)]) == 0
        second = capsys.readouterr().out
        assert out1.read_bytes() == out2.read_bytes()
        a, b = json.loads(first), json.loads(second)
        a.pop("histogram_path"), b.pop("histogram_path")
        assert a == b


class TestRunPk:
    def test_undriven_decay_rows(self, capsys):
        code = cli.main(["pk", "--gamma", "1", "--omega", "0", "--init", "e",
                         "--t", "1", "--kmax", "3"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "K,P"
        rows = {int(l.split(",")[0]): float(l.split(",")[1]) for l in lines[1:]}
        assert rows[0] == pytest.approx(0.3678794, abs=1e-6)
        assert rows[1] == pytest.approx(0.6321206, abs=1e-6)

    def test_auto_kmax_covers_distribution(self, tmp_path, capsys):
        out = tmp_path / "pk.csv"
        code = cli.main(["pk", "--gamma", "1", "--omega", "1", "--t", "5",
                         "--out", str(out)])
        assert code == 0
        assert capsys.readouterr().err == ""
        rows = out.read_text().splitlines()[1:]
        total = sum(float(r.split(",")[1]) for r in rows)
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_truncation_warning_on_stderr(self, capsys):
        code = cli.main(["pk", "--gamma", "1", "--omega", "1", "--t", "20",
                         "--kmax", "3"])
        assert code == 0
        assert "warning" in capsys.readouterr().err


class TestExitCodes:
    def test_numerical_failure_is_one(self, capsys, tmp_path):
        # unwritable output directory surfaces as a runtime failure
        code = cli.main(["scgf", "--s", "0",
                         "--out", str(tmp_path / "nope" / "x.json")])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_usage_failure_is_two(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["scgf", "--gamma", "not-a-number"])
        assert exc.value.code == 2
