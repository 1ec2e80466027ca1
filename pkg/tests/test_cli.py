"""End-to-end tests of the `wave-isp` command line, run in-process."""
import json

import numpy as np
import pytest

from src.cli import build_parser, main
from src.cli.tables import read_table
from src.errors import SolverBlowUpError


def _run(capsys, *argv):
    code = main([str(arg) for arg in argv])
    return code, capsys.readouterr().err


class TestParser:
    def test_help(self, capsys):
        assert main(["--help"]) == 0
        assert "wave-isp" in capsys.readouterr().out

    def test_subcommands(self):
        parser = build_parser()
        args = parser.parse_args(["example", "2", "--noise", "1,3,5", "--fine-data"])
        assert args.n == 2
        assert args.noise == [1.0, 3.0, 5.0]
        assert args.fine_data

    def test_unknown_example(self, capsys, tmp_path):
        code, _ = _run(capsys, "example", "4", "--out", tmp_path)
        assert code == 2

    def test_bad_noise_list(self, capsys, tmp_path):
        code, _ = _run(capsys, "example", "1", "--noise", "1,x", "--out", tmp_path)
        assert code == 2


class TestForward:
    def test_zero_source(self, capsys, tmp_path, write_config):
        cfg = write_config("[grid]\nnx = 20\n[source]\nkind = zero\n")
        code, err = _run(capsys, "forward", cfg, "--out", tmp_path / "out")
        assert code == 0, err
        terminal = read_table(tmp_path / "out" / "terminal.csv")
        assert list(terminal.columns) == ["x", "value"]
        assert np.all(terminal["value"] == 0.0)
        snapshots = read_table(tmp_path / "out" / "snapshots.csv")
        assert snapshots["n"].nunique() == 5

    def test_quadratic_within_tolerance(self, capsys, tmp_path, write_config):
        cfg = write_config("[grid]\nnx = 40\nT = 2\n[source]\nkind = quadratic\n")
        code, err = _run(capsys, "forward", cfg, "--out", tmp_path)
        assert code == 0, err
        terminal = read_table(tmp_path / "terminal.csv")
        assert np.all(terminal["error"] <= terminal["tolerance"])
        np.testing.assert_allclose(terminal["exact"], 2.0)

    def test_cosine_within_tolerance(self, capsys, tmp_path, write_config):
        cfg = write_config("[grid]\nnx = 80\ncfl = 0.8\n[source]\nkind = cosine\n")
        code, err = _run(capsys, "forward", cfg, "--out", tmp_path)
        assert code == 0, err
        terminal = read_table(tmp_path / "terminal.csv")
        assert np.all(terminal["error"] <= terminal["tolerance"])

    def test_missing_config(self, capsys, tmp_path):
        missing = tmp_path / "nowhere.ini"
        code, err = _run(capsys, "forward", missing, "--out", tmp_path)
        assert code == 2
        assert str(missing) in err

    def test_unknown_key(self, capsys, tmp_path, write_config):
        cfg = write_config("[grid]\nnx = 20\nspeed = 3\n")
        code, err = _run(capsys, "forward", cfg, "--out", tmp_path)
        assert code == 2
        assert "speed" in err

    def test_cfl_violation(self, capsys, tmp_path, write_config):
        cfg = write_config("[grid]\nnx = 20\n")
        code, err = _run(capsys, "forward", cfg, "--cfl", "1.5", "--out", tmp_path)
        assert code == 4
        assert "courant" in err


class TestGradcheck:
    def test_default_levels_pass(self, capsys, tmp_path, write_config):
        cfg = write_config("[check]\nseed = 1\n")
        code, err = _run(capsys, "gradcheck", cfg, "--out", tmp_path)
        assert code == 0, err
        table = read_table(tmp_path / "gradcheck.csv")
        assert list(table["nx"]) == [50, 100, 200]
        assert float(table.loc[table["nx"] == 100, "rel_error"].iloc[0]) <= 1e-2

    def test_zero_residual(self, capsys, tmp_path, write_config):
        cfg = write_config("[check]\nlevels = 20, 40\nzero_residual = true\n")
        code, err = _run(capsys, "gradcheck", cfg, "--out", tmp_path)
        assert code == 0, err
        assert np.all(read_table(tmp_path / "gradcheck.csv")["adjoint"] == 0.0)

    def test_tolerance_violation_keeps_report(self, capsys, tmp_path, write_config):
        cfg = write_config("[check]\nlevels = 20, 40\ntolerance = 1e-12\n")
        code, err = _run(capsys, "gradcheck", cfg, "--out", tmp_path)
        assert code == 3
        assert "exceeds" in err
        assert (tmp_path / "gradcheck.csv").is_file()


class TestExample:
    def test_noise_free_errors(self, capsys, tmp_path):
        argv = ["example", "1", "--noise", "0", "--max-iter", "5", "--nx", "50"]
        code, err = _run(capsys, *argv, "--out", tmp_path)
        assert code == 0, err
        summary = read_table(tmp_path / "example1_summary.csv").dropna(subset=["E"])
        E = summary["E"].to_numpy()
        assert np.all(np.diff(E) <= 0.0)
        np.testing.assert_allclose(summary["e_prev"].iloc[0], summary["ref_e"].iloc[0], rtol=0.1)
        runs = read_table(tmp_path / "example1_runs.csv")
        assert bool(runs["inverse_crime"].iloc[0])
        assert (tmp_path / "example1_errors.svg").is_file()
        assert (tmp_path / "example1_p0_s0.svg").is_file()
        report = json.loads((tmp_path / "example1_report.json").read_text(encoding="utf-8"))
        assert report["example"] == 1
        assert [record["k"] for record in report["runs"][0]["records"]] == list(range(6))

    def test_outputs_are_reproducible(self, capsys, tmp_path):
        argv = ["example", "2", "--noise", "1,3,5", "--seed", "7", "--max-iter", "5", "--nx", "50"]
        first, second = tmp_path / "a", tmp_path / "b"
        assert _run(capsys, *argv, "--out", first)[0] == 0
        assert _run(capsys, *argv, "--out", second)[0] == 0
        names = sorted(path.name for path in first.iterdir())
        assert names == sorted(path.name for path in second.iterdir())
        assert "example2_p3_s7.svg" in names
        for name in names:
            assert (first / name).read_bytes() == (second / name).read_bytes(), name
        runs = read_table(first / "example2_runs.csv")
        np.testing.assert_allclose(runs["noise_pct"], [1.0, 3.0, 5.0])

    def test_partial_outputs_removed(self, capsys, tmp_path, monkeypatch):
        def broken(*args, **kwargs):
            raise SolverBlowUpError(3)

        monkeypatch.setattr("src.cli.commands.plot_error_history", broken)
        out = tmp_path / "out"
        code, _ = _run(capsys, "example", "3", "--max-iter", "1", "--nx", "20", "--out", out)
        assert code == 4
        assert list(out.iterdir()) == []


class TestInvert:
    @pytest.fixture
    def measured(self, capsys, tmp_path, write_config):
        cfg = write_config("[grid]\nnx = 50\n[source]\nkind = example\nexample = 2\n", "fwd.ini")
        code, err = _run(capsys, "forward", cfg, "--out", tmp_path / "fwd")
        assert code == 0, err
        return tmp_path / "fwd" / "terminal.csv"

    def _config(self, write_config, measurement, nx=50, extra=""):
        return write_config(
            f"[grid]\nnx = {nx}\n[data]\nmeasurement = {measurement}\n{extra}"
            "[optimizer]\nmax_iter = 10\n",
            "inv.ini",
        )

    def test_round_trip(self, capsys, tmp_path, write_config, measured):
        cfg = self._config(write_config, measured)
        code, err = _run(capsys, "invert", cfg, "--out", tmp_path / "inv")
        assert code == 0, err
        log = read_table(tmp_path / "inv" / "iterations.csv")
        assert log["J_eps"].iloc[-1] < 1e-2 * log["J_eps"].iloc[0]
        recovered = read_table(tmp_path / "inv" / "recovered.csv")
        assert len(recovered) == 51

    def test_noise_bound_stops_early(self, capsys, tmp_path, write_config, measured):
        cfg = self._config(write_config, measured, extra="delta = 0.05\n")
        code, err = _run(capsys, "invert", cfg, "--out", tmp_path / "inv")
        assert code == 0, err
        J = read_table(tmp_path / "inv" / "iterations.csv")["J_eps"].to_numpy()
        floor = 0.5 * (1.1 * 0.05) ** 2
        assert J[-1] < floor
        assert np.all(J[:-1] >= floor)

    def test_requires_measurement(self, capsys, tmp_path, write_config):
        code, err = _run(capsys, "invert", write_config("[grid]\nnx = 50\n"), "--out", tmp_path)
        assert code == 2
        assert "measurement" in err

    def test_empty_file(self, capsys, tmp_path, write_config):
        data = tmp_path / "empty.csv"
        data.write_text("", encoding="utf-8")
        code, err = _run(capsys, "invert", self._config(write_config, data), "--out", tmp_path)
        assert code == 2
        assert "empty" in err

    def test_nan_row(self, capsys, tmp_path, write_config):
        x = np.linspace(0.0, 1.0, 51)
        lines = ["x,value"] + [f"{xi:.17g},{'nan' if i == 3 else 0.0}" for i, xi in enumerate(x)]
        data = tmp_path / "nan.csv"
        data.write_text("\n".join(lines) + "\n", encoding="utf-8")
        code, err = _run(capsys, "invert", self._config(write_config, data), "--out", tmp_path)
        assert code == 2
        assert "row 3" in err

    def test_wrong_row_count(self, capsys, tmp_path, write_config, measured):
        cfg = self._config(write_config, measured, nx=40)
        code, err = _run(capsys, "invert", cfg, "--out", tmp_path / "inv")
        assert code == 2
        assert "needs 41" in err

    def test_binary_file(self, capsys, tmp_path, write_config):
        data = tmp_path / "binary.csv"
        data.write_bytes(b"x,value\n0,\xff\x80\n")
        code, err = _run(capsys, "invert", self._config(write_config, data), "--out", tmp_path)
        assert code == 2
        assert "UTF-8" in err

    def test_ragged_rows(self, capsys, tmp_path, write_config):
        data = tmp_path / "ragged.csv"
        data.write_text("x,value\n0,1\n0.5,1,7,9\n", encoding="utf-8")
        code, err = _run(capsys, "invert", self._config(write_config, data), "--out", tmp_path)
        assert code == 2
        assert "malformed" in err
