import io
import json

import numpy as np
import pandas as pd
import pytest

from mvrank import cli, lds
from mvrank import globaltest as globaltest_module
from mvrank.core import parse_dataset


def _run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def dataset(tmp_path):
    path = tmp_path / "trial.csv"
    rows = ["arm,a,b"]
    rows += [f"x,{i * 0.37 % 1:.3f},{i * 0.61 % 1:.3f}" for i in range(1, 11)]
    rows += [f"y,{3 + i * 0.43 % 1:.3f},{3 + i * 0.29 % 1:.3f}" for i in range(1, 11)]
    path.write_text("\n".join(rows) + "\n")
    return path


# ---------------------------------------------------------------------------
# lds
# ---------------------------------------------------------------------------

class TestLdsCommand:
    def test_prints_points(self, capsys):
        code, out, _ = _run(capsys, "lds", "--kind", "halton", "--n", "2", "--d", "2")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "u1,u2"
        assert [float(v) for v in lines[1].split(",")] == pytest.approx([0.5, 1 / 3])
        assert len(lines) == 3

    def test_csv_reads_back(self, capsys):
        _, out, _ = _run(capsys, "lds", "--kind", "sobol", "--n", "8", "--d", "3")
        frame = pd.read_csv(io.StringIO(out), float_precision="round_trip")
        assert list(frame.columns) == ["u1", "u2", "u3"]
        np.testing.assert_array_equal(frame.to_numpy(), lds.sobol(8, 3).points)

    def test_dimension_error(self, capsys):
        code, _, err = _run(capsys, "lds", "--kind", "halton", "--n", "2", "--d", "100")
        assert code == 2
        assert json.loads(err.strip().splitlines()[-1])["error"] == "PointSetError"

    def test_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["lds", "--kind", "faure", "--n", "2", "--d", "2"])
        assert exc.value.code == 2


# ---------------------------------------------------------------------------
# test
# ---------------------------------------------------------------------------

class TestTestCommand:
    def test_rank_energy(self, capsys, dataset):
        code, out, _ = _run(capsys, "test", "--data", str(dataset))
        assert code == 0
        payload = json.loads(out)
        assert payload["method"] == "rank-energy"
        assert payload["reject"] is True
        assert payload["threshold"] == 1.12

    def test_baseline(self, capsys, dataset):
        code, out, _ = _run(capsys, "test", "--data", str(dataset), "--method", "fs", "--permutations", "199")
        assert code == 0
        assert json.loads(out)["p_value"] <= 0.05

    def test_fresh_calibration(self, capsys, dataset, tmp_path):
        cache = tmp_path / "cache.json"
        code, out, _ = _run(
            capsys, "test", "--data", str(dataset), "--calibrate", "runs=100,seed=3", "--cache", str(cache)
        )
        assert code == 0
        assert json.loads(out)["meta"]["threshold_source"] == "calibration"
        assert cache.exists()

    def test_bad_calibrate_option(self, capsys, dataset):
        code, _, err = _run(capsys, "test", "--data", str(dataset), "--calibrate", "runs=many")
        assert code == 2
        assert "ParameterError" in err

    def test_dataset_error_reports_location(self, capsys, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("arm,a\nx,1\nq,2\n")
        code, _, err = _run(capsys, "test", "--data", str(path))
        report = json.loads(err.strip().splitlines()[-1])
        assert code == 2
        assert (report["row"], report["column"]) == (3, "arm")

    def test_unknown_method(self, capsys, dataset):
        code, _, err = _run(capsys, "test", "--data", str(dataset), "--method", "win-ratio")
        assert code == 2
        assert "InvalidMethodError" in err

    def test_plugin_method(self, capsys, dataset, tmp_path, monkeypatch):
        monkeypatch.setattr(globaltest_module, "_METHODS", dict(globaltest_module._METHODS))
        plugin = tmp_path / "always.py"
        plugin.write_text(
            "from mvrank import BaseMethod, TestOutcome\n"
            "\n"
            "class Always(BaseMethod):\n"
            "    def get_name(self):\n"
            "        return 'always'\n"
            "\n"
            "    def handles_survival(self):\n"
            "        return False\n"
            "\n"
            "    def run(self, data, *, seed=0):\n"
            "        return TestOutcome(statistic=0.0, threshold=0.0, reject=True, method='always', alpha=self.alpha)\n"
        )
        code, out, _ = _run(capsys, "--plugin", str(plugin), "test", "--data", str(dataset), "--method", "always")
        assert code == 0
        assert json.loads(out)["method"] == "always"

    def test_missing_plugin(self, capsys, dataset, tmp_path):
        code, _, err = _run(capsys, "--plugin", str(tmp_path / "absent.py"), "test", "--data", str(dataset))
        assert code == 2
        assert json.loads(err.strip().splitlines()[-1])["error"] == "InvalidMethodError"

    def test_os_error_is_reported(self, capsys, dataset, monkeypatch):
        def _denied(*args, **kwargs):
            raise PermissionError("permission denied")

        monkeypatch.setattr(cli, "parse_dataset", _denied)
        code, _, err = _run(capsys, "test", "--data", str(dataset))
        assert code == 2
        assert json.loads(err.strip().splitlines()[-1]) == {"error": "PermissionError", "message": "permission denied"}


# ---------------------------------------------------------------------------
# calibrate / simulate
# ---------------------------------------------------------------------------

class TestCalibrateCommand:
    def test_writes_cache(self, capsys, tmp_path):
        cache = tmp_path / "cache.json"
        argv = ["calibrate", "--m", "8", "--n", "8", "--d", "2", "--alpha", "0.1", "--runs", "100",
                "--seed", "1", "--cache", str(cache)]
        code, out, _ = _run(capsys, *argv)
        assert code == 0
        first = json.loads(out)
        assert first["alpha"] == 0.1
        assert len(json.loads(cache.read_text())) == 1
        _, again, _ = _run(capsys, *argv)
        assert json.loads(again) == first


class TestSimulateCommand:
    def test_gen(self, capsys, tmp_path):
        out_path = tmp_path / "s3.csv"
        code, out, _ = _run(
            capsys, "simulate", "gen", "--scenario", "3", "--m", "5", "--n", "6", "--r", "0.5", "--seed", "2",
            "--out", str(out_path),
        )
        assert code == 0
        payload = json.loads(out)
        data = parse_dataset(out_path, payload["schema"])
        assert (data.m, data.n, data.d) == (5, 6, 6)
        assert data.has_survival

    def test_gen_into_missing_directory(self, capsys, tmp_path):
        out_path = tmp_path / "absent" / "s1.csv"
        code, _, err = _run(
            capsys, "simulate", "gen", "--scenario", "1", "--r", "1", "--seed", "0", "--out", str(out_path)
        )
        report = json.loads(err.strip().splitlines()[-1])
        assert code == 2
        assert report["error"] == "OutputError"
        assert report["path"] == str(out_path)

    def test_run(self, capsys, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({
            "scenario": 1, "r_values": [1.0], "methods": ["obrien"], "replications": 3, "m": 8, "n": 8,
        }))
        out_path = tmp_path / "results.csv"
        code, _, _ = _run(capsys, "simulate", "run", "--spec", str(spec), "--out", str(out_path))
        assert code == 0
        assert len(out_path.read_text().splitlines()) == 2
        assert (tmp_path / "results.json").exists()

    def test_run_without_output(self, capsys, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"scenario": 1}))
        code, _, err = _run(capsys, "simulate", "run", "--spec", str(spec))
        assert code == 2
        assert "--out" in err

    def test_bad_spec_key(self, capsys, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"scenario": 1, "colour": "red"}))
        code, _, err = _run(capsys, "simulate", "run", "--spec", str(spec), "--out", str(tmp_path / "r.csv"))
        assert code == 2
        assert "colour" in err
