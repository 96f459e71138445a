"""End-to-end tests of the command-line driver."""

import json

import numpy as np
import pytest

from tfse import cli


def read_csv(path):
    rows = []
    header = None
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            continue
        if header is None:
            header = line.split(",")
            continue
        rows.append([float(v) for v in line.split(",")])
    return header, np.array(rows)


class TestMl:
    def test_unit_order_has_zero_decay(self, tmp_path):
        code = cli.main(["ml", "--nu", "1", "--sigma", "1", "--sign",
                         "minus", "--t-grid", "0:6.28:5",
                         "--outdir", str(tmp_path)])
        assert code == 0
        header, rows = read_csv(tmp_path / "ml.csv")
        assert header[:3] == ["t", "re_total", "im_total"]
        assert np.abs(rows[:, 5:]).max() == 0.0

    def test_zero_sigma_is_identity(self, tmp_path):
        code = cli.main(["ml", "--nu", "0.5", "--sigma", "0", "--t-grid",
                         "0:4:6", "--outdir", str(tmp_path)])
        assert code == 0
        _, rows = read_csv(tmp_path / "ml.csv")
        assert np.allclose(rows[:, 1], 1.0)
        assert np.abs(rows[:, 2]).max() == 0.0

    def test_decay_value_at_time_zero(self, tmp_path):
        code = cli.main(["ml", "--nu", "0.5", "--sigma", "1", "--sign",
                         "minus", "--t-grid", "0:0:1",
                         "--outdir", str(tmp_path)])
        assert code == 0
        _, rows = read_csv(tmp_path / "ml.csv")
        assert rows[0, 5] == pytest.approx(1.0, abs=1e-10)

    def test_json_mirror_matches_csv(self, tmp_path):
        args = ["ml", "--nu", "0.6", "--sigma", "1.5", "--t-grid", "0:2:5"]
        csv_dir, json_dir = tmp_path / "c", tmp_path / "j"
        assert cli.main(args + ["--outdir", str(csv_dir)]) == 0
        assert cli.main(args + ["--format", "json",
                                "--outdir", str(json_dir)]) == 0
        _, rows = read_csv(csv_dir / "ml.csv")
        payload = json.loads((json_dir / "ml.json").read_text())
        assert np.array_equal(np.array(payload["rows"]), rows)

    def test_manifest_written_with_checksums(self, tmp_path):
        cli.main(["ml", "--nu", "0.5", "--sigma", "1", "--t-grid", "0:1:3",
                  "--outdir", str(tmp_path)])
        manifest = json.loads((tmp_path / "ml_manifest.json").read_text())
        assert manifest["command"] == "ml"
        assert manifest["parameters"]["nu"] == 0.5
        assert "ml.csv" in manifest["outputs"]
        assert len(manifest["outputs"]["ml.csv"]) == 64

    def test_rerun_is_reproducible(self, tmp_path):
        args = ["ml", "--nu", "0.7", "--sigma", "2", "--t-grid", "0:3:7"]
        a, b = tmp_path / "a", tmp_path / "b"
        cli.main(args + ["--outdir", str(a)])
        cli.main(args + ["--outdir", str(b)])
        ma = json.loads((a / "ml_manifest.json").read_text())
        mb = json.loads((b / "ml_manifest.json").read_text())
        assert ma["outputs"] == mb["outputs"]

    def test_threaded_run_matches_serial(self, tmp_path, monkeypatch):
        args = ["ml", "--nu", "0.5", "--sigma", "1", "--t-grid", "0:2:9"]
        serial, threaded = tmp_path / "s", tmp_path / "t"
        monkeypatch.setenv("TFSE_THREADS", "1")
        cli.main(args + ["--outdir", str(serial)])
        monkeypatch.setenv("TFSE_THREADS", "4")
        cli.main(args + ["--outdir", str(threaded)])
        assert (serial / "ml.csv").read_text() \
            == (threaded / "ml.csv").read_text()

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["ml", "--nu", "0.5", "--t-grid", "oops"])
        assert exc.value.code == 2


class TestWell:
    def test_probability_constant_at_unit_order(self, tmp_path):
        code = cli.main(["well", "--nu", "1", "--emit", "probability",
                         "--t-grid", "0:10:11", "--outdir", str(tmp_path)])
        assert code == 0
        _, rows = read_csv(tmp_path / "well_probability.csv")
        assert np.allclose(rows[:, 1], 1.0, atol=1e-10)

    def test_energy_header_carries_limit(self, tmp_path):
        code = cli.main(["well", "--nu", "0.5", "--emit", "energy",
                         "--t-grid", "1:10:4", "--outdir", str(tmp_path)])
        assert code == 0
        text = (tmp_path / "well_energy.csv").read_text()
        assert "# limit=4" in text

    def test_energy_at_zero_is_numerical_failure(self, tmp_path, capsys):
        code = cli.main(["well", "--nu", "0.5", "--emit", "energy",
                         "--t-grid", "0:10:4", "--outdir", str(tmp_path)])
        assert code == 3
        assert "numerical failure" in capsys.readouterr().err

    def test_continuity_emission(self, tmp_path):
        code = cli.main(["well", "--nu", "0.5", "--emit", "continuity",
                         "--t-grid", "0.5:2:4", "--outdir", str(tmp_path)])
        assert code == 0
        header, rows = read_csv(tmp_path / "well_continuity.csv")
        assert header == ["t", "dpdt", "integrated_source"]
        scale = np.abs(rows[:, 1]).max()
        assert np.abs(rows[:, 1] - rows[:, 2]).max() < 0.02 * scale


class TestFree:
    def test_unit_order_probability_constant(self, tmp_path):
        code = cli.main(["free", "--nu", "1", "--t-grid", "0.5:2:3",
                         "--lambda-grid=-6:6:41",
                         "--outdir", str(tmp_path)])
        assert code == 0
        _, rows = read_csv(tmp_path / "free_probability.csv")
        assert np.allclose(rows[:, 1], 1.0, atol=1e-6)

    def test_split_files_sum_to_snapshot(self, tmp_path):
        code = cli.main(["free", "--nu", "0.5", "--t-grid", "1:1:1",
                         "--lambda-grid=-6:6:41",
                         "--outdir", str(tmp_path)])
        assert code == 0
        _, snap = read_csv(tmp_path / "free_snapshot_t000.csv")
        _, split = read_csv(tmp_path / "free_split_t000.csv")
        assert np.allclose(split[:, 1] + split[:, 3], snap[:, 1], atol=1e-12)
        assert np.allclose(split[:, 2] + split[:, 4], snap[:, 2], atol=1e-12)

    def test_high_order_at_zero_reproduces_packet(self, tmp_path):
        code = cli.main(["free", "--nu", "1.5", "--high-order",
                         "--t-grid", "0:0:1", "--lambda-grid=-6:6:41",
                         "--outdir", str(tmp_path)])
        assert code == 0
        _, rows = read_csv(tmp_path / "free_probability.csv")
        assert rows[0, 1] == pytest.approx(1.0, abs=1e-7)

    def test_near_critical_order_is_numerical_failure(self, tmp_path,
                                                      capsys):
        code = cli.main(["free", "--nu", "1.3334", "--high-order",
                         "--t-grid", "1:1:1", "--lambda-grid=-4:4:21",
                         "--outdir", str(tmp_path)])
        assert code == 3
        assert "4/3" in capsys.readouterr().err


class TestConfigAndVerify:
    def test_config_seeds_flags(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("nu = 0.5\nsigma = 1\nt-grid = 0:1:3\n")
        code = cli.main(["ml", "--config", str(cfg),
                         "--outdir", str(tmp_path)])
        assert code == 0
        manifest = json.loads((tmp_path / "ml_manifest.json").read_text())
        assert manifest["parameters"]["nu"] == 0.5

    def test_explicit_flag_overrides_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("nu=0.5\nsigma=2\nt-grid=0:1:3\n")
        code = cli.main(["ml", "--config", str(cfg), "--sigma", "1",
                         "--outdir", str(tmp_path)])
        assert code == 0
        manifest = json.loads((tmp_path / "ml_manifest.json").read_text())
        assert manifest["parameters"]["sigma"] == 1.0

    def test_verify_quick_specfun(self, capsys):
        code = cli.main(["verify", "--suite", "specfun", "--quick"])
        assert code == 0
        out = capsys.readouterr().out
        assert "pass" in out and "FAIL" not in out

    def test_verify_rejects_unknown_suite(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["verify", "--suite", "nonsense"])
        assert exc.value.code == 2
