import json

import numpy as np
import pytest

from nrhc.cli import (config_from_dict, config_to_dict, load_config, main,
                      preset_config, read_trace, trace_header, write_trace)
from nrhc.errors import ConfigError
from nrhc.estimator import TraceRecord


class TestPresets:
    def test_example1_constants(self):
        cfg = preset_config("example1")
        np.testing.assert_array_equal(cfg.w.Q, np.diag([1.0, 0.5, 0.1]))
        np.testing.assert_array_equal(cfg.w.R, np.diag([0.02, 0.02]))
        np.testing.assert_array_equal(cfg.A_s, 50.0 * np.eye(3))
        assert cfg.dt == 0.01
        assert cfg.T_f == 0.1
        assert cfg.alpha == 0.01
        assert cfg.N == 20
        assert cfg.t_end == 20.0
        np.testing.assert_array_equal(cfg.x0, [-3.0, -3.0, 15.0])
        np.testing.assert_array_equal(cfg.y0, [-6.0, -6.0, 22.0])
        np.testing.assert_array_equal(cfg.lambda0, np.zeros(3))
        assert cfg.drive_mode == "hold"

    def test_example2_constants(self):
        cfg = preset_config("example2")
        np.testing.assert_array_equal(cfg.w.Q, np.diag([100.0, 110.0]))
        np.testing.assert_array_equal(cfg.w.R, np.diag([0.1, 0.2]))
        np.testing.assert_array_equal(cfg.A_s, 10.0 * np.eye(2))
        assert cfg.t_end == 60.0
        np.testing.assert_array_equal(cfg.x0, [0.0, 0.0])
        np.testing.assert_array_equal(cfg.y0, [1.0, 2.0])

    def test_unknown_preset(self):
        with pytest.raises(ConfigError, match="preset"):
            preset_config("example3")


class TestLoadConfig:
    def test_roundtrip_through_dump(self, tmp_path):
        for name in ("example1", "example2"):
            cfg = preset_config(name)
            path = tmp_path / f"{name}.json"
            path.write_text(json.dumps(config_to_dict(cfg)))
            loaded = load_config(path)
            assert loaded.model_name == cfg.model_name
            np.testing.assert_array_equal(loaded.w.Q, cfg.w.Q)
            np.testing.assert_array_equal(loaded.w.R, cfg.w.R)
            np.testing.assert_array_equal(loaded.A_s, cfg.A_s)
            assert (loaded.T_f, loaded.alpha, loaded.dt, loaded.N,
                    loaded.t_end, loaded.drive_mode) == \
                   (cfg.T_f, cfg.alpha, cfg.dt, cfg.N, cfg.t_end, cfg.drive_mode)
            np.testing.assert_array_equal(loaded.x0, cfg.x0)
            np.testing.assert_array_equal(loaded.y0, cfg.y0)
            np.testing.assert_array_equal(loaded.lambda0, cfg.lambda0)

    def test_full_matrix_form(self):
        raw = dict(model="guay", Q=[[100.0, 0.0], [0.0, 110.0]],
                   R=[0.1, 0.2], A_s=[10.0, 10.0], x0=[0.0, 0.0], y0=[1.0, 2.0])
        cfg = config_from_dict(raw)
        np.testing.assert_array_equal(cfg.w.Q, np.diag([100.0, 110.0]))

    def test_unknown_key_rejected(self):
        raw = dict(model="guay", Q=[1.0, 1.0], R=[0.1, 0.2],
                   A_s=[10.0, 10.0], x0=[0.0, 0.0], y0=[1.0, 2.0],
                   horizon=0.1)
        with pytest.raises(ConfigError, match="unknown config keys"):
            config_from_dict(raw)

    def test_missing_key_rejected(self):
        with pytest.raises(ConfigError, match="required key missing"):
            config_from_dict(dict(model="guay"))

    def test_semidefinite_R_rejected(self):
        raw = dict(model="lorenz", Q=[1.0, 0.5, 0.1], R=[0.0, 0.02],
                   A_s=[50.0, 50.0, 50.0], x0=[-3.0, -3.0, 15.0],
                   y0=[-6.0, -6.0, 22.0])
        with pytest.raises(ConfigError, match="R"):
            config_from_dict(raw)

    def test_parse_error_has_line_info(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"model": "lorenz",\n  broken\n}')
        with pytest.raises(ConfigError, match="line 2"):
            load_config(path)


class TestTraceCsv:
    def _trace(self, k=3):
        records = []
        for i in range(1, k + 1):
            t = 0.01 * i
            x = np.array([1.0 * i, -2.0, 0.5])
            y = x + np.array([1e-3, 0.0, -1e-3])
            th = np.array([0.1 * i, 2.5])
            tt = np.array([0.0, 8.0 / 3.0])
            records.append(TraceRecord(
                t=t, x=x, y=y, e=y - x, theta_hat=th, theta_true=tt,
                theta_err=th - tt, F_norm=1e-5 * i, cost=0.25 * i))
        return records

    def test_header_layout(self):
        cols = trace_header(3, 2)
        assert cols[0] == "t"
        assert cols[-2:] == ["F_norm", "cost"]
        assert len(cols) == 3 * 3 + 3 * 2 + 3

    def test_empty_trace_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        write_trace([], path, 3, 2)
        text = path.read_text()
        assert text.count("\n") == 1
        header, data = read_trace(path)
        assert header == trace_header(3, 2)
        assert data.shape == (0, 18)

    def test_roundtrip_exact(self, tmp_path):
        path = tmp_path / "one.csv"
        trace = self._trace(1)
        write_trace(trace, path, 3, 2)
        header, data = read_trace(path)
        assert data.shape == (1, 18)
        r = trace[0]
        expected = np.concatenate([[r.t], r.x, r.y, r.e, r.theta_hat,
                                   r.theta_true, r.theta_err,
                                   [r.F_norm, r.cost]])
        np.testing.assert_array_equal(data[0], expected)

    def test_column_count_constant(self, tmp_path):
        path = tmp_path / "many.csv"
        write_trace(self._trace(5), path, 3, 2)
        lines = path.read_text().strip().split("\n")
        widths = {len(line.split(",")) for line in lines}
        assert widths == {18}


class TestMainCommand:
    def test_presets_listing(self, capsys):
        assert main(["presets"]) == 0
        out = capsys.readouterr().out
        assert "example1" in out and "example2" in out

    def test_run_preset_short(self, tmp_path, capsys):
        out_file = tmp_path / "t.csv"
        code = main(["run", "--preset", "example1", "--t-end", "0.2",
                     "--out", str(out_file)])
        assert code == 0
        assert out_file.exists()
        header, data = read_trace(out_file)
        assert data.shape == (20, 18)
        printed = capsys.readouterr().out
        assert "e_rms=" in printed and "records=20" in printed

    def test_run_config_file(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(dict(
            model="guay", Q=[100.0, 110.0], R=[0.1, 0.2], A_s=[10.0, 10.0],
            x0=[0.0, 0.0], y0=[1.0, 2.0], t_end=0.1)))
        out_file = tmp_path / "guay.csv"
        assert main(["run", "--config", str(cfg_path), "--out", str(out_file)]) == 0
        _, data = read_trace(out_file)
        assert data.shape == (10, 3 * 2 + 3 * 2 + 3)  # 3n + 3p + 3 columns

    def test_run_drive_mode_override(self, tmp_path):
        out_file = tmp_path / "p.csv"
        assert main(["run", "--preset", "example1", "--t-end", "0.1",
                     "--drive-mode", "predict", "--out", str(out_file)]) == 0

    def test_validate_ok(self, tmp_path, capsys):
        path = tmp_path / "ok.json"
        path.write_text(json.dumps(dict(
            model="lorenz", Q=[1.0, 0.5, 0.1], R=[0.02, 0.02],
            A_s=[50.0, 50.0, 50.0], x0=[-3.0, -3.0, 15.0], y0=[-6.0, -6.0, 22.0])))
        assert main(["validate", "--config", str(path)]) == 0
        assert "ok" in capsys.readouterr().out

    def test_validate_negative_dt(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(dict(
            model="lorenz", Q=[1.0, 0.5, 0.1], R=[0.02, 0.02],
            A_s=[50.0, 50.0, 50.0], x0=[-3.0, -3.0, 15.0],
            y0=[-6.0, -6.0, 22.0], dt=-0.01)))
        assert main(["validate", "--config", str(path)]) == 1
        assert "dt" in capsys.readouterr().err

    def test_validate_semidefinite_R(self, tmp_path, capsys):
        path = tmp_path / "badR.json"
        path.write_text(json.dumps(dict(
            model="lorenz", Q=[1.0, 0.5, 0.1], R=[0.0, 0.02],
            A_s=[50.0, 50.0, 50.0], x0=[-3.0, -3.0, 15.0],
            y0=[-6.0, -6.0, 22.0])))
        assert main(["validate", "--config", str(path)]) == 1
        assert "R" in capsys.readouterr().err

    def test_dump_config_roundtrip(self, tmp_path):
        out = tmp_path / "dumped.json"
        assert main(["dump-config", "--preset", "example2", "--out", str(out)]) == 0
        loaded = load_config(out)
        ref = preset_config("example2")
        np.testing.assert_array_equal(loaded.w.Q, ref.w.Q)
        assert loaded.t_end == ref.t_end
        assert loaded.drive_mode == ref.drive_mode

    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--preset", "example1", "--frobnicate"])
        assert exc.value.code == 2

    def test_out_dir_env_var(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("NRHC_OUT_DIR", str(tmp_path))
        assert main(["run", "--preset", "example1", "--t-end", "0.05"]) == 0
        assert (tmp_path / "example1_trace.csv").exists()
