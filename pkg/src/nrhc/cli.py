"""Command-line front end: run simulations, validate configs, write traces.

Config files are JSON objects; matrices are given either as a diagonal
list (``[1, 0.5, 0.1]``) or as full row-major nested lists. Unknown keys
are rejected. The two built-in presets reproduce the benchmark constants
without a file. Traces are written as CSV with full double precision; the
column layout (3n + 3p + 3 columns) is:

    t, x_1..x_n, y_1..y_n, e_1..e_n,
    theta_hat_1..p, theta_true_1..p, theta_err_1..p, F_norm, cost

The default output directory is taken from $NRHC_OUT_DIR when set.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .errors import ConfigError, NumericalBlowup, SingularHessian
from .estimator import (DEFAULT_T_END, EstimatorConfig, TraceRecord, run,
                        tail_metrics)
from .hamiltonian import CostWeights
from .model import get_model, model_names

_CONFIG_KEYS = frozenset({
    "model", "Q", "R", "A_s", "T_f", "alpha", "dt", "N", "t_end",
    "x0", "y0", "lambda0", "drive_mode",
})

_PRESETS = {
    "example1": {
        "model": "lorenz",
        "Q": [1.0, 0.5, 0.1],
        "R": [0.02, 0.02],
        "A_s": [50.0, 50.0, 50.0],
        "T_f": 0.1,
        "alpha": 0.01,
        "dt": 0.01,
        "N": 20,
        "t_end": 20.0,
        "x0": [-3.0, -3.0, 15.0],
        "y0": [-6.0, -6.0, 22.0],
        "lambda0": [0.0, 0.0, 0.0],
        "drive_mode": "hold",
    },
    "example2": {
        "model": "guay",
        "Q": [100.0, 110.0],
        "R": [0.1, 0.2],
        "A_s": [10.0, 10.0],
        "T_f": 0.1,
        "alpha": 0.01,
        "dt": 0.01,
        "N": 20,
        "t_end": 60.0,
        "x0": [0.0, 0.0],
        "y0": [1.0, 2.0],
        "lambda0": [0.0, 0.0],
        "drive_mode": "hold",
    },
}


def _as_matrix(key: str, value) -> np.ndarray:
    """Diagonal list or full nested rows -> square matrix."""
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: not a numeric array") from None
    if arr.ndim == 1:
        return np.diag(arr)
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
        return arr
    raise ConfigError(
        f"{key}: expected a diagonal list or square row-major array, got shape {arr.shape}"
    )


def _as_vector(key: str, value) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: not a numeric array") from None
    if arr.ndim != 1:
        raise ConfigError(f"{key}: expected a flat list, got shape {arr.shape}")
    return arr


def config_from_dict(raw: dict) -> EstimatorConfig:
    unknown = set(raw) - set(_CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("model", "Q", "R", "A_s", "x0", "y0"):
        if key not in raw:
            raise ConfigError(f"{key}: required key missing")
    model_name = raw["model"]
    try:
        model = get_model(model_name)
    except KeyError:
        raise ConfigError(
            f"model: unknown model {model_name!r} (known: {model_names()})"
        ) from None
    try:
        w = CostWeights(Q=_as_matrix("Q", raw["Q"]), R=_as_matrix("R", raw["R"]))
    except ValueError as exc:
        raise ConfigError(f"Q/R: {exc}") from None
    x0 = _as_vector("x0", raw["x0"])
    y0 = _as_vector("y0", raw["y0"])
    lambda0 = _as_vector("lambda0", raw.get("lambda0", [0.0] * model.n))
    cfg = EstimatorConfig(
        model_name=model_name,
        w=w,
        T_f=float(raw.get("T_f", 0.1)),
        alpha=float(raw.get("alpha", 0.01)),
        A_s=_as_matrix("A_s", raw["A_s"]),
        dt=float(raw.get("dt", 0.01)),
        N=int(raw.get("N", 20)),
        t_end=float(raw.get("t_end", DEFAULT_T_END.get(model_name, 20.0))),
        x0=x0,
        y0=y0,
        lambda0=lambda0,
        drive_mode=str(raw.get("drive_mode", "hold")),
    )
    cfg.validate(model)
    return cfg


def preset_config(name: str) -> EstimatorConfig:
    if name not in _PRESETS:
        raise ConfigError(f"preset: unknown preset {name!r} (known: {sorted(_PRESETS)})")
    return config_from_dict(_PRESETS[name])


def load_config(path: str | Path) -> EstimatorConfig:
    """Parse and validate a JSON run configuration."""
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"parse error in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return config_from_dict(raw)


def config_to_dict(cfg: EstimatorConfig) -> dict:
    """Inverse of config_from_dict, suitable for JSON dumping."""
    def matrix_out(M: np.ndarray):
        if np.array_equal(M, np.diag(np.diagonal(M))):
            return list(np.diagonal(M))
        return [list(row) for row in M]

    return {
        "model": cfg.model_name,
        "Q": matrix_out(cfg.w.Q),
        "R": matrix_out(cfg.w.R),
        "A_s": matrix_out(cfg.A_s),
        "T_f": cfg.T_f,
        "alpha": cfg.alpha,
        "dt": cfg.dt,
        "N": cfg.N,
        "t_end": cfg.t_end,
        "x0": list(cfg.x0),
        "y0": list(cfg.y0),
        "lambda0": list(cfg.lambda0),
        "drive_mode": cfg.drive_mode,
    }


def trace_header(n: int, p: int) -> list[str]:
    cols = ["t"]
    cols += [f"x_{i+1}" for i in range(n)]
    cols += [f"y_{i+1}" for i in range(n)]
    cols += [f"e_{i+1}" for i in range(n)]
    cols += [f"theta_hat_{j+1}" for j in range(p)]
    cols += [f"theta_true_{j+1}" for j in range(p)]
    cols += [f"theta_err_{j+1}" for j in range(p)]
    cols += ["F_norm", "cost"]
    return cols


def write_trace(trace: list[TraceRecord], path: str | Path, n: int, p: int) -> None:
    """Write the trace as CSV with 17 significant digits."""
    path = Path(path)
    lines = [",".join(trace_header(n, p))]
    for r in trace:
        vals = ([r.t] + list(r.x) + list(r.y) + list(r.e)
                + list(r.theta_hat) + list(r.theta_true) + list(r.theta_err)
                + [r.F_norm, r.cost])
        lines.append(",".join(f"{v:.17g}" for v in vals))
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write trace to {path}: {exc}") from exc


def read_trace(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Read a trace CSV back as (header, rows)."""
    lines = Path(path).read_text().strip().split("\n")
    header = lines[0].split(",")
    if len(lines) == 1:
        return header, np.empty((0, len(header)))
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return header, data


def _default_out_dir() -> Path:
    return Path(os.environ.get("NRHC_OUT_DIR", "."))


def _print_metrics(trace, t_end: float, t_from: float | None) -> None:
    if not trace:
        print("records=0")
        return
    if t_from is None:
        t_from = 5.0 if t_end > 5.0 else t_end / 2.0
    m = tail_metrics(trace, t_from)
    print(f"records={len(trace)}")
    print(f"t_from={m.t_from:g}")
    print(f"t_end={m.t_end:g}")
    print(f"e_rms={m.e_rms:.6g}")
    print(f"e_max={m.e_max:.6g}")
    for j, (rms, mx) in enumerate(zip(m.theta_err_rms, m.theta_err_max)):
        print(f"theta_err_rms_{j+1}={rms:.6g}")
        print(f"theta_err_max_{j+1}={mx:.6g}")
    print(f"F_norm_max={m.F_norm_max:.6g}")
    print(f"F_norm_end={trace[-1].F_norm:.6g}")
    print(f"e_end={float(np.linalg.norm(trace[-1].e)):.6g}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nrhc",
        description="Receding-horizon parameter estimation for drive-response systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a simulation and write the trace CSV")
    src = p_run.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(_PRESETS))
    src.add_argument("--config", type=Path)
    p_run.add_argument("--out", type=Path, help="trace CSV path")
    p_run.add_argument("--t-end", type=float, default=None)
    p_run.add_argument("--drive-mode", choices=["hold", "predict"], default=None)
    p_run.add_argument("--metrics-from", type=float, default=None,
                       help="start of the metrics tail window (default 5 s)")

    p_val = sub.add_parser("validate", help="check a config file")
    p_val.add_argument("--config", type=Path, required=True)

    sub.add_parser("presets", help="list built-in presets")

    p_dump = sub.add_parser("dump-config", help="write a preset as a config file")
    p_dump.add_argument("--preset", choices=sorted(_PRESETS), required=True)
    p_dump.add_argument("--out", type=Path, required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "presets":
        for name in sorted(_PRESETS):
            cfg = _PRESETS[name]
            print(f"{name}: model={cfg['model']} t_end={cfg['t_end']}")
        return 0

    if args.command == "validate":
        try:
            load_config(args.config)
        except (ConfigError, OSError) as exc:
            print(f"invalid config: {exc}", file=sys.stderr)
            return 1
        print("ok")
        return 0

    if args.command == "dump-config":
        try:
            cfg = preset_config(args.preset)
        except ConfigError as exc:
            print(str(exc), file=sys.stderr)
            return 1
        args.out.write_text(json.dumps(config_to_dict(cfg), indent=2) + "\n")
        print(f"wrote {args.out}")
        return 0

    # run
    try:
        if args.preset:
            cfg = preset_config(args.preset)
            stem = args.preset
        else:
            cfg = load_config(args.config)
            stem = args.config.stem
        if args.t_end is not None:
            cfg.t_end = args.t_end
        if args.drive_mode is not None:
            cfg.drive_mode = args.drive_mode
        cfg.validate()
    except (ConfigError, OSError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 1

    model = get_model(cfg.model_name)
    out_path = args.out or (_default_out_dir() / f"{stem}_trace.csv")
    t0 = time.perf_counter()
    try:
        trace = run(cfg, model)
    except (NumericalBlowup, SingularHessian) as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        partial = getattr(exc, "trace", [])
        if partial:
            write_trace(partial, out_path, model.n, model.p)
            print(f"partial trace ({len(partial)} records) written to {out_path}",
                  file=sys.stderr)
        return 1
    elapsed = time.perf_counter() - t0
    write_trace(trace, out_path, model.n, model.p)
    print(f"trace={out_path}")
    print(f"wall_seconds={elapsed:.3f}")
    _print_metrics(trace, cfg.t_end, args.metrics_from)
    return 0


if __name__ == "__main__":
    sys.exit(main())
