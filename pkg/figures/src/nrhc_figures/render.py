"""Render figures from estimator trace CSVs.

The trace schema is the estimator CLI's documented CSV layout:

    t, x_1..x_n, y_1..y_n, e_1..e_n,
    theta_hat_1..p, theta_true_1..p, theta_err_1..p, F_norm, cost

Columns are selected strictly by header name, so reordered columns render
identically. Rendering never modifies the trace file.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("states", "parameters", "errors")


class SchemaError(ValueError):
    """Raised when the trace is missing a required column."""


@dataclass
class FigureSpec:
    trace_path: str | Path
    kind: str
    out_path: str | Path
    # line styles: the response/estimate curve is solid, the reference
    # (drive state or true parameter) dashed
    solid_style: str = "-"
    dashed_style: str = "--"
    include_error_norm: bool = True
    dpi: int = 150


def _load(trace_path) -> dict[str, np.ndarray]:
    lines = Path(trace_path).read_text().strip().split("\n")
    header = lines[0].split(",")
    if len(lines) < 2:
        raise ValueError(f"{trace_path}: trace has no data rows")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return {name: data[:, i] for i, name in enumerate(header)}


def _column(cols: dict[str, np.ndarray], name: str) -> np.ndarray:
    try:
        return cols[name]
    except KeyError:
        raise SchemaError(f"trace is missing required column {name!r}") from None


def _group_size(cols: dict[str, np.ndarray], prefix: str) -> int:
    k = 0
    while f"{prefix}_{k + 1}" in cols:
        k += 1
    if k == 0:
        raise SchemaError(f"trace has no {prefix}_1 column")
    return k


def render(spec: FigureSpec):
    """Render one figure and write it to spec.out_path; returns the Figure."""
    if spec.kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {spec.kind!r}")
    cols = _load(spec.trace_path)
    t = _column(cols, "t")

    if spec.kind == "states":
        n = _group_size(cols, "x")
        fig, axes = plt.subplots(n, 1, figsize=(8.0, 2.2 * n), sharex=True)
        axes = np.atleast_1d(axes)
        for i, ax in enumerate(axes, start=1):
            ax.plot(t, _column(cols, f"x_{i}"), spec.dashed_style,
                    color="tab:gray", label=f"drive x{i}")
            ax.plot(t, _column(cols, f"y_{i}"), spec.solid_style,
                    color="tab:blue", label=f"response y{i}")
            ax.set_ylabel(f"state {i}")
            ax.legend(loc="upper right", fontsize=8)
    elif spec.kind == "parameters":
        p = _group_size(cols, "theta_hat")
        fig, axes = plt.subplots(p, 1, figsize=(8.0, 2.4 * p), sharex=True)
        axes = np.atleast_1d(axes)
        for j, ax in enumerate(axes, start=1):
            ax.plot(t, _column(cols, f"theta_true_{j}"), spec.dashed_style,
                    color="tab:gray", label=f"true theta{j}")
            ax.plot(t, _column(cols, f"theta_hat_{j}"), spec.solid_style,
                    color="tab:red", label=f"estimate theta{j}")
            ax.set_ylabel(f"theta {j}")
            ax.legend(loc="upper right", fontsize=8)
    else:  # errors
        p = _group_size(cols, "theta_err")
        rows = p + (1 if spec.include_error_norm else 0)
        fig, axes = plt.subplots(rows, 1, figsize=(8.0, 2.2 * rows), sharex=True)
        axes = np.atleast_1d(axes)
        for j in range(1, p + 1):
            ax = axes[j - 1]
            ax.plot(t, np.zeros_like(t), spec.dashed_style, color="tab:gray")
            ax.plot(t, _column(cols, f"theta_err_{j}"), spec.solid_style,
                    color="tab:red", label=f"estimation error {j}")
            ax.set_ylabel(f"err theta {j}")
            ax.legend(loc="upper right", fontsize=8)
        if spec.include_error_norm:
            n = _group_size(cols, "e")
            e = np.sqrt(sum(_column(cols, f"e_{i}") ** 2 for i in range(1, n + 1)))
            ax = axes[-1]
            ax.plot(t, np.zeros_like(t), spec.dashed_style, color="tab:gray")
            ax.plot(t, e, spec.solid_style, color="tab:blue",
                    label="sync error norm")
            ax.set_ylabel("|e|")
            ax.legend(loc="upper right", fontsize=8)

    axes[-1].set_xlabel("t [s]")
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=spec.dpi)
    plt.close(fig)
    return fig
