"""Static SVG figures of reconstructions and error histories."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

from matplotlib.figure import Figure  # noqa: E402

from ..config import config  # noqa: E402
from ..inversion.experiment import ExampleReport, NoiseRun  # noqa: E402

logger = logging.getLogger(__name__)

_RC = {"svg.fonttype": "path", "font.size": 9}


def _save(fig: Figure, path: Path) -> Path:
    with matplotlib.rc_context({**_RC, "svg.hashsalt": config.svg_salt}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    logger.info("wrote %s", path)
    return path


def _label(run: NoiseRun) -> str:
    return f"p = {100 * run.noise_level:g}%, seed {run.seed}"


def plot_reconstruction(path: Path, report: ExampleReport, run: NoiseRun) -> Path:
    """Exact source against the recovered one for one run."""
    x = report.space.nodes
    fig = Figure(figsize=(5.0, 3.5))
    ax = fig.subplots()
    ax.plot(x, report.f_true, color="black", label="exact f")
    ax.plot(x, run.result.solution, color="tab:red", linestyle="--", label="recovered f")
    ax.set_xlabel("x")
    ax.set_ylabel("f(x)")
    ax.set_title(f"Example {report.example}, {_label(run)}")
    ax.legend(loc="best")
    fig.tight_layout()
    return _save(fig, path)


def plot_error_history(path: Path, report: ExampleReport, runs: Sequence[NoiseRun]) -> Path:
    """E(k) (and e(k)) against k for every run, on a log scale."""
    fig = Figure(figsize=(5.0, 3.5))
    ax_E, ax_e = fig.subplots(1, 2, sharex=True)
    for run in runs:
        ks = [rec.k for rec in run.result.records]
        E = [rec.acc_error for rec in run.result.records]
        e = [rec.conv_error for rec in run.result.records]
        ax_E.plot(ks, E, marker=".", label=_label(run))
        ax_e.plot(ks, [v if v and v > 0 else float("nan") for v in e], marker=".")
    ax_E.set_yscale("log")
    ax_e.set_yscale("log")
    ax_E.set_xlabel("k")
    ax_e.set_xlabel("k")
    ax_E.set_title("E(k)")
    ax_e.set_title("e(k)")
    ax_E.legend(loc="best", fontsize=6)
    fig.suptitle(f"Example {report.example}")
    fig.tight_layout()
    return _save(fig, path)
