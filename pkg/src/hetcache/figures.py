"""Figure rendering for experiment reports.

Figures are a presentation layer only: rows.csv stays the interchange
surface, and skipping rendering never changes the report. Everything is
drawn with the Agg backend so runs stay headless.
"""
from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _col(report, name):
    idx = report.columns.index(name)
    return [row[idx] for row in report.rows]


def _save(fig, out_dir, name) -> Path:
    fig_dir = Path(out_dir) / "figures"
    fig_dir.mkdir(parents=True, exist_ok=True)
    path = fig_dir / f"{name}.png"
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def _plot_validate_theorem1(report, out_dir):
    names = _col(report, "strategy")
    closed = _col(report, "closed_form")
    mc = _col(report, "mc_mean")
    stderr = _col(report, "mc_stderr")
    x = range(len(names))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(
        x, mc, yerr=[3 * s for s in stderr], fmt="o", capsize=4, label="Monte Carlo (±3 s.e.)"
    )
    ax.scatter(x, closed, marker="x", s=70, color="crimson", zorder=3, label="closed form")
    ax.set_xticks(list(x))
    ax.set_xticklabels(names, rotation=15)
    ax.set_ylabel("offloading loss")
    ax.set_title("Closed form vs Monte Carlo")
    ax.legend()
    return [_save(fig, out_dir, "validate_theorem1")]


def _plot_waiting_time(report, out_dir):
    taus = _col(report, "tau")
    median = _col(report, "gap_median")
    p90 = _col(report, "gap_p90")
    bound = report.summary.get("bound_target", {})
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(taus, median, "o-", label="median gap")
    ax.plot(taus, p90, "s--", label="p90 gap")
    epsilon = report.metadata["spec"].get("epsilon")
    if epsilon is not None:
        ax.axhline(epsilon, color="gray", linestyle=":", label="epsilon")
    value = bound.get("value")
    if isinstance(value, (int, float)) and math.isfinite(value):
        ax.axvline(value, color="crimson", linestyle="--", label="waiting-time bound")
    ax.set_xlabel("observation window tau")
    ax.set_ylabel("loss gap")
    ax.set_title("Estimate-then-optimize gap vs window")
    ax.legend()
    return [_save(fig, out_dir, "waiting_time")]


def _plot_tl_comparison(report, out_dir):
    ms = _col(report, "m")
    tl = _col(report, "tl_gap_median")
    target = _col(report, "target_gap_median")
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ms, tl, "o-", label="TL median gap")
    ax.plot(ms, target, "s--", label="target-only median gap")
    m_min = report.summary.get("m_min")
    if isinstance(m_min, (int, float)) and math.isfinite(m_min):
        ax.axvline(m_min, color="crimson", linestyle=":", label="m_min")
    if all(m > 0 for m in ms):
        ax.set_xscale("log")
    ax.set_xlabel("source samples m")
    ax.set_ylabel("loss gap")
    ax.set_title("Transfer learning vs target-only")
    ax.legend()
    return [_save(fig, out_dir, "tl_compare")]


def _plot_optimize(report, out_dir):
    names = []
    for name in _col(report, "strategy"):
        if name not in names:
            names.append(name)
    index = _col(report, "file_index")
    n = max(index)
    fig, ax = plt.subplots(figsize=(6, 4))
    width = 0.8 / (len(names) + 1)
    files = list(range(1, n + 1))
    p = _col(report, "p_i")[:n]
    ax.bar([f - 0.4 for f in files], p, width=width, label="popularity", color="black")
    for k, name in enumerate(names):
        pis = [
            row[report.columns.index("pi_i")]
            for row in report.rows
            if row[report.columns.index("strategy")] == name
        ]
        ax.bar([f - 0.4 + (k + 1) * width for f in files], pis, width=width, label=name)
    ax.set_xlabel("file index")
    ax.set_ylabel("probability")
    ax.set_title("Caching strategies vs popularity")
    ax.legend()
    return [_save(fig, out_dir, "strategy")]


def _plot_bounds(report, out_dir):
    lam = _col(report, "lambda_u")
    if len(lam) < 2:
        return []
    def finite(values):
        return [v if isinstance(v, (int, float)) and math.isfinite(v) else math.nan for v in values]

    order = sorted(range(len(lam)), key=lambda i: lam[i])
    lam_sorted = [lam[i] for i in order]
    target = finite([_col(report, "bound_target")[i] for i in order])
    tl = finite([_col(report, "bound_tl")[i] for i in order])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(lam_sorted, target, "o-", label="target-only bound")
    if any(isinstance(v, float) and math.isfinite(v) for v in tl):
        ax.plot(lam_sorted, tl, "s--", label="TL bound")
    ax.set_xlabel("user density lambda_u")
    ax.set_ylabel("waiting-time bound")
    ax.set_yscale("log")
    ax.set_title("Waiting-time bounds vs user density")
    ax.legend()
    return [_save(fig, out_dir, "bounds")]


_PLOTTERS = {
    "validate_theorem1": _plot_validate_theorem1,
    "waiting_time_sweep": _plot_waiting_time,
    "tl_comparison": _plot_tl_comparison,
    "optimize": _plot_optimize,
    "bounds": _plot_bounds,
}


def render_report(report, out_dir) -> list:
    """Render the figures for `report` under out_dir/figures; returns paths."""
    plotter = _PLOTTERS.get(report.kind)
    if plotter is None or not report.rows:
        return []
    return plotter(report, out_dir)
