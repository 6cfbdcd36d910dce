"""Figure rendering for the batch CLI.

Every report path that emits delimited data can also render a matplotlib
figure next to it: solution-versus-exact snapshots for single runs, log-log
error curves for convergence tables, and amplification landscapes for
stability scans.  All rendering targets files (Agg backend); nothing opens
a window.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .grid import Field


def solution_figure(case, field: Field, t: float, record, path):
    """Plot the final numerical solution against the exact one."""
    grid = field.grid
    fig, ax = plt.subplots(figsize=(6.4, 4.6))
    if grid.dim == 1:
        x = grid.axis_coords(0)
        exact = case.exact(x, t)
        ax.plot(x, exact, "k-", lw=1.2, label="exact")
        ax.plot(x, field.interior, "r--", lw=1.0, label=f"{record.scheme} scheme")
        ax.set_xlabel("x")
        ax.set_ylabel("solution")
    else:
        x = grid.axis_coords(0)
        y = grid.axis_coords(1)
        X, Y = np.meshgrid(x, y, indexing="ij")
        exact = case.exact(X, Y, t)
        levels = np.linspace(exact.min(), exact.max(), 11)[1:-1]
        ax.contour(X, Y, exact, levels=levels, colors="k", linewidths=1.0)
        cs = ax.contour(
            X, Y, field.interior, levels=levels, colors="r", linestyles="dashed", linewidths=0.9
        )
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.plot([], [], "k-", label="exact")
        ax.plot([], [], "r--", label=f"{record.scheme} scheme")
    ax.legend(loc="best", fontsize=9)
    ax.set_title(
        f"{record.case_id}, I={record.I}, N={record.N}, t={t:.4g}, "
        f"E={record.error:.4g}"
    )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def eoc_figure(records, case, path):
    """Log-log error-versus-h plot with reference slopes."""
    fig, ax = plt.subplots(figsize=(5.6, 4.4))
    span = case.bounds[0][1] - case.bounds[0][0]
    hs = np.array([span / r.I for r in records])
    errs = np.array([r.error for r in records])
    ax.loglog(hs, errs, "o-", label=f"{records[0].scheme} scheme")
    if len(records) >= 2 and errs.min() > 0:
        slope = math.log(errs[0] / errs[-1]) / math.log(hs[0] / hs[-1])
        for p in sorted({1, 2, 3} | {round(slope)}):
            ref = errs[-1] * (hs / hs[-1]) ** p
            ax.loglog(hs, ref, ":", lw=0.8, label=f"slope {p}")
    ax.set_xlabel("h")
    ax.set_ylabel("error")
    ax.set_title(f"{case.id}: convergence under simultaneous h, tau halving")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", lw=0.3, alpha=0.5)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def stability_figure(report, path):
    """Amplification summary: curve over C (1D) or colored (C, D) samples."""
    fig, ax = plt.subplots(figsize=(5.8, 4.4))
    rows = np.array([r[:3] for r in report.rows])
    if report.dim == 1:
        ax.semilogx(rows[:, 0], rows[:, 2], "o-")
        ax.axhline(1.0, color="k", lw=0.6)
        ax.set_xlabel("Courant number C")
        ax.set_ylabel("max |g|")
    else:
        sc = ax.scatter(
            rows[:, 0], rows[:, 1], c=rows[:, 2], cmap="viridis", s=36, marker="s"
        )
        fig.colorbar(sc, ax=ax, label="max |g|")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("C")
        ax.set_ylabel("D")
    ax.set_title(f"{report.scheme_id}: amplification scan, max |g| = {report.max_abs_g:.6g}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
