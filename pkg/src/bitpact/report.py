"""Figure rendering for the CLI's report path.

Plots are opt-in (the delimited output is always written); every
function renders straight to a file using the Agg backend so no display
is needed.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from bitpact.analysis import OdeSolution  # noqa: E402
from bitpact.protocol import TraceRecord  # noqa: E402


def plot_trace(records: Sequence[TraceRecord], n: int, path: str) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot([r.step for r in records], [r.x / n for r in records], lw=1.0)
    ax.set_xlabel("step")
    ax.set_ylabel("agreement density X(i)/n")
    ax.set_ylim(0, 1.02)
    ax.set_title(f"agreement trajectory (n={n})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_ode(sol: OdeSolution, path: str) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(sol.ts, sol.xs, lw=1.2)
    ax.set_xlabel("scaled time t")
    ax.set_ylabel("density x(t)")
    ax.set_ylim(0, 1.02)
    ax.set_title(f"deterministic density trajectory (x0={sol.x0})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_compare(rows: Sequence[dict], path: str) -> None:
    fig, (ax, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ts = [r["t"] for r in rows]
    ax.plot(ts, [r["x_ode"] for r in rows], label="ODE", lw=1.2)
    ax.plot(ts, [r["x_empirical_mean"] for r in rows], label="empirical mean", lw=1.0, ls="--")
    ax.set_ylabel("density")
    ax.legend()
    ax2.plot(ts, [r["abs_dev"] for r in rows], color="tab:red", lw=1.0)
    ax2.set_xlabel("scaled time t")
    ax2.set_ylabel("|deviation|")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_bounds(rows: Sequence[dict], path: str) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    idx = range(len(rows))
    ax.plot(idx, [r["bound_case"] for r in rows], "s-", label="piecewise bound", ms=4)
    ax.plot(idx, [r["bound_generic"] for r in rows], "o-", label="tangent bound", ms=4)
    ax.plot(idx, [r["ode_hitting_time"] for r in rows], "x-", label="measured (ODE)", ms=5)
    ax.set_xlabel("sweep row")
    ax.set_ylabel("hitting time")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
