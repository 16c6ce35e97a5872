"""CSV writers and readers for every table the CLI emits.

All writers produce plain comma-separated text; lines starting with '#'
are summary/comment lines and are skipped by the readers, so every
table round-trips through its own reader.
"""

from __future__ import annotations

import csv
from typing import IO, Iterable, Sequence

from bitpact.analysis import OdeSolution
from bitpact.protocol import TraceRecord


def write_trace(records: Sequence[TraceRecord], n: int, fh: IO[str], oracle: bool) -> None:
    header = "step,X,density,turn,flipped,msgs"
    if oracle:
        header += ",j,s"
    fh.write(header + "\n")
    for rec in records:
        row = (
            f"{rec.step},{rec.x},{rec.x / n:.6f},{rec.turn},"
            f"{int(rec.flipped)},{rec.msgs}"
        )
        if oracle:
            row += f",{rec.j},{'' if rec.s is None else rec.s}"
        fh.write(row + "\n")


def read_trace(fh: IO[str]) -> list[dict]:
    rows = []
    for rec in _dict_rows(fh):
        row = {
            "step": int(rec["step"]),
            "X": int(rec["X"]),
            "density": float(rec["density"]),
            "turn": int(rec["turn"]),
            "flipped": bool(int(rec["flipped"])),
            "msgs": int(rec["msgs"]),
        }
        if "j" in rec:
            row["j"] = int(rec["j"])
            row["s"] = int(rec["s"]) if rec["s"] != "" else None
        rows.append(row)
    return rows


def write_ode(sol: OdeSolution, fh: IO[str]) -> None:
    fh.write("t,x\n")
    for t, x in zip(sol.ts, sol.xs):
        fh.write(f"{t:.9g},{x:.9g}\n")


def read_ode(fh: IO[str]) -> list[dict]:
    return [{"t": float(r["t"]), "x": float(r["x"])} for r in _dict_rows(fh)]


def write_compare(rows: Iterable[dict], max_abs_dev: float, fh: IO[str]) -> None:
    fh.write("t,x_ode,x_empirical_mean,abs_dev\n")
    for r in rows:
        fh.write(
            f"{r['t']:.9g},{r['x_ode']:.9g},{r['x_empirical_mean']:.9g},{r['abs_dev']:.9g}\n"
        )
    fh.write(f"# max_abs_dev={max_abs_dev:.9g}\n")


def read_compare(fh: IO[str]) -> list[dict]:
    return [
        {
            "t": float(r["t"]),
            "x_ode": float(r["x_ode"]),
            "x_empirical_mean": float(r["x_empirical_mean"]),
            "abs_dev": float(r["abs_dev"]),
        }
        for r in _dict_rows(fh)
    ]


BOUNDS_COLUMNS = ("k", "l", "x0", "h", "bound_case", "bound_generic", "ode_hitting_time")


def write_bounds(rows: Iterable[dict], fh: IO[str]) -> None:
    fh.write(",".join(BOUNDS_COLUMNS) + "\n")
    for r in rows:
        fh.write(
            f"{r['k']},{r['l']},{r['x0']:.9g},{r['h']:.9g},"
            f"{r['bound_case']:.9g},{r['bound_generic']:.9g},{r['ode_hitting_time']:.9g}\n"
        )


def read_bounds(fh: IO[str]) -> list[dict]:
    out = []
    for r in _dict_rows(fh):
        out.append(
            {
                "k": int(r["k"]),
                "l": int(r["l"]),
                "x0": float(r["x0"]),
                "h": float(r["h"]),
                "bound_case": float(r["bound_case"]),
                "bound_generic": float(r["bound_generic"]),
                "ode_hitting_time": float(r["ode_hitting_time"]),
            }
        )
    return out


def _dict_rows(fh: IO[str]) -> Iterable[dict]:
    lines = (line for line in fh if not line.startswith("#"))
    return csv.DictReader(lines)
