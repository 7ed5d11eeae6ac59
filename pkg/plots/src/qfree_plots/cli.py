"""Renders the repo's standard figures from experiment CSV files.

Usage: plot --kind <kind> --in <csv> --out <img>

Kinds: completeness-vs-k, tv-vs-eps, ledger-trajectory, value-gap.
Figures are deterministic for identical input: no timestamps are embedded
and the SVG hash salt is pinned.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "qfree-plots"

import matplotlib.pyplot as plt

KINDS = ("completeness-vs-k", "tv-vs-eps", "ledger-trajectory", "value-gap")

REQUIRED_COLUMNS = {
    "completeness-vs-k": ("k", "p_unif", "p_accept"),
    "tv-vs-eps": ("eps_achieved", "tv_distance"),
    "ledger-trajectory": ("step", "ell"),
    "value-gap": ("k", "ell", "value", "gap"),
}

# OLS fit window for the tv-vs-eps slope; endpoints excluded.
SLOPE_FIT_RANGE = (1e-4, 1e-1)


class PlotError(Exception):
    pass


def read_rows(path: str) -> list[dict[str, str]]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise PlotError(f"cannot read CSV {path}: {exc}") from exc
    if not rows:
        raise PlotError(f"CSV {path} has no data rows")
    return rows


def require_columns(rows: list[dict[str, str]], kind: str):
    missing = [c for c in REQUIRED_COLUMNS[kind] if c not in rows[0]]
    if missing:
        raise PlotError(
            f"CSV is missing column(s) {', '.join(missing)} required by {kind}"
        )


def fitted_slope(eps: list[float], distance: list[float]) -> float:
    """OLS slope of log(distance) vs log(eps), restricted to the fit window."""
    lo, hi = SLOPE_FIT_RANGE
    pts = [
        (math.log(e), math.log(d))
        for e, d in zip(eps, distance)
        if lo < e < hi and d > 0
    ]
    if len(pts) < 2:
        raise PlotError(
            f"need at least two points with eps strictly inside ({lo}, {hi}) "
            "for the slope fit"
        )
    n = len(pts)
    mx = sum(p[0] for p in pts) / n
    my = sum(p[1] for p in pts) / n
    num = sum((x - mx) * (y - my) for x, y in pts)
    den = sum((x - mx) ** 2 for x, _ in pts)
    return num / den


def _plot_completeness(rows, ax):
    ks = [int(r["k"]) for r in rows]
    ax.plot(ks, [float(r["p_unif"]) for r in rows], "o-", label="uniformity pass rate")
    ax.plot(ks, [float(r["p_accept"]) for r in rows], "s-", label="protocol acceptance")
    ax.axhline(1.0, color="gray", lw=0.8, ls=":")
    ax.set_xlabel("copies k")
    ax.set_ylabel("probability")
    ax.set_title("honest completeness vs k")
    ax.legend()


def _plot_tv_vs_eps(rows, ax):
    eps = [float(r["eps_achieved"]) for r in rows]
    dist = [float(r["tv_distance"]) for r in rows]
    slope = fitted_slope(eps, dist)
    ax.loglog(eps, dist, "o-", label=f"measured (fitted slope {slope:.3f})")
    # quarter-power reference envelope, anchored at the largest eps
    anchor = max(zip(eps, dist))
    ref = [anchor[1] * (e / anchor[0]) ** 0.25 for e in eps]
    ax.loglog(eps, ref, "--", color="gray", label="reference slope 1/4")
    ax.set_xlabel("uniformity-test failure probability eps")
    ax.set_ylabel("TV distance to mixture family")
    ax.set_title("mixture distance vs test failure")
    ax.legend()
    return slope


def _plot_ledger(rows, ax):
    steps = [int(r["step"]) for r in rows]
    ells = [int(r["ell"]) for r in rows]
    ax.semilogy(steps, ells, "o-")
    for s, e in zip(steps, ells):
        ax.annotate(str(e), (s, e), textcoords="offset points", xytext=(6, 4))
    ax.set_xlabel("compression step")
    ax.set_ylabel("question length")
    ax.set_title("compression-recursion trajectory")
    ax.set_xticks(steps)


def _plot_value_gap(rows, ax):
    labels = [f"({r['k']},{r['ell']})" for r in rows]
    gaps = [float(r["gap"]) for r in rows]
    ax.bar(range(len(rows)), gaps)
    ax.set_xticks(range(len(rows)), labels)
    ax.set_xlabel("(k, l) batch sizes")
    ax.set_ylabel("1 - game value")
    ax.set_title("consistency-game value gap")


def render(kind: str, in_path: str, out_path: str) -> float | None:
    rows = read_rows(in_path)
    require_columns(rows, kind)
    fig, ax = plt.subplots(figsize=(6, 4))
    slope = None
    if kind == "completeness-vs-k":
        _plot_completeness(rows, ax)
    elif kind == "tv-vs-eps":
        slope = _plot_tv_vs_eps(rows, ax)
    elif kind == "ledger-trajectory":
        _plot_ledger(rows, ax)
    elif kind == "value-gap":
        _plot_value_gap(rows, ax)
    else:
        raise PlotError(f"unknown figure kind {kind!r}")
    fig.tight_layout()
    # metadata pinned so identical input gives identical bytes
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, metadata=_stable_metadata(out_path))
    plt.close(fig)
    return slope


def _stable_metadata(out_path: str) -> dict:
    suffix = Path(out_path).suffix.lower()
    if suffix == ".svg":
        return {"Date": None}
    if suffix == ".png":
        return {"Software": None}
    return {}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="plot", description=__doc__)
    parser.add_argument("--kind", choices=KINDS, required=True)
    parser.add_argument("--in", dest="in_path", required=True, metavar="CSV")
    parser.add_argument("--out", dest="out_path", required=True, metavar="IMG")
    args = parser.parse_args(argv)
    try:
        slope = render(args.kind, args.in_path, args.out_path)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if slope is not None:
        print(f"fitted_slope={slope:.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
