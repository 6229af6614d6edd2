"""Render experiment CSVs into the seven standard figures.

The input schema is the experiment runner's fixed CSV layout::

    experiment,n,eps,M,gamma,seed,s1_observed,s1_bound,storage_observed,
    storage_bound,residual,time_ms

No mathematics is recomputed here: every plotted series (including bound
lines) is read straight from the CSV, so the figures cannot drift from the
data they present.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

FIGURE_IDS = ("fig3l", "fig3r", "fig4l", "fig4r", "fig5l", "fig5r", "fig6")

REQUIRED_COLUMNS = {
    "fig3l": ("M", "s1_observed"),
    "fig3r": ("gamma", "eps", "s1_observed", "s1_bound"),
    "fig4l": ("n", "eps", "storage_observed", "storage_bound"),
    "fig4r": ("n", "eps", "s1_observed", "s1_bound"),
    "fig5l": ("n", "eps", "s1_observed", "s1_bound"),
    "fig5r": ("n", "eps", "s1_observed", "s1_bound"),
    "fig6": ("experiment", "n", "time_ms"),
}


class MissingColumnsError(ValueError):
    pass


@dataclass(frozen=True)
class FigureSpec:
    csv_paths: tuple[str, ...]
    figure_id: str
    out_path: str

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(f"unknown figure id {self.figure_id!r}")
        if not self.csv_paths:
            raise ValueError("at least one CSV path is required")


def read_rows(paths) -> list[dict]:
    rows = []
    for path in paths:
        with open(path, newline="") as fh:
            rows.extend(csv.DictReader(fh))
    return rows


def _check_columns(rows, fig_id, paths) -> None:
    needed = REQUIRED_COLUMNS[fig_id]
    if rows:
        have = rows[0].keys()
    else:
        # header-only file: inspect the header directly
        with open(paths[0], newline="") as fh:
            have = next(csv.reader(fh), [])
    missing = [c for c in needed if c not in have]
    if missing:
        raise MissingColumnsError(
            f"{fig_id}: CSV lacks required columns {missing}"
        )


def _floats(rows, key):
    return [float(r[key]) for r in rows if r.get(key)]


def _grouped(rows, key):
    groups: dict[str, list[dict]] = {}
    for r in rows:
        groups.setdefault(r.get(key, ""), []).append(r)
    return dict(sorted(groups.items(), key=lambda kv: _sort_key(kv[0])))


def _sort_key(text):
    try:
        return (0, float(text))
    except ValueError:
        return (1, text)


def render(spec: FigureSpec) -> dict:
    """Render one figure; returns the plotted data series keyed by label."""
    rows = read_rows(spec.csv_paths)
    _check_columns(rows, spec.figure_id, spec.csv_paths)
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    series: dict[str, tuple] = {}

    if spec.figure_id == "fig3l":
        rows = [r for r in rows if r.get("M") and r.get("s1_observed")]
        ms = [float(r["M"]) for r in rows]
        ratio = [float(r["s1_observed"]) / (2.0 * float(r["M"])) for r in rows]
        order = sorted(range(len(ms)), key=lambda i: ms[i])
        ms = [ms[i] for i in order]
        ratio = [ratio[i] for i in order]
        ax.plot(ms, ratio, "o-", label="s1 / 2M")
        series["ratio"] = (tuple(ms), tuple(ratio))
        ax.set_xlabel("M")
        ax.set_ylabel("ratio")
        ax.legend()

    elif spec.figure_id == "fig3r":
        for gamma, grp in _grouped(rows, "gamma").items():
            grp = [r for r in grp if r.get("eps")]
            eps = _floats(grp, "eps")
            obs = _floats(grp, "s1_observed")
            bnd = _floats(grp, "s1_bound")
            if obs:
                ax.semilogy(obs, eps, "o", label=f"gamma={gamma}")
                series[f"obs@{gamma}"] = (tuple(obs), tuple(eps))
            if bnd:
                ax.semilogy(bnd, eps, "k-")
                series[f"bound@{gamma}"] = (tuple(bnd), tuple(eps))
        ax.set_xlabel("TT-rank")
        ax.set_ylabel("accuracy")
        if series:
            ax.legend()

    elif spec.figure_id == "fig4l":
        rows = [r for r in rows if r.get("eps")]
        for n, grp in _grouped(rows, "n").items():
            eps = _floats(grp, "eps")
            cube = float(n) ** 3 if n else 1.0
            obs = [float(r["storage_observed"]) / cube for r in grp if r.get("storage_observed")]
            bnd = [float(r["storage_bound"]) / cube for r in grp if r.get("storage_bound")]
            if obs:
                ax.loglog(eps, obs, "o", label=f"exact n={n}")
                series[f"obs@{n}"] = (tuple(eps), tuple(obs))
            if bnd:
                ax.loglog(eps, bnd, "k-", label=f"bound n={n}")
                series[f"bound@{n}"] = (tuple(eps), tuple(bnd))
        ax.set_xlabel("accuracy")
        ax.set_ylabel("compression rate")
        if series:
            ax.legend()

    elif spec.figure_id in ("fig4r", "fig5l", "fig5r"):
        for n, grp in _grouped(rows, "n").items():
            grp = [r for r in grp if r.get("eps")]
            eps = _floats(grp, "eps")
            obs = _floats(grp, "s1_observed")
            bnd = _floats(grp, "s1_bound")
            if obs:
                ax.semilogy(obs, eps, "o", label=f"n={n}")
                series[f"obs@{n}"] = (tuple(obs), tuple(eps))
            if bnd:
                ax.semilogy(bnd, eps, "k-")
                series[f"bound@{n}"] = (tuple(bnd), tuple(eps))
        ax.set_xlabel("TT-rank")
        ax.set_ylabel("accuracy")
        if series:
            ax.legend()

    elif spec.figure_id == "fig6":
        for name, grp in _grouped(rows, "experiment").items():
            grp = [r for r in grp if r.get("time_ms") and r.get("n")]
            ns = _floats(grp, "n")
            secs = [float(r["time_ms"]) / 1e3 for r in grp]
            if ns:
                label = name.replace("bench-", "")
                ax.loglog(ns, secs, "o-", label=label)
                series[label] = (tuple(ns), tuple(secs))
        ax.set_xlabel("size, n")
        ax.set_ylabel("time (sec)")
        if series:
            ax.legend()

    ax.set_title(spec.figure_id)
    fig.tight_layout()
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return series


def verify_rank_bounds(csv_path) -> int:
    """Re-assert observed <= bound for every row carrying both columns."""
    checked = 0
    with open(csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            if row.get("s1_observed") and row.get("s1_bound"):
                if int(row["s1_observed"]) > int(row["s1_bound"]):
                    raise AssertionError(
                        f"rank bound violated in {csv_path}: {row}"
                    )
                checked += 1
    return checked
