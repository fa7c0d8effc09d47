"""Figure families over the sweep summary.

Each family plots the mean sum-rate (with population-std error bars) against
one scenario column, one line per scheme. Cells with count 0 become NaN
points, which matplotlib renders as line gaps. Golden tests compare the
extracted data arrays, never image bytes.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .data import MissingColumnError


@dataclass(frozen=True)
class FigureSpec:
    name: str
    x_column: str
    group_column: str
    xlabel: str
    filename: str
    categorical_order: tuple = ()


FIGURES = {
    "pt": FigureSpec("pt", "p_t_watts", "ris_mode", "Transmit power P_T (W)", "sum_rate_vs_pt.png"),
    "k": FigureSpec("k", "k_users", "ris_mode", "Number of users K", "sum_rate_vs_k.png"),
    "nris": FigureSpec("nris", "n_ris", "ris_mode", "Reflector elements N_RIS", "sum_rate_vs_nris.png"),
    "nt": FigureSpec("nt", "n_t", "ris_mode", "Surface elements N_t", "sum_rate_vs_nt.png"),
    "csi": FigureSpec(
        "csi", "csi_mode", "ris_mode", "Channel knowledge", "sum_rate_vs_csi.png",
        categorical_order=("perfect", "imperfect"),
    ),
    "coupling": FigureSpec(
        "coupling", "coupling", "ris_mode", "Mutual coupling", "sum_rate_vs_coupling.png",
        categorical_order=(False, True),
    ),
}

SCHEME_ORDER = ("optimized", "random", "none")
SCHEME_LABELS = {
    "optimized": "optimized reflector",
    "random": "random reflector",
    "none": "no reflector",
}
SCHEME_STYLES = {
    "optimized": dict(color="C0", marker="o", linestyle="-"),
    "random": dict(color="C1", marker="s", linestyle="--"),
    "none": dict(color="C2", marker="^", linestyle=":"),
}


def _pool(cells):
    """Combine duplicate (group, x) cells: count-weighted mean, pooled
    population std, summed counts. Empty cells carry no statistics and are
    excluded from the sums."""
    filled = [c for c in cells if c["count"] > 0]
    total = sum(c["count"] for c in filled)
    if total == 0:
        return float("nan"), float("nan"), 0
    mean = sum(c["count"] * c["mean_sum_rate_bpshz"] for c in filled) / total
    second = sum(
        c["count"] * (c["std_sum_rate_bpshz"] ** 2 + c["mean_sum_rate_bpshz"] ** 2)
        for c in filled
    ) / total
    return mean, math.sqrt(max(second - mean**2, 0.0)), total


def extract_series(rows, spec):
    """Plotted data arrays: {scheme: {x, mean, std, count}} with x sorted.

    Count-0 cells stay in the arrays with NaN statistics (rendered as gaps)
    and trigger a console warning.
    """
    if not rows:
        return {}
    for column in (spec.x_column, spec.group_column, "mean_sum_rate_bpshz"):
        if column not in rows[0]:
            raise MissingColumnError(f"summary rows missing column {column!r}")
    grouped = {}
    for row in rows:
        grouped.setdefault((row[spec.group_column], row[spec.x_column]), []).append(row)
    xs = sorted(
        {x for (_, x) in grouped},
        key=(
            (lambda v: spec.categorical_order.index(v))
            if spec.categorical_order
            else (lambda v: v)
        ),
    )
    schemes = [s for s in SCHEME_ORDER if any(g == s for (g, _) in grouped)]
    schemes += sorted({g for (g, _) in grouped} - set(schemes))
    series = {}
    for scheme in schemes:
        points = {"x": [], "mean": [], "std": [], "count": []}
        present = False
        for x in xs:
            cells = grouped.get((scheme, x))
            if cells is None:
                continue
            present = True
            mean, std, count = _pool(cells)
            if count == 0:
                print(
                    f"warning: empty cell ({spec.group_column}={scheme}, "
                    f"{spec.x_column}={x}); leaving a gap"
                )
            points["x"].append(x)
            points["mean"].append(mean)
            points["std"].append(std)
            points["count"].append(count)
        if present:
            series[scheme] = points
    return series


def render(rows, spec, out_dir):
    """Render one figure family to out_dir; returns the written path."""
    series = extract_series(rows, spec)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    categorical = bool(spec.categorical_order)
    for scheme, points in series.items():
        if categorical:
            x = [spec.categorical_order.index(v) for v in points["x"]]
        else:
            x = points["x"]
        style = SCHEME_STYLES.get(scheme, {})
        ax.errorbar(
            x,
            points["mean"],
            yerr=points["std"],
            label=SCHEME_LABELS.get(scheme, scheme),
            capsize=3,
            **style,
        )
    if categorical:
        ax.set_xticks(range(len(spec.categorical_order)))
        ax.set_xticklabels([str(v).lower() for v in spec.categorical_order])
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel("Mean sum-rate (bps/Hz)")
    ax.grid(True, linestyle=":", linewidth=0.8)
    ax.legend()
    fig.tight_layout()
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, spec.filename)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_families(rows, names, out_dir):
    """Render the requested figure families; returns the written paths."""
    paths = []
    for name in names:
        if name not in FIGURES:
            raise ValueError(f"unknown figure family {name!r}")
        paths.append(render(rows, FIGURES[name], out_dir))
    return paths
