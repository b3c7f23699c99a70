"""Turn gmm-lab simulation tables into multi-panel PNG images.

Strictly presentation: every plotted value comes verbatim out of a CSV
written by the gmm-lab command line tool. Nothing is recomputed here, rows
are never reordered, and the only filtering is the removal of non-finite
theory markers from overlay curves (an `inf` in a theory column means the
quantity diverges and must not appear as a data point).

The figure kinds, palettes, and geometry all live in the declarative
tables below rather than in the rendering code.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import SchemaError

# Palette roles: the two limit overlays keep their conventional colors in
# the default palette; "colorblind" swaps everything for Okabe-Ito hues.
PALETTES = {
    "default": {
        "limit_one": "#2ca02c",
        "limit_many": "#d62728",
        "series": ("#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"),
        "compare": "#7f7f7f",
    },
    "colorblind": {
        "limit_one": "#009e73",
        "limit_many": "#d55e00",
        "series": ("#0072b2", "#e69f00", "#56b4e9", "#cc79a7", "#f0e442"),
        "compare": "#999999",
    },
}

# One entry per figure kind. "rows" is either a tuple of content row tags
# (each panel column repeats them) or the string "n" (one panel row per
# sample size found in the table). Panel columns are always keyed by nu.
FIGURE_LAYOUTS = {
    "1": {
        "experiment": "mean-std",
        "rows": ("mean", "zoom", "std"),
        "needs": ("experiment", "nu", "rho", "sigma", "n",
                  "mean_g", "std_g", "f1", "finf"),
    },
    "2": {
        "experiment": "var-check",
        "rows": ("nvar",),
        "needs": ("experiment", "nu", "rho", "sigma", "n",
                  "nvar_emp", "nvar_theory"),
    },
    "3": {
        "experiment": "mse",
        "rows": "n",
        "needs": ("experiment", "nu", "rho", "sigma", "n",
                  "mse_g", "mse_c"),
    },
    # same layout as 3; kept separate so --figure matches the table split
    "4": {
        "experiment": "mse",
        "rows": "n",
        "needs": ("experiment", "nu", "rho", "sigma", "n",
                  "mse_g", "mse_c"),
    },
}

STYLE = {
    "panel_width": 3.4,
    "panel_height": 2.5,
    "dpi": 150,
    "data_linewidth": 1.3,
    "theory_linewidth": 1.4,
    "theory_linestyle": "--",
    "compare_linestyle": ":",
    "zoom_pad": 0.15,
    "legend_fontsize": 7,
    "title_fontsize": 9,
}


@dataclass(frozen=True)
class FigureSpec:
    """Everything render() needs: which table, which layout, where to."""

    experiment: str
    csv_path: Path
    out_path: Path
    layout: dict
    palette: str = "default"


def figure_spec(figure: str, csv_path, out_path, palette: str = "default") -> FigureSpec:
    """Build a FigureSpec for one of the known figure kinds ("1".."4")."""
    if figure not in FIGURE_LAYOUTS:
        raise ValueError(
            f"unknown figure {figure!r}, expected one of {sorted(FIGURE_LAYOUTS)}"
        )
    if palette not in PALETTES:
        raise ValueError(
            f"unknown palette {palette!r}, expected one of {sorted(PALETTES)}"
        )
    layout = FIGURE_LAYOUTS[figure]
    return FigureSpec(
        experiment=layout["experiment"],
        csv_path=Path(csv_path),
        out_path=Path(out_path),
        layout=layout,
        palette=palette,
    )


def _read_table(spec: FigureSpec) -> list[dict]:
    with open(spec.csv_path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or ()
        for column in spec.layout["needs"]:
            if column not in header:
                raise SchemaError(f"missing column {column!r} in {spec.csv_path}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{spec.csv_path} has no data rows")
    tags = {row["experiment"] for row in rows}
    if tags != {spec.experiment}:
        raise SchemaError(
            f"this figure is drawn from a {spec.experiment!r} table, "
            f"got experiment tag(s) {sorted(tags)}"
        )
    sigmas = {row["sigma"] for row in rows}
    if len(sigmas) > 1:
        raise SchemaError(
            f"table mixes sigma values {sorted(sigmas)}; filter to one before plotting"
        )
    return rows


def _ordered_unique(values) -> list[str]:
    seen: list[str] = []
    for value in values:
        if value not in seen:
            seen.append(value)
    return seen


def _series(rows: list[dict], column: str) -> np.ndarray:
    return np.array([float(row[column]) for row in rows])


def _finite_overlay(rows: list[dict], column: str) -> tuple[np.ndarray, np.ndarray]:
    """The (rho, value) pairs of a theory column, dropping non-finite markers."""
    xs, ys = [], []
    for row in rows:
        raw = row[column]
        if raw == "":
            continue
        value = float(raw)
        if math.isfinite(value):
            xs.append(float(row["rho"]))
            ys.append(value)
    return np.array(xs), np.array(ys)


def _new_grid(n_rows: int, n_cols: int):
    figure, axes = plt.subplots(
        n_rows,
        n_cols,
        figsize=(STYLE["panel_width"] * n_cols, STYLE["panel_height"] * n_rows),
        squeeze=False,
        constrained_layout=True,
    )
    return figure, axes


def _nu_title(nu: str) -> str:
    return f"nu = {nu}" if nu != "inf" else "Gaussian"


def _render_limits(rows: list[dict], palette: dict):
    """Mean curves per n with both limit overlays, a zoomed copy, and spread."""
    nus = _ordered_unique(row["nu"] for row in rows)
    figure, axes = _new_grid(3, len(nus))
    for col, nu in enumerate(nus):
        nu_rows = [row for row in rows if row["nu"] == nu]
        sizes = _ordered_unique(row["n"] for row in nu_rows)
        ax_mean, ax_zoom, ax_std = (axes[index][col] for index in range(3))
        for where, size in enumerate(sizes):
            sub = [row for row in nu_rows if row["n"] == size]
            rho = _series(sub, "rho")
            color = palette["series"][where % len(palette["series"])]
            label = f"n = {size}"
            ax_mean.plot(rho, _series(sub, "mean_g"), color=color,
                         linewidth=STYLE["data_linewidth"], label=label)
            ax_zoom.plot(rho, _series(sub, "mean_g"), color=color,
                         linewidth=STYLE["data_linewidth"])
            ax_std.plot(rho, _series(sub, "std_g"), color=color,
                        linewidth=STYLE["data_linewidth"], label=label)
        base = [row for row in nu_rows if row["n"] == sizes[0]]
        band = []
        for column, role in (("f1", "limit_one"), ("finf", "limit_many")):
            xs, ys = _finite_overlay(base, column)
            if xs.size == 0:
                continue
            band.append(ys)
            for ax in (ax_mean, ax_zoom):
                ax.plot(xs, ys, color=palette[role],
                        linestyle=STYLE["theory_linestyle"],
                        linewidth=STYLE["theory_linewidth"],
                        label=column if ax is ax_mean else None)
        if band:
            lo = min(values.min() for values in band)
            hi = max(values.max() for values in band)
            pad = max((hi - lo) * STYLE["zoom_pad"], 0.005)
            ax_zoom.set_ylim(lo - pad, hi + pad)
        ax_mean.set_title(_nu_title(nu), fontsize=STYLE["title_fontsize"])
        ax_std.set_xlabel("rho")
        if col == 0:
            ax_mean.set_ylabel("mean of g_n")
            ax_zoom.set_ylabel("mean (zoomed)")
            ax_std.set_ylabel("std of g_n")
            ax_mean.legend(fontsize=STYLE["legend_fontsize"], frameon=False)
    return figure


def _render_nvar(rows: list[dict], palette: dict):
    """Scaled empirical variances per n against the dashed asymptotic curve."""
    nus = _ordered_unique(row["nu"] for row in rows)
    figure, axes = _new_grid(1, len(nus))
    for col, nu in enumerate(nus):
        nu_rows = [row for row in rows if row["nu"] == nu]
        sizes = _ordered_unique(row["n"] for row in nu_rows)
        ax = axes[0][col]
        for where, size in enumerate(sizes):
            sub = [row for row in nu_rows if row["n"] == size]
            ax.plot(_series(sub, "rho"), _series(sub, "nvar_emp"),
                    color=palette["series"][where % len(palette["series"])],
                    linewidth=STYLE["data_linewidth"], label=f"n = {size}")
        xs, ys = _finite_overlay(
            [row for row in nu_rows if row["n"] == sizes[0]], "nvar_theory"
        )
        if xs.size:
            ax.plot(xs, ys, color=palette["limit_many"],
                    linestyle=STYLE["theory_linestyle"],
                    linewidth=STYLE["theory_linewidth"], label="asymptotic")
        ax.set_title(_nu_title(nu), fontsize=STYLE["title_fontsize"])
        ax.set_xlabel("rho")
        if col == 0:
            ax.set_ylabel("n x Var(g_n)")
            ax.legend(fontsize=STYLE["legend_fontsize"], frameon=False)
    return figure


def _render_mse(rows: list[dict], palette: dict):
    """One panel per (n, nu): the two correlation estimators' empirical MSE."""
    nus = _ordered_unique(row["nu"] for row in rows)
    sizes = _ordered_unique(row["n"] for row in rows)
    figure, axes = _new_grid(len(sizes), len(nus))
    for panel_row, size in enumerate(sizes):
        for col, nu in enumerate(nus):
            sub = [r for r in rows if r["n"] == size and r["nu"] == nu]
            ax = axes[panel_row][col]
            if not sub:
                ax.set_axis_off()
                continue
            rho = _series(sub, "rho")
            ax.plot(rho, _series(sub, "mse_g"), color=palette["series"][0],
                    linewidth=STYLE["data_linewidth"], label="min-max estimator")
            ax.plot(rho, _series(sub, "mse_c"), color=palette["compare"],
                    linestyle=STYLE["compare_linestyle"],
                    linewidth=STYLE["data_linewidth"], label="cosine estimator")
            if panel_row == 0:
                ax.set_title(_nu_title(nu), fontsize=STYLE["title_fontsize"])
            if panel_row == len(sizes) - 1:
                ax.set_xlabel("rho")
            if col == 0:
                ax.set_ylabel(f"MSE, n = {size}")
                if panel_row == 0:
                    ax.legend(fontsize=STYLE["legend_fontsize"], frameon=False)
    return figure


_RENDERERS = {
    "mean-std": _render_limits,
    "var-check": _render_nvar,
    "mse": _render_mse,
}


def render(spec: FigureSpec):
    """Render the table at spec.csv_path, write a PNG, return the figure.

    The returned matplotlib Figure still holds every plotted line, so
    callers (and tests) can read the drawn arrays back instead of trusting
    the pixels.
    """
    rows = _read_table(spec)
    figure = _RENDERERS[spec.experiment](rows, PALETTES[spec.palette])
    figure.savefig(spec.out_path, dpi=STYLE["dpi"], format="png")
    return figure
