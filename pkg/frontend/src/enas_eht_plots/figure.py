"""Render the 2x2 comparison figure from schema-v1 sweep CSVs.

Panel (a): one-slot theory bounds, (b): one-slot empirical means,
(c): multi-slot theory bounds, (d): multi-slot empirical means.
The renderer plots CSV values verbatim; it computes nothing else.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

SCHEMA_LINE = "# schema=v1"

THEORY_COLUMNS = ["operator", "q", "lambda", "eht_lower_bound"]
EMPIRICAL_COLUMNS = ["operator", "q", "lambda", "mean_generations"]

ONE_SLOT_KEYS = [("m1", 0), ("m2", 0)]
MULTI_SLOT_KEYS = [("m3", 1), ("m3", 2), ("m3", 3), ("m3", 4), ("m3", 5), ("m4", 0)]

LABELS = {
    ("m1", 0): "one-slot bit-fair",
    ("m2", 0): "one-slot offspring-fair",
    ("m3", 1): "q-slot, q=1",
    ("m3", 2): "q-slot, q=2",
    ("m3", 3): "q-slot, q=3",
    ("m3", 4): "q-slot, q=4",
    ("m3", 5): "q-slot, q=5",
    ("m4", 0): "bitwise",
}


class SchemaError(ValueError):
    """Input CSV is missing the schema marker or required columns."""


@dataclass(frozen=True)
class FigureSpec:
    theory_path: str
    empirical_path: str
    out_path: str


def load_schema_csv(path: str, required: list[str]) -> list[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    if not any(ln.strip() == SCHEMA_LINE for ln in lines if ln.startswith("#")):
        raise SchemaError(f"{path}: missing '{SCHEMA_LINE}' marker")
    rows = list(csv.DictReader([ln for ln in lines if not ln.startswith("#")]))
    if rows:
        missing = [c for c in required if c not in rows[0]]
        if missing:
            raise SchemaError(f"{path}: missing columns {missing}")
    return rows


def extract_series(rows: list[dict], value_column: str) -> dict:
    """Group rows into {(operator, q): sorted [(lambda, value), ...]}."""
    series: dict = {}
    for r in rows:
        try:
            lam = int(r["lambda"])
            val = float(r[value_column])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad row {r!r}: {exc}") from exc
        series.setdefault((r["operator"], int(r["q"])), []).append((lam, val))
    return {k: sorted(v) for k, v in series.items()}


def _draw_panel(ax, series: dict, keys, title: str, ylabel: str) -> list[str]:
    warnings = []
    plotted = 0
    for key in keys:
        pts = [(x, y) for x, y in series.get(key, []) if not math.isnan(y)]
        if not pts:
            warnings.append(f"{title}: missing series {key[0]} q={key[1]}")
            continue
        xs, ys = zip(*pts)
        ax.plot(xs, ys, marker="o", markersize=2.5, linewidth=1.0, label=LABELS[key])
        plotted += 1
    ax.set_title(title, fontsize=10)
    ax.set_xlabel("population size")
    ax.set_ylabel(ylabel)
    if plotted:
        ax.legend(fontsize=6)
    if warnings:
        note = "no data" if plotted == 0 else "missing series"
        ax.annotate(
            note,
            xy=(0.5, 0.5),
            xycoords="axes fraction",
            ha="center",
            color="crimson",
            fontsize=11,
        )
    return warnings


def render_comparison_figure(spec: FigureSpec) -> list[str]:
    """Write the SVG figure; returns warnings for missing/empty series."""
    theory = extract_series(load_schema_csv(spec.theory_path, THEORY_COLUMNS), "eht_lower_bound")
    empirical = extract_series(
        load_schema_csv(spec.empirical_path, EMPIRICAL_COLUMNS), "mean_generations"
    )

    plt.rcParams["svg.hashsalt"] = "enas-eht-plots"
    fig, axes = plt.subplots(2, 2, figsize=(9, 7))
    warnings = []
    warnings += _draw_panel(axes[0][0], theory, ONE_SLOT_KEYS, "(a) one-slot bounds", "bound (generations)")
    warnings += _draw_panel(axes[0][1], empirical, ONE_SLOT_KEYS, "(b) one-slot empirical", "mean generations")
    warnings += _draw_panel(axes[1][0], theory, MULTI_SLOT_KEYS, "(c) multi-slot bounds", "bound (generations)")
    warnings += _draw_panel(axes[1][1], empirical, MULTI_SLOT_KEYS, "(d) multi-slot empirical", "mean generations")
    fig.tight_layout()
    fig.savefig(spec.out_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return warnings
