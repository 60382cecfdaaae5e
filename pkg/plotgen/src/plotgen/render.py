"""Figure rendering for the five result families.

Four families are empirical CDFs (registration time, attempts, energy over
all UEs, energy over registered UEs) drawn as exact step curves, one curve
per grid cell; the fifth is a grouped bar chart of per-timer expired ratios.
Rendering never modifies the artifacts it reads.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend pinned first)

from .artifacts import Cell, discover_cells  # noqa: E402


class FigureFamily(enum.Enum):
    REG_TIME_CDF = "reg-time-cdf"
    ATTEMPTS_CDF = "attempts-cdf"
    ENERGY_ALL_CDF = "energy-all-cdf"
    ENERGY_REGISTERED_CDF = "energy-registered-cdf"
    EXPIRED_RATIO = "expired-ratio"


@dataclass
class FigureRequest:
    artifact_dir: str
    family: FigureFamily
    ues: int | None = None
    loss: float | None = None
    mode: str | None = None


def empirical_cdf(values) -> list[tuple[float, float]]:
    """(value, fraction <= value) step points at each distinct value."""
    ordered = sorted(values)
    if not ordered:
        return []
    points = []
    n = len(ordered)
    for i, v in enumerate(ordered, start=1):
        if i == n or ordered[i] != v:
            points.append((v, i / n))
    return points


def _cdf_values(cell: Cell, family: FigureFamily) -> list[float]:
    rows = cell.per_ue
    if family is FigureFamily.REG_TIME_CDF:
        return [float(r["registration_time_s"]) for r in rows
                if r["outcome"] == "registered"]
    if family is FigureFamily.ATTEMPTS_CDF:
        return [float(r["attempts"]) for r in rows]
    if family is FigureFamily.ENERGY_ALL_CDF:
        return [float(r["energy_j"]) for r in rows]
    if family is FigureFamily.ENERGY_REGISTERED_CDF:
        return [float(r["energy_j"]) for r in rows
                if r["outcome"] == "registered"]
    raise ValueError(f"{family} is not a CDF family")


_X_LABELS = {
    FigureFamily.REG_TIME_CDF: "registration time (s)",
    FigureFamily.ATTEMPTS_CDF: "registration attempts",
    FigureFamily.ENERGY_ALL_CDF: "energy, all UEs (J)",
    FigureFamily.ENERGY_REGISTERED_CDF: "energy, registered UEs (J)",
}


def build_figure(request: FigureRequest) -> plt.Figure:
    cells = discover_cells(request.artifact_dir, ues=request.ues,
                           loss=request.loss, mode=request.mode)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if request.family is FigureFamily.EXPIRED_RATIO:
        _draw_expired_ratio(ax, cells)
    else:
        for cell in cells:
            points = empirical_cdf(_cdf_values(cell, request.family))
            if not points:
                continue
            xs = [p[0] for p in points]
            ys = [p[1] for p in points]
            ax.plot(xs, ys, drawstyle="steps-post", label=cell.label)
        ax.set_xlabel(_X_LABELS[request.family])
        ax.set_ylabel("cumulative fraction of UEs")
        ax.set_ylim(0.0, 1.05)
        ax.legend(fontsize=8)
    ax.set_title(request.family.value)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def _draw_expired_ratio(ax, cells: list[Cell]) -> None:
    timers = sorted({row["timer"] for cell in cells for row in cell.timers})
    width = 0.8 / max(len(cells), 1)
    for k, cell in enumerate(cells):
        by_timer = {row["timer"]: row for row in cell.timers}
        ratios = []
        for timer in timers:
            row = by_timer.get(timer)
            started = int(row["started"]) if row else 0
            ratios.append(int(row["expired"]) / started if started else 0.0)
        offsets = [i + k * width for i in range(len(timers))]
        ax.bar(offsets, ratios, width=width, label=cell.label)
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(timers))])
    ax.set_xticklabels(timers)
    ax.set_ylabel("expired / started")
    ax.set_ylim(0.0, 1.05)
    ax.legend(fontsize=8)


def render(request: FigureRequest, out_dir: str) -> str:
    """Write one image for the requested family; returns the file path."""
    fig = build_figure(request)
    os.makedirs(out_dir, exist_ok=True)
    out_path = os.path.join(out_dir, f"{request.family.value}.png")
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
