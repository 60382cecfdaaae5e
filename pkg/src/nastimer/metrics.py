"""Reduction of simulation traces into CDFs, ratios and CSV artifacts.

Traces from the seeds of one grid cell are pooled (per-UE records
concatenated, timer counts summed) before any CDF is computed; pooling is
order-free, so the reduction is deterministic however the runs were
scheduled.  Exported CSV column names and units are fixed and relied on by
downstream tooling.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .nas_sim import RunTrace


class MismatchedTraceError(ValueError):
    """Traces handed to one reduction come from different grid cells."""


CdfPoints = list[tuple[float, float]]

PER_UE_COLUMNS = ["ue_id", "seed", "outcome", "attempts",
                  "registration_time_s", "energy_j"]
TIMER_COLUMNS = ["timer", "started", "expired", "stopped"]


def empirical_cdf(values: Iterable[float]) -> CdfPoints:
    """Step points (value, fraction <= value) at each distinct value."""
    arr = np.asarray(sorted(values), dtype=np.float64)
    if arr.size == 0:
        return []
    uniques, counts = np.unique(arr, return_counts=True)
    cum = np.cumsum(counts) / arr.size
    return [(float(v), float(c)) for v, c in zip(uniques, cum)]


@dataclass
class MetricsBundle:
    registration_time_cdf: CdfPoints
    attempts_cdf: CdfPoints
    energy_cdf_all: CdfPoints
    energy_cdf_registered: CdfPoints
    expired_ratio: dict[str, float]
    success_fraction: float
    powered_on: int = 0
    registered: int = 0
    timer_counts: dict[str, dict[str, int]] = field(default_factory=dict)
    mean_attempts: float = 0.0
    mean_energy_j: float = 0.0

    @property
    def expired_ratio_overall(self) -> float:
        started = sum(c["started"] for c in self.timer_counts.values())
        expired = sum(c["expired"] for c in self.timer_counts.values())
        return expired / started if started else 0.0


def reduce_traces(traces: Sequence[RunTrace]) -> MetricsBundle:
    """Pool one grid cell's traces (one per seed) into a metrics bundle."""
    if not traces:
        raise ValueError("need at least one trace")
    first = traces[0]
    for t in traces[1:]:
        if t.num_ues != first.num_ues or t.loss_probability != first.loss_probability:
            raise MismatchedTraceError(
                f"trace (num_ues={t.num_ues}, loss={t.loss_probability}) does not "
                f"match (num_ues={first.num_ues}, loss={first.loss_probability})")

    records = [r for t in traces for r in t.records if r.attempts >= 1]
    registered = [r for r in records if r.outcome == "registered"]

    counts: dict[str, dict[str, int]] = {}
    for t in traces:
        for timer, per in t.timer_counts().items():
            agg = counts.setdefault(timer, {"started": 0, "stopped": 0, "expired": 0})
            for k, v in per.items():
                agg[k] += v
    ratios = {timer: per["expired"] / per["started"]
              for timer, per in counts.items() if per["started"]}

    energies = [r.energy_j for r in records]
    return MetricsBundle(
        registration_time_cdf=empirical_cdf(r.registration_time for r in registered),
        attempts_cdf=empirical_cdf(float(r.attempts) for r in records),
        energy_cdf_all=empirical_cdf(energies),
        energy_cdf_registered=empirical_cdf(r.energy_j for r in registered),
        expired_ratio=ratios,
        success_fraction=(len(registered) / len(records) if records else 0.0),
        powered_on=len(records),
        registered=len(registered),
        timer_counts=counts,
        mean_attempts=(float(np.mean([r.attempts for r in records])) if records else 0.0),
        mean_energy_j=(float(np.mean(energies)) if energies else 0.0),
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_per_ue_csv(traces: Sequence[RunTrace], path: str) -> None:
    rows = []
    for t in sorted(traces, key=lambda t: t.seed):
        for r in t.records:
            rows.append([r.ue_id, t.seed, r.outcome, r.attempts,
                         r.registration_time, r.energy_j])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(PER_UE_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_timer_csv(bundle: MetricsBundle, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TIMER_COLUMNS)
        for timer in sorted(bundle.timer_counts):
            per = bundle.timer_counts[timer]
            writer.writerow([timer, per["started"], per["expired"], per["stopped"]])


def write_summary(bundle: MetricsBundle, cell_params: dict, path: str) -> None:
    doc = {
        "cell": cell_params,
        "powered_on": bundle.powered_on,
        "registered": bundle.registered,
        "success_fraction": bundle.success_fraction,
        "mean_attempts": bundle.mean_attempts,
        "mean_energy_j": bundle.mean_energy_j,
        "expired_ratio": bundle.expired_ratio,
        "expired_ratio_overall": bundle.expired_ratio_overall,
        "timer_counts": bundle.timer_counts,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
