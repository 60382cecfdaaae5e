"""Loading and validation of simulation artifact trees.

An artifact tree is a directory of grid-cell subdirectories, each holding
``per_ue.csv``, ``timers.csv`` and ``summary.json`` as written by the
simulation sweep.  This module only reads; column names are validated
against the published schema before anything is plotted.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

PER_UE_COLUMNS = ["ue_id", "seed", "outcome", "attempts",
                  "registration_time_s", "energy_j"]
TIMER_COLUMNS = ["timer", "started", "expired", "stopped"]


class SchemaMismatchError(ValueError):
    """An artifact file does not carry the expected columns."""


class ArtifactError(ValueError):
    """The artifact tree is missing referenced files."""


@dataclass
class Cell:
    name: str
    ue_count: int
    loss: float
    mode: str
    per_ue: list[dict]
    timers: list[dict]

    @property
    def label(self) -> str:
        return f"{self.mode} ues={self.ue_count} loss={self.loss:g}"


def _read_csv(path: str, required: list[str]) -> list[dict]:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in required:
            if column not in header:
                raise SchemaMismatchError(
                    f"{path}: missing required column {column!r}")
        return list(reader)


def load_cell(cell_dir: str) -> Cell:
    summary_path = os.path.join(cell_dir, "summary.json")
    per_ue_path = os.path.join(cell_dir, "per_ue.csv")
    timers_path = os.path.join(cell_dir, "timers.csv")
    for path in (summary_path, per_ue_path, timers_path):
        if not os.path.isfile(path):
            raise ArtifactError(f"missing artifact {path}")
    with open(summary_path, "r", encoding="utf-8") as fh:
        summary = json.load(fh)
    params = summary.get("cell", {})
    return Cell(
        name=os.path.basename(cell_dir.rstrip("/")),
        ue_count=int(params["ue_count"]),
        loss=float(params["loss_probability"]),
        mode=str(params["mode"]),
        per_ue=_read_csv(per_ue_path, PER_UE_COLUMNS),
        timers=_read_csv(timers_path, TIMER_COLUMNS),
    )


def discover_cells(artifact_dir: str, ues: int | None = None,
                   loss: float | None = None,
                   mode: str | None = None) -> list[Cell]:
    """All grid cells under a tree, optionally filtered; sorted by label."""
    if not os.path.isdir(artifact_dir):
        raise ArtifactError(f"not a directory: {artifact_dir}")
    cells = []
    for entry in sorted(os.listdir(artifact_dir)):
        cell_dir = os.path.join(artifact_dir, entry)
        if not os.path.isfile(os.path.join(cell_dir, "summary.json")):
            continue
        cell = load_cell(cell_dir)
        if ues is not None and cell.ue_count != ues:
            continue
        if loss is not None and cell.loss != loss:
            continue
        if mode is not None and cell.mode != mode:
            continue
        cells.append(cell)
    if not cells:
        raise ArtifactError(f"no matching cells under {artifact_dir}")
    cells.sort(key=lambda c: (c.ue_count, c.loss, c.mode))
    return cells
