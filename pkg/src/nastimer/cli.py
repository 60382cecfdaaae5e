"""Operator entry point: size timers, run scenario grids, summarise artifacts.

Subcommands
-----------
size          print the sized registration timers for a snapshot path, with
              the per-term breakdown behind each value
run           execute a (ue_count x loss x mode) grid of seeded simulations
              and write per-cell CSV/JSON artifacts
sweep-report  tabulate the summaries of a completed artifact tree

Exit codes: 0 success, 1 one or more grid cells failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import metrics, nas_sim, timer_model, topology

# MEO/GEO reference values; T3550/T3560 use the ~1.8x terrestrial scaling
# (6 s -> 10.8 s) because no reference value is published for them.
FIXED_3GPP_DEFAULTS = {"t3510": 27.0, "t3511": 18.0, "t3550": 10.8, "t3560": 10.8}

GRID_DEFAULTS = {
    "ue_counts": [3000, 4000, 5000],
    "loss_probs": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
    "modes": ["astro", "3gpp"],
    "seeds": list(range(1, 11)),
    "alpha": 0.0,
    "beta": 0.64,
    "fixed_timers": FIXED_3GPP_DEFAULTS,
    "burst_window": 1e-3,
    "background_load_fraction": 0.8,
    "nas_retransmit_limit": 4,
    "max_attempts": 5,
    "p_active": 0.2,
    "p_idle": 0.01,
    "horizon": 600.0,
    "ue_processing_delay": 0.0,
    "amf_discipline": "nas_priority",
    "workers": 1,
    "out_dir": "artifacts",
}


def _burst_adjusted_path(path: timer_model.PathSpec, ue_count: int,
                         burst_window: float) -> timer_model.PathSpec:
    """Responder load with the cell's registration burst superimposed."""
    responder = path.responder
    return path.with_responder_load(
        total_arrival=responder.steady_arrival + ue_count / burst_window,
        burst_window=burst_window)


def _suite_for_cell(cell: dict, path: timer_model.PathSpec) -> timer_model.SizedTimerSuite:
    if cell["mode"] == "astro":
        weights = timer_model.EndpointWeights(cell["alpha"], cell["beta"])
        return timer_model.size_registration_suite(path, weights)
    if cell["mode"] == "3gpp":
        fixed = dict(FIXED_3GPP_DEFAULTS)
        fixed.update(cell["fixed_timers"])
        return timer_model.make_registration_suite(**fixed)
    raise ValueError(f"unknown timer mode {cell['mode']!r}; expected astro or 3gpp")


def cell_name(ue_count: int, loss: float, mode: str) -> str:
    return f"ues{ue_count}_loss{loss:g}_{mode}"


def run_cell(cell: dict) -> str:
    """Run all seeds of one grid cell and write its artifact directory."""
    snapshot = topology.load_snapshot(cell["snapshot"])
    base_path = topology.build_path(snapshot, cell["origin"], cell["responder"])
    path = _burst_adjusted_path(base_path, cell["ue_count"], cell["burst_window"])
    suite = _suite_for_cell(cell, path)

    traces = []
    for seed in cell["seeds"]:
        config = nas_sim.SimConfig(
            num_ues=cell["ue_count"],
            loss_probability=cell["loss"],
            amf_profile=path.responder,
            seed=seed,
            max_attempts=cell["max_attempts"],
            burst_window=cell["burst_window"],
            background_load_fraction=cell["background_load_fraction"],
            nas_retransmit_limit=cell["nas_retransmit_limit"],
            p_active=cell["p_active"],
            p_idle=cell["p_idle"],
            horizon=cell["horizon"],
            ue_processing_delay=cell["ue_processing_delay"],
            amf_discipline=cell["amf_discipline"],
        )
        traces.append(nas_sim.run_scenario(config, suite, path))

    bundle = metrics.reduce_traces(traces)
    name = cell_name(cell["ue_count"], cell["loss"], cell["mode"])
    cell_dir = os.path.join(cell["out_dir"], name)
    os.makedirs(cell_dir, exist_ok=True)
    metrics.write_per_ue_csv(traces, os.path.join(cell_dir, "per_ue.csv"))
    metrics.write_timer_csv(bundle, os.path.join(cell_dir, "timers.csv"))
    params = {
        "ue_count": cell["ue_count"],
        "loss_probability": cell["loss"],
        "mode": cell["mode"],
        "seeds": list(cell["seeds"]),
        "timers_s": suite.as_dict(),
        "alpha": cell["alpha"],
        "beta": cell["beta"],
        "snapshot": cell["snapshot"],
        "origin": cell["origin"],
        "responder": cell["responder"],
        "route": list(path.labels) if path.labels else None,
        "one_way_delay_s": nas_sim.one_way_delay(path),
        "burst_window_s": cell["burst_window"],
        "background_load_fraction": cell["background_load_fraction"],
        "nas_retransmit_limit": cell["nas_retransmit_limit"],
        "max_attempts": cell["max_attempts"],
        "p_active_w": cell["p_active"],
        "p_idle_w": cell["p_idle"],
        "horizon_s": cell["horizon"],
        "amf_discipline": cell["amf_discipline"],
        "horizon_exceeded": any(t.horizon_exceeded for t in traces),
    }
    metrics.write_summary(bundle, params, os.path.join(cell_dir, "summary.json"))
    return name


def _parse_list(text: str, cast):
    return [cast(part) for part in text.split(",") if part.strip() != ""]


def _load_grid(args) -> dict:
    grid = dict(GRID_DEFAULTS)
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(GRID_DEFAULTS) - {"snapshot", "origin", "responder"}
        if unknown:
            raise ValueError(f"unknown config key(s): {sorted(unknown)}")
        grid.update(loaded)
    if args.snapshot:
        grid["snapshot"] = args.snapshot
    if args.origin:
        grid["origin"] = args.origin
    if args.responder:
        grid["responder"] = args.responder
    if args.ues:
        grid["ue_counts"] = _parse_list(args.ues, int)
    if args.loss:
        grid["loss_probs"] = _parse_list(args.loss, float)
    if args.mode:
        grid["modes"] = _parse_list(args.mode, str)
    if args.seeds:
        grid["seeds"] = _parse_list(args.seeds, int)
    if args.alpha is not None:
        grid["alpha"] = args.alpha
    if args.beta is not None:
        grid["beta"] = args.beta
    if args.workers is not None:
        grid["workers"] = args.workers
    if args.out:
        grid["out_dir"] = args.out
    for key in ("snapshot", "origin", "responder"):
        if key not in grid:
            raise ValueError(f"missing {key!r}: set it in --config or pass --{key}")
    if not grid["ue_counts"] or not grid["loss_probs"] or not grid["modes"] \
            or not grid["seeds"]:
        raise ValueError("ue_counts, loss_probs, modes and seeds must be non-empty")
    for p in grid["loss_probs"]:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"loss probability {p} outside [0, 1]")
    for mode in grid["modes"]:
        if mode not in ("astro", "3gpp"):
            raise ValueError(f"unknown mode {mode!r}; expected astro or 3gpp")
    return grid


def cmd_size(args) -> int:
    try:
        snapshot = topology.load_snapshot(args.snapshot)
        path = topology.build_path(snapshot, args.origin, args.responder)
        weights = timer_model.EndpointWeights(args.alpha, args.beta)
        suite = timer_model.size_registration_suite(path, weights)
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    labels = path.labels or [str(i) for i in range(len(path))]
    print(f"route: {' -> '.join(labels)}")
    print(f"one-way propagation: {float(path.link_delays.sum()):.6f} s over "
          f"{path.n_hops} links")
    for i in range(1, len(path) - 1):
        delay = timer_model.node_delay(path.node(i))
        note = " (burst clamped to 0)" if delay.burst_clamped else ""
        print(f"  hop {labels[i]}: steady {delay.steady:.3e} s, "
              f"burst {delay.burst:.3e} s{note}")
    for endpoint, idx in (("origin", 0), ("responder", len(path) - 1)):
        delay = timer_model.node_delay(path.node(idx))
        print(f"  {endpoint} {labels[idx]}: aggregate {delay.total:.6f} s")

    per_round = {"T3510": 5, "T3511": 0, "T3550": 2, "T3560": 2}
    for timer in (suite.t3510, suite.t3511, suite.t3550, suite.t3560):
        sized_path = path if timer.name in ("T3510", "T3511") else path.reversed()
        sized_w = weights if timer.name in ("T3510", "T3511") else weights.reversed()
        bd = timer_model.timer_breakdown(sized_path, per_round[timer.name], sized_w)
        value = math.ceil(timer.value) if args.round_up else timer.value
        print(f"{timer.name} ({timer.kind.value}, rounds={timer.rounds}): {value:g} s"
              f"  [path term {bd.path_term:.6f} s, endpoint terms "
              f"{bd.origin_term:.6f} + {bd.responder_term:.6f} s x "
              f"{bd.rounds // 2 + 1}]")
    return 0


def cmd_run(args) -> int:
    try:
        grid = _load_grid(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    cells = []
    for ue_count in grid["ue_counts"]:
        for loss in grid["loss_probs"]:
            for mode in grid["modes"]:
                cell = {k: grid[k] for k in (
                    "snapshot", "origin", "responder", "seeds", "alpha", "beta",
                    "fixed_timers", "burst_window", "background_load_fraction",
                    "nas_retransmit_limit", "max_attempts", "p_active", "p_idle",
                    "horizon", "ue_processing_delay", "amf_discipline", "out_dir")}
                cell.update(ue_count=ue_count, loss=loss, mode=mode)
                cells.append(cell)

    os.makedirs(grid["out_dir"], exist_ok=True)
    with open(os.path.join(grid["out_dir"], "grid.json"), "w", encoding="utf-8") as fh:
        json.dump(grid, fh, indent=2, sort_keys=True)
        fh.write("\n")

    failures = []
    if grid["workers"] > 1:
        with ProcessPoolExecutor(max_workers=grid["workers"]) as pool:
            outcomes = list(pool.map(_run_cell_safe, cells))
    else:
        outcomes = [_run_cell_safe(cell) for cell in cells]
    for name, error in outcomes:
        if error is None:
            print(f"cell {name}: ok")
        else:
            print(f"cell {name}: FAILED ({error})")
            failures.append((name, error))
    print(f"{len(cells) - len(failures)}/{len(cells)} cells completed "
          f"-> {grid['out_dir']}")
    return 1 if failures else 0


def _run_cell_safe(cell: dict) -> tuple[str, str | None]:
    name = cell_name(cell["ue_count"], cell["loss"], cell["mode"])
    try:
        run_cell(cell)
        return name, None
    except Exception as exc:  # report per-cell, keep the sweep going
        return name, f"{type(exc).__name__}: {exc}"


def cmd_sweep_report(args) -> int:
    summaries = []
    for entry in sorted(os.listdir(args.artifact_dir)):
        summary_path = os.path.join(args.artifact_dir, entry, "summary.json")
        if os.path.isfile(summary_path):
            with open(summary_path, "r", encoding="utf-8") as fh:
                summaries.append((entry, json.load(fh)))
    if not summaries:
        print(f"error: no cell summaries under {args.artifact_dir!r}", file=sys.stderr)
        return 2
    summaries.sort(key=lambda item: (item[1]["cell"]["ue_count"],
                                     item[1]["cell"]["loss_probability"],
                                     item[1]["cell"]["mode"]))
    header = (f"{'cell':<28} {'success':>8} {'mean_att':>9} "
              f"{'mean_J':>9} {'expired':>8}")
    print(header)
    print("-" * len(header))
    for name, doc in summaries:
        print(f"{name:<28} {doc['success_fraction']:>8.3f} "
              f"{doc['mean_attempts']:>9.2f} {doc['mean_energy_j']:>9.3f} "
              f"{doc['expired_ratio_overall']:>8.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nastimer",
        description="Size NAS registration timers for satellite paths and "
                    "stress-simulate the registration call flow.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_size = sub.add_parser("size", help="size the registration timer suite")
    p_size.add_argument("snapshot", help="snapshot JSON file")
    p_size.add_argument("origin", help="origin node id (runs T3510/T3511)")
    p_size.add_argument("responder", help="responder node id (the AMF)")
    p_size.add_argument("--alpha", type=float, default=GRID_DEFAULTS["alpha"])
    p_size.add_argument("--beta", type=float, default=GRID_DEFAULTS["beta"])
    p_size.add_argument("--round-up", action="store_true",
                        help="present values rounded up to whole seconds")
    p_size.set_defaults(func=cmd_size)

    p_run = sub.add_parser("run", help="run a scenario grid")
    p_run.add_argument("--config", help="grid config JSON file")
    p_run.add_argument("--snapshot")
    p_run.add_argument("--origin")
    p_run.add_argument("--responder")
    p_run.add_argument("--out", help="artifact output directory")
    p_run.add_argument("--ues", help="comma-separated UE counts")
    p_run.add_argument("--loss", help="comma-separated loss probabilities")
    p_run.add_argument("--mode", help="comma-separated modes (astro,3gpp)")
    p_run.add_argument("--seeds", help="comma-separated seeds")
    p_run.add_argument("--alpha", type=float)
    p_run.add_argument("--beta", type=float)
    p_run.add_argument("--workers", type=int)
    p_run.set_defaults(func=cmd_run)

    p_report = sub.add_parser("sweep-report", help="tabulate artifact summaries")
    p_report.add_argument("artifact_dir")
    p_report.set_defaults(func=cmd_sweep_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
