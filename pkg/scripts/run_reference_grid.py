#!/usr/bin/env python3
"""Run the reference evaluation grid and print the sweep report.

Drives the CLI over the bundled ground-anchored snapshot: UE counts
{3000, 4000, 5000} x loss {0..50%} x both timer modes x 10 seeds.  That is
360 simulations; pass --quick for a small smoke grid instead.

Usage:
    python3 scripts/run_reference_grid.py --out artifacts [--quick] [--workers 2]
"""

import argparse
import pathlib

from nastimer.cli import main as cli_main

SNAPSHOT = str(pathlib.Path(__file__).resolve().parent.parent
               / "snapshots" / "leo_ground_anchored.json")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="artifacts")
    parser.add_argument("--workers", type=int, default=2)
    parser.add_argument("--quick", action="store_true",
                        help="2 UE counts x 2 losses x 2 seeds")
    args = parser.parse_args()

    run_args = ["run", "--snapshot", SNAPSHOT, "--origin", "ue1",
                "--responder", "amf1", "--out", args.out,
                "--workers", str(args.workers)]
    if args.quick:
        run_args += ["--ues", "500,1000", "--loss", "0,0.25", "--seeds", "1,2"]
    code = cli_main(run_args)
    if code != 0:
        return code
    return cli_main(["sweep-report", args.out])


if __name__ == "__main__":
    raise SystemExit(main())
