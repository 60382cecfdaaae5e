"""Command line: render result figures from a simulation artifact tree.

    plotgen <artifact-dir> --family <name> [--ues N] [--loss P] [--mode M] --out <dir>

Families: reg-time-cdf, attempts-cdf, energy-all-cdf, energy-registered-cdf,
expired-ratio, or ``all`` for every family at once.
Exit codes: 0 success, 1 render failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import sys

from .artifacts import ArtifactError, SchemaMismatchError
from .render import FigureFamily, FigureRequest, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotgen", description="Render figures from sweep artifacts.")
    parser.add_argument("artifact_dir")
    parser.add_argument("--family", default="all",
                        choices=[f.value for f in FigureFamily] + ["all"])
    parser.add_argument("--ues", type=int, help="filter: UE count")
    parser.add_argument("--loss", type=float, help="filter: loss probability")
    parser.add_argument("--mode", help="filter: timer mode (astro or 3gpp)")
    parser.add_argument("--out", default="figures", help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.family == "all":
        families = list(FigureFamily)
    else:
        families = [FigureFamily(args.family)]
    try:
        for family in families:
            request = FigureRequest(artifact_dir=args.artifact_dir,
                                    family=family, ues=args.ues,
                                    loss=args.loss, mode=args.mode)
            print(render(request, args.out))
    except (ArtifactError, SchemaMismatchError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - unexpected render failure
        print(f"render failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
