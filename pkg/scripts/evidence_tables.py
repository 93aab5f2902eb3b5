#!/usr/bin/env python3
"""Emit the numerical evidence tables for the two open problems.

Neither question is decidable by computation; these tables only summarize
what exact evaluation shows at desk scale.

  decay    limiting cluster probabilities as a function of the block
           length l, for the classes with known limits (the 321/123
           classes in both k regimes, and the separable class).  All
           columns decay towards 0, i.e. no super-clustering is visible.
  ratios   consecutive-count ratios |S_{n+1}(ps)| / |S_n(ps)|, the
           finite-n evidence for the class growth constants.

Usage:
    python3 scripts/evidence_tables.py decay --max-l 12
    python3 scripts/evidence_tables.py ratios --avoid 321 --max-n 30
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from permcluster import (  # noqa: E402
    LimitSpec,
    monotone_cluster_limit,
    ratio_sequence,
    separable_cluster_limit,
    stanley_wilf_limit,
)
from permcluster.cli import parse_avoid_spec  # noqa: E402


def emit_decay(max_l: int) -> None:
    writer = csv.writer(sys.stdout)
    writer.writerow([
        "l",
        "monotone3_interior",
        "monotone3_fixed_k1",
        "separable",
        "separable_symbolic",
    ])
    for l in range(2, max_l + 1):
        interior = monotone_cluster_limit(l, LimitSpec.interior())
        edge = monotone_cluster_limit(l, LimitSpec.fixed_k(1))
        sep = separable_cluster_limit(l)
        writer.writerow([
            l,
            f"{float(interior):.6e}",
            f"{float(edge):.6e}",
            f"{sep.approx:.6e}",
            sep.symbolic(),
        ])


def emit_ratios(avoid: str, max_n: int) -> None:
    ps = parse_avoid_spec(avoid)
    sw = stanley_wilf_limit(ps)
    target = "" if not sw.known else f"{sw.approx:.6f}"
    writer = csv.writer(sys.stdout)
    writer.writerow(["n", "ratio", "ratio_dec", "known_growth_limit"])
    for n, r in enumerate(ratio_sequence(ps, max_n), start=1):
        writer.writerow([n, f"{r.numerator}/{r.denominator}", f"{float(r):.6f}", target])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    sub = parser.add_subparsers(dest="table", required=True)
    p = sub.add_parser("decay")
    p.add_argument("--max-l", type=int, default=12)
    p = sub.add_parser("ratios")
    p.add_argument("--avoid", default="321")
    p.add_argument("--max-n", type=int, default=30)
    args = parser.parse_args()
    if args.table == "decay":
        emit_decay(args.max_l)
    else:
        emit_ratios(args.avoid, args.max_n)
    return 0


if __name__ == "__main__":
    sys.exit(main())
