"""Command line interface.

Subcommands: count, enumerate, prob, verify, limits, table, cache-audit.
Every run renders a row set either as RFC-style CSV (with a header row)
or as a JSON object {"meta": ..., "rows": ...}; numeric cells carry the
exact rational next to a decimal approximation, and decimals are never
used in any comparison.  Exit codes: 0 success, 1 verification
counterexample, 2 usage/parse error, 3 domain error.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import enumeration, formulas, verify
from .perms import (
    EMPTY_PATTERNS,
    SEP,
    ClusterEvent,
    DomainError,
    ParseError,
    PatternSet,
    is_cluster_free,
    parse_permutation,
)

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3

_DEFAULT_CACHE = Path.home() / ".permcluster" / "counts.txt"


def parse_avoid_spec(spec: str) -> PatternSet:
    """'' = no constraint; 'sep' = {2413, 3142}; otherwise '+'-joined patterns."""
    s = spec.strip()
    if not s:
        return EMPTY_PATTERNS
    if s.lower() == "sep":
        return SEP
    return PatternSet(tuple(parse_permutation(part) for part in s.split("+")))


def parse_int_range(spec: str) -> list[int]:
    """'4' -> [4]; '2..6' -> [2, 3, 4, 5, 6]."""
    s = spec.strip()
    if ".." in s:
        lo_s, hi_s = s.split("..", 1)
        if not (lo_s.strip().isdigit() and hi_s.strip().isdigit()):
            raise ParseError(f"bad range {spec!r}")
        lo, hi = int(lo_s), int(hi_s)
        if hi < lo:
            raise ParseError(f"empty range {spec!r}")
        return list(range(lo, hi + 1))
    if not s.isdigit():
        raise ParseError(f"bad range {spec!r}")
    return [int(s)]


def _dec(x) -> str:
    return format(float(x), ".15g")


def _ratio_cells(name: str, value: Fraction) -> dict[str, str]:
    return {name: f"{value.numerator}/{value.denominator}", f"{name}_dec": _dec(value)}


def _emit(records: list[dict], meta: dict, args, out) -> None:
    if args.no_meta:
        meta = {k: v for k, v in meta.items() if k != "generated_at"}
    if args.format == "json":
        json.dump({"meta": meta, "rows": records}, out, indent=2)
        out.write("\n")
        return
    for key, value in meta.items():
        out.write(f"# {key}={value}\n")
    if not records:
        return
    writer = csv.DictWriter(out, fieldnames=list(records[0].keys()))
    writer.writeheader()
    writer.writerows(records)


def _cache(args) -> enumeration.CountCache:
    return enumeration.CountCache(args.cache)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_count(args) -> tuple[list[dict], bool]:
    ps = parse_avoid_spec(args.avoid)
    value = enumeration.count_avoiders(args.n, ps, cache=_cache(args), jobs=args.jobs)
    return [{"n": str(args.n), "avoid": ps.key(), "count": str(value)}], False


def _cmd_enumerate(args) -> tuple[list[dict], bool]:
    ps = parse_avoid_spec(args.avoid)
    records = [{"permutation": p.text()} for p in enumeration.enumerate_avoiders(args.n, ps)]
    return records, False


def _closed_form(n: int, ps: PatternSet, event: ClusterEvent | None, cache) -> tuple[str, Fraction | None]:
    if event is None:
        return "none", None
    if ps.is_empty():
        return "uniform", formulas.uniform_probability(n, event.l, event.k)
    if len(ps) == 1 and ps.patterns[0].values in ((3, 2, 1), (1, 2, 3)):
        return "monotone3", formulas.monotone_cluster_probability(n, event.l, event.k)
    if ps == SEP:
        return "separable", formulas.separable_cluster_probability(n, event.l, cache=cache)
    if all(is_cluster_free(tau) for tau in ps):
        return "cluster-free product", formulas.cluster_free_probability(n, event.l, ps, cache=cache)
    return "none", None


def _prob_record(n: int, ps: PatternSet, event: ClusterEvent | None, union_l: int | None,
                 with_formula: bool, cache, jobs: int) -> dict:
    if union_l is not None:
        count = enumeration.count_union_event(n, ps, union_l, cache=cache, jobs=jobs)
        prob = enumeration.exact_probability(n, ps, union_l=union_l, cache=cache, jobs=jobs)
    else:
        count = enumeration.count_event(n, ps, event, cache=cache, jobs=jobs)
        prob = enumeration.exact_probability(n, ps, event, cache=cache, jobs=jobs)
    total = enumeration.event_count_table(n, ps, cache=cache, jobs=jobs).total
    rec = {
        "n": str(n),
        "avoid": ps.key(),
        "l": str(union_l if union_l is not None else event.l),
        "k": "" if (union_l is not None or event.k is None) else str(event.k),
        "a": "" if (union_l is not None or event.a is None) else str(event.a),
        "union": "yes" if union_l is not None else "",
        "event_count": str(count),
        "class_count": str(total),
    }
    rec.update(_ratio_cells("probability", prob))
    if with_formula:
        anchored = event is not None and event.a is not None
        name, value = ("none", None) if (union_l is not None or anchored) \
            else _closed_form(n, ps, event, cache)
        rec["formula"] = name
        if value is None:
            rec["formula_value"] = ""
            rec["formula_value_dec"] = ""
            rec["agree"] = ""
        else:
            rec.update({"formula_value": f"{value.numerator}/{value.denominator}",
                        "formula_value_dec": _dec(value)})
            rec["agree"] = "AGREE" if value == prob else "DISAGREE"
    return rec


def _cmd_prob(args) -> tuple[list[dict], bool]:
    ps = parse_avoid_spec(args.avoid)
    if args.union and (args.k is not None or args.a is not None):
        raise ParseError("--union excludes --k and --a")
    if not args.union and args.k is None:
        raise ParseError("give --k (or --union)")
    event = None if args.union else ClusterEvent(args.l, args.k, args.a)
    union_l = args.l if args.union else None
    rec = _prob_record(args.n, ps, event, union_l, args.formula, _cache(args), args.jobs)
    disagree = rec.get("agree") == "DISAGREE"
    return [rec], disagree


def _cmd_verify(args) -> tuple[list[dict], bool]:
    if args.suite == "all":
        reports = verify.run_all(args.max_n)
    else:
        reports = [verify.run_suite(args.suite, args.max_n)]
    records = []
    failed = False
    for rep in reports:
        for row in rep.rows:
            records.append({
                "suite": row.suite,
                "instance": row.instance,
                "expected": row.expected,
                "actual": row.actual,
                "status": "pass" if row.passed else "FAIL",
            })
        if not rep.passed:
            failed = True
            bad = rep.first_failure()
            print(
                f"counterexample in suite {rep.name}: {bad.instance}: "
                f"expected {bad.expected}, got {bad.actual}",
                file=sys.stderr,
            )
    return records, failed


def _cmd_limits(args) -> tuple[list[dict], bool]:
    cache = _cache(args)
    records = []
    ls = parse_int_range(args.l)
    if args.target == "sep":
        for l in ls:
            lim = formulas.separable_cluster_limit(l, cache=cache)
            rec = {"l": str(l), "limit": lim.symbolic(), "limit_dec": _dec(lim.approx)}
            if args.at_n:
                p = formulas.separable_cluster_probability(args.at_n, l, cache=cache)
                rec.update(_ratio_cells(f"value_at_n{args.at_n}", p))
                rec["gap_dec"] = _dec(abs(float(p) - lim.approx))
            records.append(rec)
        return records, False
    if args.target == "cor2":
        if args.fixed_k is not None:
            spec = formulas.LimitSpec.fixed_k(args.fixed_k)
        elif args.right_offset is not None:
            spec = formulas.LimitSpec.fixed_right_offset(args.right_offset)
        else:
            spec = formulas.LimitSpec.interior()
        for l in ls:
            lim = formulas.monotone_cluster_limit(l, spec)
            rec = {"l": str(l), "mode": spec.mode,
                   "k": "" if spec.k is None else str(spec.k)}
            rec.update(_ratio_cells("limit", lim))
            if args.at_n:
                k = spec.k if spec.k is not None else (args.at_n - l + 2) // 2
                p = formulas.monotone_cluster_probability(args.at_n, l, k)
                rec.update(_ratio_cells(f"value_at_n{args.at_n}", p))
                rec["gap_dec"] = _dec(abs(p - lim))
            records.append(rec)
        return records, False
    if args.target.startswith("cor1:"):
        tau = parse_permutation(args.target.split(":", 1)[1])
        for l in ls:
            rep = formulas.cluster_limit_report(tau, l, sw_limit=args.sw_limit, cache=cache)
            def cell(v):
                if v is None:
                    return "", ""
                if isinstance(v, Fraction):
                    return f"{v.numerator}/{v.denominator}", _dec(v)
                return _dec(v), _dec(v)
            up, up_d = cell(rep.upper)
            ex, ex_d = cell(rep.exact)
            lo, lo_d = cell(rep.lower)
            records.append({
                "pattern": tau.text(), "l": str(l),
                "growth_limit": "unavailable" if rep.limit_used is None else str(rep.limit_used),
                "upper": up, "upper_dec": up_d,
                "exact": ex, "exact_dec": ex_d,
                "lower": lo, "lower_dec": lo_d,
                "note": rep.note,
            })
        return records, False
    raise ParseError(f"unknown limits target {args.target!r} (use sep, cor2, or cor1:<pattern>)")


def _cmd_table(args) -> tuple[list[dict], bool]:
    ps = parse_avoid_spec(args.avoid)
    cache = _cache(args)
    records = []
    disagree = False
    for n in parse_int_range(args.n):
        ls = parse_int_range(args.l) if args.l else list(range(2, n))
        for l in ls:
            if not 2 <= l <= n - 1:
                continue
            if args.union:
                rec = _prob_record(n, ps, None, l, args.formula, cache, args.jobs)
                records.append(rec)
                continue
            ks = parse_int_range(args.k) if args.k else list(range(1, n - l + 2))
            for k in ks:
                if not 1 <= k <= n - l + 1:
                    continue
                rec = _prob_record(n, ps, ClusterEvent(l, k), None, args.formula, cache, args.jobs)
                records.append(rec)
                disagree = disagree or rec.get("agree") == "DISAGREE"
    return records, disagree


def _cmd_cache_audit(args) -> tuple[list[dict], bool]:
    cache = _cache(args)
    records = []
    mismatch = False
    for key, cached in cache.items():
        try:
            n, ps = enumeration.parse_cache_key(key)
        except (ParseError, ValueError):
            records.append({"key": key, "cached": str(cached), "recomputed": "",
                            "status": "corrupt-key"})
            continue
        if n > args.max_n:
            records.append({"key": key, "cached": str(cached), "recomputed": "",
                            "status": f"skipped (n > {args.max_n})"})
            continue
        fresh = enumeration.fresh_count(n, ps, jobs=args.jobs)
        ok = fresh == cached
        mismatch = mismatch or not ok
        records.append({"key": key, "cached": str(cached), "recomputed": str(fresh),
                        "status": "ok" if ok else "MISMATCH"})
    if mismatch:
        bad = next(r for r in records if r["status"] == "MISMATCH")
        print(f"cache mismatch at {bad['key']}: cached {bad['cached']}, "
              f"recomputed {bad['recomputed']}", file=sys.stderr)
    return records, mismatch


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--cache", default=str(_DEFAULT_CACHE), metavar="PATH")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--no-meta", action="store_true",
                        help="suppress timestamps for byte-identical reruns")

    parser = argparse.ArgumentParser(
        prog="permcluster",
        description="Exact cluster statistics for pattern-avoiding and separable permutations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", parents=[common], help="count |S_n(avoid)|")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--avoid", default="")

    p = sub.add_parser("enumerate", parents=[common],
                       help="list S_n(avoid) in lexicographic order")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--avoid", default="")

    p = sub.add_parser("prob", parents=[common], help="exact cluster-event probability")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--avoid", default="")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--union", action="store_true", help="the union event over all k")
    p.add_argument("--formula", action="store_true",
                   help="also print the matching closed form and AGREE/DISAGREE")

    p = sub.add_parser("verify", parents=[common], help="run identity suites")
    p.add_argument("suite", choices=sorted(verify.SUITES) + ["all"])
    p.add_argument("--max-n", type=int, dest="max_n")

    p = sub.add_parser("limits", parents=[common], help="n -> infinity limit tables")
    p.add_argument("target", help="sep | cor2 | cor1:<pattern>")
    p.add_argument("--l", required=True, help="single value or lo..hi")
    regime = p.add_mutually_exclusive_group()
    regime.add_argument("--fixed-k", type=int, dest="fixed_k")
    regime.add_argument("--right-offset", type=int, dest="right_offset")
    regime.add_argument("--interior", action="store_true")
    p.add_argument("--at-n", type=int, dest="at_n",
                   help="also evaluate the finite-n value and the gap")
    p.add_argument("--sw-limit", type=float, dest="sw_limit",
                   help="externally supplied growth constant for cor1 targets")

    p = sub.add_parser("table", parents=[common], help="probability grid over (n, l, k)")
    p.add_argument("--avoid", default="")
    p.add_argument("--n", required=True, help="single value or lo..hi")
    p.add_argument("--l", help="single value or lo..hi (default: all valid)")
    p.add_argument("--k", help="single value or lo..hi (default: all valid)")
    p.add_argument("--union", action="store_true")
    p.add_argument("--formula", action="store_true")

    p = sub.add_parser("cache-audit", parents=[common],
                       help="recompute cached counts and compare")
    p.add_argument("--max-n", type=int, dest="max_n", default=10,
                   help="recompute entries up to this n; larger ones are skipped")

    return parser


_COMMANDS = {
    "count": _cmd_count,
    "enumerate": _cmd_enumerate,
    "prob": _cmd_prob,
    "verify": _cmd_verify,
    "limits": _cmd_limits,
    "table": _cmd_table,
    "cache-audit": _cmd_cache_audit,
}


def main(argv: list[str] | None = None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    meta = {
        "command": "permcluster " + " ".join(argv),
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    try:
        records, failed = _COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    _emit(records, meta, args, out)
    return EXIT_COUNTEREXAMPLE if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
