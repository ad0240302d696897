"""Command-line front end.

Exit codes: 0 all checks pass, 1 a check failed, 2 schema error or unknown
suite, 3 numerical breakdown.  With several scenario files the largest code
wins.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .errors import SchemaError
from .fredholm import jsonable
from .gallery import GALLERY
from .scenario import BREAKDOWN, check_transform, error_report, load, run_scenario
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_SCHEMA, EXIT_BREAKDOWN = 0, 1, 2, 3


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _levels(text):
    try:
        levels = [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--levels expects N1,N2,... got {text!r}") from None
    if len(levels) < 2 or any(n < 1 for n in levels) or any(b <= a for a, b in zip(levels, levels[1:])):
        raise argparse.ArgumentTypeError("--levels needs at least two positive, strictly increasing values")
    return tuple(levels)


def _overrides(sc, args):
    if args.levels is not None:
        sc.levels = args.levels
    if args.tol_rank is not None:
        sc.tol_rank = args.tol_rank
    if args.tol_residual is not None:
        sc.tol_residual = args.tol_residual
    if args.seed is not None:
        sc.seed = args.seed
    return sc


def _one(path, args, mode):
    """Run a single file; returns (exit code, report)."""
    try:
        sc = _overrides(load(path), args)
    except SchemaError as exc:
        return EXIT_SCHEMA, error_report(path, "schema-error", exc)
    try:
        if mode == "analyze":
            rep = run_scenario(sc, timing=args.timing)
        else:
            rep = jsonable({
                "tool": "kfredholm", "version": __version__, "seed": sc.seed,
                "scenario": sc.echo(), "status": "ok",
                "results": {"transform": check_transform(sc, sc.tower())},
            })
            rep["passed"] = rep["results"]["transform"]["passed"]
    except BREAKDOWN as exc:
        return EXIT_BREAKDOWN, error_report(path, "numerical-breakdown", exc, sc.seed)
    rep["file"] = str(path)
    return (EXIT_OK if rep["passed"] else EXIT_FAIL), rep


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_files(args, mode):
    jobs = max(1, args.jobs)
    if jobs > 1 and len(args.files) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_one, args.files, [args] * len(args.files), [mode] * len(args.files)))
    else:
        results = [_one(p, args, mode) for p in args.files]
    for code, rep in results:
        if code in (EXIT_SCHEMA, EXIT_BREAKDOWN):
            print(f"{rep['file']}: {rep['status']}: {rep['message']}", file=sys.stderr)
    reports = [rep for _, rep in results]
    _emit(dumps(reports[0] if len(reports) == 1 else reports), args.out)
    return max(code for code, _ in results)


def cmd_verify(args):
    if args.suite not in SUITES:
        print(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}", file=sys.stderr)
        return EXIT_SCHEMA
    seed = 0 if args.seed is None else args.seed
    res = run_suite(args.suite, seed)
    report = res.to_json()
    report.update({"tool": "kfredholm", "version": __version__})
    if args.json:
        _emit(dumps(report), args.out)
    else:
        sys.stdout.write(res.summary_csv())
        if args.out:
            _emit(dumps(report), args.out)
    if not res.passed:
        print("first failing instance (replay payload):", file=sys.stderr)
        print(dumps(report["first_failure"]), file=sys.stderr, end="")
        return EXIT_FAIL
    return EXIT_OK


def cmd_gallery(args):
    if args.json:
        _emit(dumps({"tool": "kfredholm", "version": __version__, "gallery": [g.to_json() for g in GALLERY]}), args.out)
        return EXIT_OK
    lines = [f"{'name':30s} {'fredholm':9s} {'index':>5s}  provenance"]
    for g in GALLERY:
        idx = "-" if g.index is None else str(g.index)
        lines.append(f"{g.name:30s} {str(g.is_fredholm).lower():9s} {idx:>5s}  {g.provenance}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=None, help="absolute singular-value cutoff (0 = automatic)")
    common.add_argument("--tol-residual", type=float, default=None, help="residual tolerance for identity checks")
    common.add_argument("--levels", type=_levels, default=None, help="truncation levels, e.g. 16,32")
    common.add_argument("--seed", type=int, default=None, help="seed for random instances")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers for several files")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--timing", action="store_true", help="include wall time (reports stop being byte-identical)")

    p = argparse.ArgumentParser(prog="kfredholm", description="Fredholm analysis of operators on Hilbert C*-modules over compact operators.")
    p.add_argument("--version", action="version", version=f"kfredholm {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", parents=[common], help="run the checks listed in scenario files")
    a.add_argument("files", nargs="+")
    v = sub.add_parser("verify", parents=[common], help="run a named invariant suite")
    v.add_argument("--suite", required=True)
    sub.add_parser("gallery", parents=[common], help="list built-in towers with expected verdicts")
    t = sub.add_parser("transform", parents=[common], help="bounded-transform round trip report")
    t.add_argument("files", nargs="+")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_SCHEMA if exc.code else EXIT_OK
    if args.command == "analyze":
        return _run_files(args, "analyze")
    if args.command == "transform":
        return _run_files(args, "transform")
    if args.command == "verify":
        return cmd_verify(args)
    return cmd_gallery(args)


if __name__ == "__main__":
    sys.exit(main())
