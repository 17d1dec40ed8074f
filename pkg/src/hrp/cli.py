"""Command line entry point: ``hrp {run,sample,solve,approx}``."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from hrp.approx import adapted_approx, coarsen, girsanov_path, translate
from hrp.core import Flavor
from hrp.io import (
    FormatError,
    read_dyadic_path,
    read_rough_path,
    write_rough_path,
    write_solution,
)
from hrp.rde import FIELDS, BlowUpError, constant_field, lift_solution, solve, zero_field
from hrp.sampler import BridgeSubdivision, EbmConfig, RngStream, TruncatedSeries, sample_ebm


def _method(text: str):
    kind, _, arg = text.partition(":")
    if kind == "bridge":
        return BridgeSubdivision(int(arg) if arg else 4)
    if kind == "series":
        return TruncatedSeries(int(arg) if arg else 32)
    raise argparse.ArgumentTypeError("method must be bridge[:m] or series[:terms]")


def _field(text: str, N: int, d: int):
    kind, _, arg = text.partition(":")
    if kind == "zero":
        return zero_field(N, d)
    if kind == "constant":
        if not arg:
            raise ValueError("constant field needs a matrix file: constant:<file>")
        return constant_field(np.loadtxt(arg, ndmin=2))
    if kind == "custom":
        if arg not in FIELDS:
            raise ValueError(f"unknown custom field {arg!r}; known: {', '.join(FIELDS)}")
        return FIELDS[arg]()
    if text in FIELDS:
        return FIELDS[text]()
    raise ValueError(f"unknown field {text!r}")


def cmd_run(args) -> int:
    from hrp.experiments import run

    report, csv_path, json_path = run(args.config)
    for key, ok in report.passed.items():
        print(f"{'PASS' if ok else 'FAIL'} {report.name}.{key}")
    print(f"wrote {csv_path} and {json_path}")
    return 0 if report.ok else 1


def cmd_sample(args) -> int:
    cfg = EbmConfig(args.K, args.d, args.method, Flavor(args.flavor))
    X = sample_ebm(cfg, RngStream(args.seed).generator())
    write_rough_path(X, args.out)
    return 0


def cmd_solve(args) -> int:
    X = read_rough_path(args.driver)
    y0 = np.array([float(v) for v in args.y0.split(",")])
    f = _field(args.field, len(y0), X.d)
    sol = solve(X, f, y0, substeps=args.substeps)
    if args.lift:
        write_rough_path(lift_solution(sol, X, f), args.out)
    else:
        write_solution(sol.times, sol.values, args.out)
    return 0


def cmd_approx(args) -> int:
    X = read_rough_path(args.inp)
    op = args.op
    if op in ("coarsen", "adapted", "girsanov") and args.n is None:
        raise ValueError(f"--op {op} needs --n")
    if op in ("translate", "girsanov") and args.h is None:
        raise ValueError(f"--op {op} needs --h")
    if op == "coarsen":
        Y = coarsen(X, args.n)
    elif op == "adapted":
        Y = adapted_approx(X, args.n)
    elif op == "translate":
        Y = translate(X, read_dyadic_path(args.h))
    else:
        Y = girsanov_path(X, read_dyadic_path(args.h), args.n)
    write_rough_path(Y, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hrp", description="Level-2 rough paths on dyadic grids.")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("--config", required=True)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sample", help="sample enhanced Brownian motion")
    s.add_argument("--K", type=int, default=10)
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--flavor", choices=["stratonovich", "ito"], default="stratonovich")
    s.add_argument("--method", type=_method, default=BridgeSubdivision(4),
                   help="bridge[:m] or series[:terms]")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)

    v = sub.add_parser("solve", help="solve dy = f(y) dX")
    v.add_argument("--driver", required=True)
    v.add_argument("--field", required=True,
                   help="zero | constant:<matrix file> | linear-scalar | custom:<name>")
    v.add_argument("--y0", required=True, help="comma-separated initial value")
    v.add_argument("--lift", action="store_true", help="write the lifted solution rough path")
    v.add_argument("--substeps", type=int, default=1)
    v.add_argument("--out", required=True)
    v.set_defaults(func=cmd_solve)

    a = sub.add_parser("approx", help="apply an approximation operator")
    a.add_argument("--in", dest="inp", required=True)
    a.add_argument("--op", required=True, choices=["coarsen", "adapted", "translate", "girsanov"])
    a.add_argument("--n", type=int)
    a.add_argument("--h")
    a.add_argument("--out", required=True)
    a.set_defaults(func=cmd_approx)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, BlowUpError, ValueError, OSError) as exc:
        print(f"hrp {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
