"""Command line interface: ``tetrademag eval | verify | bench``.

Exit codes: 0 success, 2 usage error, 3 unreadable or malformed input,
4 invalid mesh, 5 verification threshold breached.
"""
from __future__ import annotations

import argparse
import sys

from . import __version__
from .bench import run_benchmark
from .mesh import (
    MeshFormatError,
    MeshValidationError,
    evaluate,
    load_mesh,
    parse_line_spec,
    read_points_csv,
    write_field_csv,
)
from .oracle import QuadratureSpec
from .verification import run_verification

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_VALIDATION = 4
EXIT_VERIFY = 5


def cmd_eval(args) -> int:
    try:
        mesh = load_mesh(args.mesh)
    except MeshFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except MeshValidationError as exc:
        print(f"error: {args.mesh}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        evalset = read_points_csv(args.points) if args.points else parse_line_spec(args.line)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    records = evaluate(mesh, evalset)
    if args.out in (None, "-"):
        write_field_csv(records, sys.stdout)
    else:
        write_field_csv(records, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = QuadratureSpec(rel_tol=args.quad_tol)
    checks = run_verification(seed=args.seed, tol=args.tol, n=args.n, n_random=args.random, spec=spec)
    for c in checks:
        print(c.line())
    ok = all(c.passed for c in checks)
    print("verification " + ("passed" if ok else "FAILED"))
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_bench(args) -> int:
    result = run_benchmark(n=args.n, cache_pose=args.cache_pose, seed=args.seed)
    print(result.report())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tetrademag", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate H and B of a mesh at points, write CSV")
    p.add_argument("--mesh", required=True, help="mesh JSON file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--points", help="CSV file with header x,y,z (meters)")
    src.add_argument("--line", help="line scan, e.g. axis=x,through=3e-3:3e-3:2.5e-3,range=0:6e-3,n=200")
    p.add_argument("--out", help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="compare the analytic field with surface quadrature")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-6, help="max relative error (default 1e-6)")
    p.add_argument("--n", type=int, default=200, help="points per reference line scan")
    p.add_argument("--random", type=int, default=5, help="number of random tetrahedra")
    p.add_argument("--quad-tol", type=float, default=1e-10, help="quadrature relative tolerance")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time tensor evaluations per tetrahedron-point")
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--cache-pose", action="store_true", help="headline the timing without geometry setup")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
