"""Command-line entry point: ``tcpkit <command> <tensor-file> [options]``.

Exit codes: 0 success, 1 negative outcome (no solution, failed check,
unconverged estimate), 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import degree, sampling, tcp
from .classify import ALL_PROPS, classify
from .io import InputError, fixture_names, load_fixture, parse_tensor_file, parse_vector
from .spectral import DEFAULT_TOL, spectral_radius
from .tensor import Tensor, TensorError
from .verdict import jsonable
from .verify import TAGS, run_verify

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2
FIXTURE_PREFIX = "fixture:"


def default_seed() -> int:
    raw = os.environ.get("TCPKIT_SEED")
    if raw is None:
        return sampling.DEFAULT_SEED
    try:
        return int(raw, 0)
    except ValueError:
        raise InputError(f"TCPKIT_SEED must be an integer, got {raw!r}") from None


def load_tensor(spec: str) -> Tensor:
    """A tensor file path, or ``fixture:<name>`` for a bundled tensor."""
    if spec.startswith(FIXTURE_PREFIX):
        return load_fixture(spec[len(FIXTURE_PREFIX):])
    return parse_tensor_file(spec)


def _text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for key, value in obj.items():
            if isinstance(value, (dict, list)) and value and not _flat(value):
                lines.append(f"{pad}{key}:")
                lines.extend(_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_scalar(value)}")
    elif isinstance(obj, list):
        for item in obj:
            if isinstance(item, (dict, list)) and not _flat(item):
                lines.append(f"{pad}-")
                lines.extend(_text(item, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(item)}")
    else:
        lines.append(f"{pad}{_scalar(obj)}")
    return lines


def _flat(value) -> bool:
    return isinstance(value, list) and all(not isinstance(v, (dict, list)) for v in value)


def _scalar(value) -> str:
    if isinstance(value, list):
        return "[" + ", ".join(_scalar(v) for v in value) + "]"
    if isinstance(value, float):
        return f"{value:.12g}"
    return json.dumps(value) if value is None or isinstance(value, bool) else str(value)


def emit(payload, args) -> None:
    if args.quiet:
        return
    payload = jsonable(payload)
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=False))
    else:
        print("\n".join(_text(payload)))


def cmd_classify(args) -> int:
    A = load_tensor(args.tensor)
    props = ALL_PROPS if args.props == "all" else tuple(p.strip() for p in args.props.split(",") if p.strip())
    bad = sorted(set(props) - set(ALL_PROPS))
    if bad:
        raise InputError(f"unknown properties {bad}; choose from {', '.join(ALL_PROPS)} or 'all'")
    emit(classify(A, props, args.tol, args.seed).to_dict(), args)
    return EXIT_OK


def cmd_spectral(args) -> int:
    A = load_tensor(args.tensor)
    if np.any(A.data < 0):
        raise InputError("spectral expects a nonnegative tensor")
    est = spectral_radius(A, args.tol)
    emit(est.to_dict(), args)
    return EXIT_OK if est.converged else EXIT_NEGATIVE


def cmd_solve(args) -> int:
    A = load_tensor(args.tensor)
    inst = tcp.TCPInstance(A, parse_vector(args.q, A.dim))
    if args.method == "fixed-point":
        if args.x0 is not None:
            raise InputError("--x0 applies to the newton method only")
        sol = tcp.solve_fixed_point(inst, tol=args.tol)
    elif args.x0 is not None:
        sol = tcp.solve_newton(inst, parse_vector(args.x0, A.dim), tol=args.tol, max_iter=args.max_iter)
    else:
        sol = tcp.solve_multistart(inst, tol=args.tol, max_iter=args.max_iter)
    if sol is None:
        emit({"solution": None, "method": args.method}, args)
        return EXIT_NEGATIVE
    emit(sol.to_dict(), args)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    A = load_tensor(args.tensor)
    inst = tcp.TCPInstance(A, parse_vector(args.q, A.dim))
    if A.dim > tcp.MAX_ENUM_DIM:
        raise InputError(f"enumerate is limited to n <= {tcp.MAX_ENUM_DIM}")
    found = tcp.enumerate_solutions(inst, box_radius=args.box, grid=args.grid)
    emit(found.to_dict(), args)
    return EXIT_OK if found.solutions else EXIT_NEGATIVE


def cmd_degree(args) -> int:
    A = load_tensor(args.tensor)
    if A.dim > degree.MAX_DEGREE_DIM or A.order > degree.MAX_DEGREE_ORDER:
        raise InputError(f"degree is limited to n <= {degree.MAX_DEGREE_DIM} and m <= {degree.MAX_DEGREE_ORDER}")
    try:
        result = degree.local_degree(A, args.map, radius=args.radius, probes=args.probes, seed=args.seed,
                                     tol=args.tol, grid=args.grid)
    except degree.PremiseError as exc:
        emit({"value": None, "refused": str(exc)}, args)
        return EXIT_NEGATIVE
    emit(result.to_dict(), args)
    return EXIT_OK if result.consistent else EXIT_NEGATIVE


def cmd_verify(args) -> int:
    m_set = tuple(int(v) for v in args.m_set.split(","))
    tags = TAGS if args.tags == "all" else tuple(t.strip() for t in args.tags.split(","))
    bad = sorted(set(tags) - set(TAGS))
    if bad:
        raise InputError(f"unknown tags {bad}; choose from {', '.join(TAGS)}")
    extra = [load_tensor(path) for path in args.inject]
    report = run_verify(args.seed, args.n_max, m_set, args.instances, extra, tags)
    text = report.to_json()
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    if not args.quiet:
        if args.format == "json":
            print(text)
        else:
            for tag, res in report.tags.items():
                print(f"{tag:6s} pass={res.passed} fail={res.failed} skip={res.skipped}")
            print("ok" if report.ok else "FAILED")
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="numerical tolerance (default %(default)g)")
    common.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                        help="random seed (default: $TCPKIT_SEED or %d)" % sampling.DEFAULT_SEED)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--quiet", action="store_true", help="print nothing; report through the exit code")

    parser = argparse.ArgumentParser(prog="tcpkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    tensor_help = "tensor JSON file, or fixture:<name> (" + ", ".join(fixture_names()) + ")"

    p = sub.add_parser("classify", parents=[common], help="property verdicts for a tensor")
    p.add_argument("tensor", help=tensor_help)
    p.add_argument("--props", default="all", help="comma-separated subset of " + ",".join(ALL_PROPS))
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("spectral", parents=[common], help="spectral radius of a nonnegative tensor")
    p.add_argument("tensor", help=tensor_help)
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("solve", parents=[common], help="solve TCP(A, q)")
    p.add_argument("tensor", help=tensor_help)
    p.add_argument("--q", required=True, help="comma-separated reals, JSON array, or JSON file")
    p.add_argument("--method", choices=("newton", "fixed-point"), default="newton")
    p.add_argument("--x0", default=None, help="starting point for newton")
    p.add_argument("--max-iter", type=int, default=100)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("enumerate", parents=[common], help="all solutions of TCP(A, q) in a box")
    p.add_argument("tensor", help=tensor_help)
    p.add_argument("--q", required=True)
    p.add_argument("--box", type=float, default=10.0)
    p.add_argument("--grid", type=int, default=20)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("degree", parents=[common], help="local degree at 0 of F or of the min-map")
    p.add_argument("tensor", help=tensor_help)
    p.add_argument("--map", choices=("F", "Phi"), default="F")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--probes", type=int, default=degree.DEFAULT_PROBES)
    p.add_argument("--grid", type=int, default=degree.DEFAULT_GRID)
    p.set_defaults(func=cmd_degree)

    p = sub.add_parser("verify", parents=[common], help="run the property suite")
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--m-set", default="3,4")
    p.add_argument("--instances", type=int, default=4)
    p.add_argument("--tags", default="all", help="comma-separated subset of " + ",".join(TAGS))
    p.add_argument("--inject", action="append", default=[], help="extra tensor fed to the Z-tensor suites")
    p.add_argument("--output", default=None, help="also write the JSON report here")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.seed is None:
            args.seed = default_seed()
        return args.func(args)
    except (InputError, TensorError, ValueError) as exc:
        print(f"tcpkit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
