"""Command line interface: ``invoreduce <subcommand> ...``.

Exit codes carry verification results: ``reduce`` exits 0 iff RL is a pure
PDE operator, ``commute`` iff the commutator vanishes, ``find-reducer`` iff
a reducer was found, ``verify`` iff the residual is under the threshold.
Usage errors and malformed input exit with 2.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .dsl import DSLError, load
from .involution import InvolutionError
from .opalgebra import OperatorError, find_reducer, is_pure_pde, op_commutator, op_compose, reduce_order2, reducer_space
from .scalars import ScalarFieldError

log = logging.getLogger("invoreduce")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _operator(prog, name: str):
    try:
        return prog.operators[name]
    except KeyError:
        raise SystemExit(f"error: no operator named {name!r} (defined: {', '.join(prog.operators) or 'none'})")


def _load(path: str):
    return load(Path(path).read_text(encoding="utf-8"))


# ------------------------------------------------------------- symbolic


def cmd_reduce(args) -> int:
    prog = _load(args.file)
    L = _operator(prog, args.op)
    R = reduce_order2(L)
    RL = op_compose(R, L)
    pure = is_pure_pde(RL)
    doc = {"operator": args.op, "L": L.to_json_obj(), "R": R.to_json_obj(), "RL": RL.to_json_obj(), "pure_pde": pure}
    _emit(_dump(doc), args.out)
    return 0 if pure else 1


def cmd_compose(args) -> int:
    prog = _load(args.file)
    R, L = _operator(prog, args.left), _operator(prog, args.right)
    _emit(_dump(op_compose(R, L).to_json_obj()), args.out)
    return 0


def cmd_commute(args) -> int:
    prog = _load(args.file)
    L, R = _operator(prog, args.left), _operator(prog, args.right)
    C = op_commutator(L, R)
    _emit(_dump({"left": args.left, "right": args.right, "commutator": C.to_json_obj(), "zero": C.is_zero()}), args.out)
    return 0 if C.is_zero() else 1


def cmd_find_reducer(args) -> int:
    prog = _load(args.file)
    L = _operator(prog, args.op)
    space = reducer_space(L, args.max_degree)
    print(f"nullspace dimension: {space.dim}")
    R = find_reducer(L, args.max_degree)
    if R is None:
        print("none")
        return 1
    doc = {"R": R.to_json_obj(), "RL": op_compose(R, L).to_json_obj()}
    _emit(_dump(doc), args.out)
    return 0


# -------------------------------------------------------------- numeric


def _grid(text: str):
    try:
        nr, nphi = (int(t) for t in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 64x128, got {text!r}")
    return nr, nphi


def _point(text: str) -> tuple[float, float]:
    try:
        r, phi = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"point must look like r,phi, got {text!r}")
    return r, phi


def _numeric_setup(args):
    from .greens import DiskSpec, SeriesTruncation
    from .quadrature import QuadSpec

    spec = DiskSpec(args.rho, args.alpha, args.beta)
    trunc = SeriesTruncation(args.nmax, args.mmax)
    quad = QuadSpec(jacobian=args.jacobian == "on")
    return spec, trunc, quad


def cmd_greens_eval(args) -> int:
    from .greens import biharm_apply_R, biharm_navier_g3, g4_heat_disk, grid_values, write_grid_csv
    from .numverify import PolarGrid

    spec, trunc, quad = _numeric_setup(args)
    nr, nphi = args.grid
    grid = PolarGrid(spec.rho, nr, nphi)
    if args.model == "heat-disk":
        G = g4_heat_disk(spec, trunc, quad)
    else:
        G = biharm_apply_R(spec, biharm_navier_g3(spec.rho))
    t0 = time.perf_counter()
    values = grid_values(G, grid.r, grid.phi, args.source)
    out = Path(args.out)
    write_grid_csv(out, grid.r, grid.phi, values)
    meta = {
        "model": args.model,
        "kernel": G.describe(),
        "spec": spec.to_dict(),
        "truncation": trunc.to_dict(),
        "quadrature": quad.to_dict(),
        "jacobian": quad.jacobian,
        "grid": grid.to_dict(),
        "source": list(args.source),
    }
    out.with_suffix(".json").write_text(_dump(meta) + "\n")
    log.info("wrote %s in %.2fs", out, time.perf_counter() - t0)
    return 0


SOURCES = {
    "const": lambda rho: (lambda r, phi: np.ones_like(r)),
    "bump": lambda rho: (lambda r, phi: 1.0 - (r / rho) ** 2),
    "gauss": lambda rho: (
        lambda r, phi: np.exp(-((r * np.cos(phi) - 0.2 * rho) ** 2 + (r * np.sin(phi) - 0.3 * rho) ** 2) / (0.08 * rho * rho))
    ),
}


def cmd_verify(args) -> int:
    from .greens import g4_heat_disk
    from .numverify import PolarGrid, residual_check

    spec, trunc, quad = _numeric_setup(args)
    nr, nphi = args.grid
    grid = PolarGrid(spec.rho, nr, nphi)
    G = g4_heat_disk(spec, trunc, quad)
    t0 = time.perf_counter()
    report = residual_check(G, SOURCES[args.source](spec.rho), spec, grid)
    report.metadata["source"] = args.source
    report.metadata["threshold"] = args.threshold
    log.info("residual check took %.1fs", time.perf_counter() - t0)
    _emit(report.to_json(indent=2, sort_keys=True), args.out)
    return 0 if report.l2_relative <= args.threshold else 1


def cmd_bessel_zeros(args) -> int:
    from .specfun import bessel_zero_table

    table = bessel_zero_table(args.nmax, args.mmax)
    lines = ["n,m,mu"]
    for n in range(args.nmax + 1):
        for m in range(1, args.mmax + 1):
            lines.append(f"{n},{m},{table[n, m - 1]:.17g}")
    _emit("\n".join(lines), args.out)
    return 0


# --------------------------------------------------------------- parser


def _add_numeric(p: argparse.ArgumentParser):
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--nmax", type=int, default=20)
    p.add_argument("--mmax", type=int, default=20)
    p.add_argument("--grid", type=_grid, default=(64, 128), help="NRxNPHI (default 64x128)")
    p.add_argument("--jacobian", choices=("on", "off"), default="on", help="area factor r in compositions")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="invoreduce", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="order-2 reducer R and the product RL")
    p.add_argument("file")
    p.add_argument("--op", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("compose", help="product of two operators, left applied last")
    p.add_argument("file")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("commute", help="commutator LR - RL")
    p.add_argument("file")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_commute)

    p = sub.add_parser("find-reducer", help="search for R with RL free of pullbacks")
    p.add_argument("file")
    p.add_argument("--op", required=True)
    p.add_argument("--max-degree", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_find_reducer)

    p = sub.add_parser("greens", help="Green's function kernels")
    gsub = p.add_subparsers(dest="greens_command", required=True)
    q = gsub.add_parser("eval", help="sample a kernel on a polar grid for a fixed source")
    q.add_argument("--model", choices=("heat-disk", "biharm"), default="heat-disk")
    _add_numeric(q)
    q.add_argument("--source", type=_point, default=(0.5, 0.3), help="source point r,phi")
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_greens_eval)

    p = sub.add_parser("verify", help="residual of L(H_G h) = h for the heat model")
    p.add_argument("--model", choices=("heat-disk",), default="heat-disk")
    _add_numeric(p)
    p.add_argument("--source", choices=sorted(SOURCES), default="bump")
    p.add_argument("--threshold", type=float, default=5e-2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bessel", help="Bessel function utilities")
    bsub = p.add_subparsers(dest="bessel_command", required=True)
    q = bsub.add_parser("zeros", help="table of zeros mu_nm as CSV")
    q.add_argument("--nmax", type=int, default=20)
    q.add_argument("--mmax", type=int, default=20)
    q.add_argument("--out")
    q.set_defaults(func=cmd_bessel_zeros)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except DSLError as exc:
        print(f"{args.file}:{exc}", file=sys.stderr)
    except (OperatorError, InvolutionError, ScalarFieldError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
