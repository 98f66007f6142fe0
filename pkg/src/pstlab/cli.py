"""Command-line front end.

Exit codes: 0 ok, 1 negative finding (no PST, not cospectral, ...),
2 bad input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from math import pi
from pathlib import Path

import numpy as np

from . import pst, spectral
from .evolution import EvolutionSchedule, fidelity_trace, load_schedule
from .graph import ConnectionSet, Graph, GraphError, complement_vertex, cubelike, hypercube
from .spectral import DecompositionError
from .switching import BlockSpec, build_block_cube, switched_hypercube

log = logging.getLogger("pstlab")

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

_NUM = r"\d+(?:\.\d*)?|\.\d+"
_PI_RE = re.compile(rf"^(?:({_NUM})\s*\*?\s*)?pi(?:\s*/\s*({_NUM}))?$")


def parse_time(text: str) -> float:
    """Decimal, or a multiple of pi such as ``pi/2``, ``3pi/4``, ``2*pi``."""
    s = text.strip().lower().replace("π", "pi")
    sign = 1.0
    if s.startswith("-"):
        sign, s = -1.0, s[1:].strip()
    m = _PI_RE.match(s)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        if den == 0:
            raise argparse.ArgumentTypeError(f"zero denominator in {text!r}")
        return sign * num * pi / den
    try:
        return sign * float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse time {text!r}") from None


def positive_float(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return x


def build_graph(kind: str, n: int, blocks: str | list | None = None,
                connection: str | list | None = None) -> Graph:
    if kind == "hypercube":
        return hypercube(n)
    if kind == "switched":
        return switched_hypercube(n)
    if kind in ("partial", "blend"):
        if blocks is None:
            raise GraphError(f"'{kind}' needs block weights")
        spec = BlockSpec.parse(n, blocks) if isinstance(blocks, str) else BlockSpec(n, tuple(blocks))
        if kind == "partial" and any(p not in (0.0, 1.0) for p in spec.blocks):
            raise GraphError("partial cubes take block weights 0 or 1; use 'blend' for mixtures")
        return build_block_cube(spec)
    if kind == "cubelike":
        if connection is None:
            raise GraphError("'cubelike' needs a connection set")
        elems = connection.split(",") if isinstance(connection, str) else list(connection)
        return cubelike(ConnectionSet(n, tuple(elems)))
    raise GraphError(f"unknown graph kind {kind!r}")


def _resolve(ref: dict) -> Graph:
    return build_graph(ref["build"], int(ref["n"]), ref.get("blocks"), ref.get("connection"))


def load_dynamics(path: str) -> Graph | EvolutionSchedule:
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise GraphError(f"{path}: invalid JSON: {exc}") from None
    if isinstance(data, dict) and "segments" in data:
        return load_schedule(data, base=p.parent, resolve=_resolve)
    return Graph.from_dict(data)


def load_graph(path: str) -> Graph:
    dyn = load_dynamics(path)
    if not isinstance(dyn, Graph):
        raise GraphError(f"{path} is a schedule; this command needs a single graph")
    return dyn


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def cmd_build(args) -> int:
    g = build_graph(args.kind, args.n, args.blocks, args.connection)
    _emit(args, g.to_json())
    return EXIT_OK


def cmd_pst(args) -> int:
    dyn = load_dynamics(args.input)
    if isinstance(dyn, Graph) and args.t is None:
        raise GraphError("--t is required for a single graph")
    rep = pst.find_pst_pairs(dyn, args.t, args.tol)
    m = dyn.m
    _emit(args, _dump(rep.to_dict(one_based=m <= 32)))
    return EXIT_OK if rep.pairs else EXIT_NEGATIVE


def cmd_trace(args) -> int:
    g = load_graph(args.input)
    times = np.arange(args.start, args.stop + args.step / 2, args.step)
    tr = fidelity_trace(g, args.source, args.target, times)
    if args.format == "csv":
        _emit(args, tr.to_csv())
    else:
        _emit(args, _dump({"source": tr.source, "target": tr.target,
                           "samples": [[t, p] for t, p in tr.samples()]}))
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    if args.input:
        dyn = load_dynamics(args.input)
    elif args.family:
        dyn = build_graph(args.family, args.n, args.blocks)
    else:
        raise GraphError("give a graph/schedule file or --family")
    m = dyn.m
    n = m.bit_length() - 1
    target = args.vertex if args.vertex is not None else (complement_vertex(0, n) if m == 1 << n else m - 1)
    if not 0 <= target < m:
        raise GraphError(f"vertex {target} out of range")
    t0 = args.t if args.t is not None else (dyn.total_time if isinstance(dyn, EvolutionSchedule) else pst.PST_TIME)
    source = pst.pst_partner(dyn, target, t0)
    analytic = pst.fidelity_derivative_analytic(dyn, target, t0, args.order)
    numeric = (pst.fidelity_derivative_numeric(dyn, source, target, t0, args.order, args.step)
               if args.order in (1, 2) else None)
    _emit(args, _dump({"pair": [source, target], "t0": t0, "order": args.order,
                       "analytic": analytic, "numeric": numeric, "h": args.step}))
    return EXIT_OK


def cmd_spectral(args) -> int:
    what = args.what
    if what == "cospectral":
        a, b = load_graph(args.inputs[0]), load_graph(args.inputs[1])
        ok = spectral.are_cospectral(a, b, args.tol)
        _emit(args, _dump({"cospectral": ok, "tol": args.tol}))
        return EXIT_OK if ok else EXIT_NEGATIVE
    if len(args.inputs) != 1:
        raise GraphError(f"'{what}' takes exactly one graph file")
    g = load_graph(args.inputs[0])
    if what == "decompose":
        _emit(args, _dump(spectral.eigendecompose(g, args.cluster_tol).to_dict()))
        return EXIT_OK
    if what == "hadamard":
        ok = spectral.is_standard_hadamard_diagonalizable(g, args.tol)
        _emit(args, _dump({"hadamard_diagonalizable": ok, "tol": args.tol}))
        return EXIT_OK if ok else EXIT_NEGATIVE
    if what == "minpoly":
        _emit(args, _dump({"coefficients": spectral.minimal_polynomial(g, args.cluster_tol)}))
        return EXIT_OK
    if args.vertex is None:
        raise GraphError(f"'{what}' needs --vertex")
    dec = spectral.eigendecompose(g, args.cluster_tol)
    if what == "support":
        _emit(args, _dump({"vertex": args.vertex,
                           "support": spectral.eigenvalue_support(g, args.vertex, dec=dec)}))
        return EXIT_OK
    verdict = spectral.pst_obstruction_check(g, args.vertex, dec=dec)
    _emit(args, _dump({"vertex": args.vertex, "verdict": verdict.value}))
    return EXIT_NEGATIVE if verdict is spectral.Verdict.OBSTRUCTED else EXIT_OK


def cmd_census(args) -> int:
    blocks = [BlockSpec.parse(args.n, b).blocks for b in (args.blocks or [])]
    report = pst.pst_census(args.family, args.n, blocks, args.t, args.tol)
    _emit(args, _dump(report))
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pstlab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=False):
        p.add_argument("--out", help="write to this file instead of stdout")
        if fmt:
            p.add_argument("--format", choices=("json", "csv"), default="csv")

    p = sub.add_parser("build", help="emit a graph as JSON")
    p.add_argument("kind", choices=("hypercube", "switched", "partial", "blend", "cubelike"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--blocks", help="comma list of per-block weights (1 plain, 0 switched)")
    p.add_argument("--connection", help="comma list of bit strings, e.g. 01,10,11")
    common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("pst", help="find PST pairs in a graph or schedule")
    p.add_argument("input")
    p.add_argument("--t", type=parse_time, help="readout time; schedules default to their total time")
    p.add_argument("--tol", type=positive_float, default=1e-6)
    common(p)
    p.set_defaults(func=cmd_pst)

    p = sub.add_parser("trace", help="fidelity over a uniform time grid")
    p.add_argument("input")
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--start", type=parse_time, default=0.0)
    p.add_argument("--stop", type=parse_time, default=pi)
    p.add_argument("--step", type=parse_time, default=pi / 64)
    common(p, fmt=True)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("sensitivity", help="fidelity derivatives at a PST time")
    p.add_argument("input", nargs="?")
    p.add_argument("--family", choices=("hypercube", "switched", "partial", "blend"))
    p.add_argument("--n", type=int)
    p.add_argument("--blocks")
    p.add_argument("--vertex", type=int, help="PST target vertex (default: all-ones vertex)")
    p.add_argument("--t", type=parse_time)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--step", type=positive_float, default=1e-3, help="finite-difference step")
    common(p)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("spectral", help="spectral predicates")
    p.add_argument("what", choices=("decompose", "cospectral", "hadamard", "minpoly", "support", "obstruction"))
    p.add_argument("inputs", nargs="+")
    p.add_argument("--vertex", type=int)
    p.add_argument("--tol", type=positive_float, default=1e-8)
    p.add_argument("--cluster-tol", type=positive_float, default=1e-8)
    common(p)
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("census", help="PST pair counts over a family of cubes")
    p.add_argument("--family", choices=[f.value for f in pst.Family], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--blocks", action="append", help="block weights for blend (repeatable)")
    p.add_argument("--t", type=parse_time, default=pst.PST_TIME)
    p.add_argument("--tol", type=positive_float, default=1e-6)
    common(p)
    p.set_defaults(func=cmd_census)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except pst.NoPSTError as exc:
        print(f"pstlab: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except DecompositionError as exc:
        print(f"pstlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GraphError, ValueError, IndexError, KeyError, OSError) as exc:
        print(f"pstlab: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
