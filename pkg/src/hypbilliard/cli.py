"""Command-line interface: ``python3 -m hypbilliard <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from hypbilliard import tolerances
from hypbilliard.billiard import (
    d_G,
    d_H,
    extract_code,
    hausdorff_endpoint_bound,
    sample_seed,
    trace,
)
from hypbilliard.errors import (
    CodeError,
    CodeMismatch,
    EdgeOrVertexHit,
    HypBilliardError,
    NoForwardHit,
    NotConverged,
    PolytopeError,
)
from hypbilliard.interchange import (
    chain_dict,
    dumps,
    load_polyhedron,
    load_trajectory,
    polyhedron_report,
    to_obj,
    trajectory_dict,
)
from hypbilliard.symcode import (
    EventuallyPeriodicCode,
    Word,
    orbit_equal,
    parse,
    sequence_metric,
    shift,
    validate_code,
    validate_word,
)
from hypbilliard.unfold import conjugacy_check, reconstruct, unfold_along, verify_nesting, window_word

EXIT_USAGE = 1
EXIT_POLYTOPE = 2
EXIT_EDGE_HIT = 3
EXIT_NOT_CONVERGED = 4
EXIT_CODE_MISMATCH = 5
EXIT_NO_FORWARD_HIT = 6
EXIT_INVALID_CODE = 7
EXIT_GEOMETRY = 8

EPILOG = """\
exit codes:
  0  success
  1  usage error (bad arguments, unreadable file)
  2  polyhedron validation failed (error name on stderr)
  3  trajectory hit an edge or vertex (partial output written, "complete": false)
  4  reconstruction did not converge (residual_radius on stderr)
  5  code mismatch (reconstruction or conjugacy check)
  6  geodesic has no forward hit
  7  invalid code (syntax, alphabet or grammar rule)
  8  other geometric failure (degenerate input, broken unfolding)

environment:
  HYP_TOL_FILE  JSON object of tolerance overrides, e.g. {"conv": 1e-6}
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# helpers


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _code(text):
    return parse(text)


# ---------------------------------------------------------------------------
# commands


def cmd_polyhedron(args):
    poly = load_polyhedron(args.spec)
    _emit(dumps(polyhedron_report(poly)), args.output)
    return 0


def cmd_trace(args):
    poly = load_polyhedron(args.poly)
    if args.random:
        rng = np.random.default_rng(args.seed)
        seeds = [sample_seed(poly, rng) for _ in range(args.count)]
    else:
        if args.point is None or args.direction is None:
            raise _Usage("trace needs --point and --direction, or --random")
        seeds = [(np.array(args.point), np.array(args.direction))]
    out, status = [], 0
    for point, direction in seeds:
        try:
            pt = trace(poly, point, direction, args.back, args.forward)
            d = trajectory_dict(pt)
        except EdgeOrVertexHit as exc:
            d = trajectory_dict(exc.partial, complete=False) if exc.partial else {"complete": False, "arcs": []}
            d["error"] = f"EdgeOrVertexHit: {exc}"
            print(f"EdgeOrVertexHit: {exc}", file=sys.stderr)
            status = EXIT_EDGE_HIT
        d["seed"] = {"point": [float(x) for x in point], "direction": [float(x) for x in direction]}
        out.append(d)
        if status:
            break
    _emit(dumps(out[0] if len(out) == 1 and not args.random else {"trajectories": out}), args.output)
    if args.figure and out and out[0].get("arcs"):
        from hypbilliard.interchange import trajectory_from_dict
        from hypbilliard.plotting import trajectory_figure

        trajectory_figure(trajectory_from_dict(out[0], poly), args.figure)
    return status


def cmd_code(args):
    if args.action == "validate":
        poly = load_polyhedron(args.poly)
        c = _code(args.code)
        v = validate_word(c, poly) if isinstance(c, Word) else validate_code(c, poly)
        if v is None:
            print("valid")
            return 0
        print(str(v))
        return EXIT_INVALID_CODE
    if args.action == "shift":
        print(str(shift(_code(args.code), args.by)))
        return 0
    x, y = _code(args.x), _code(args.y)
    if args.action == "metric":
        d = sequence_metric(x, y, args.horizon)
        print(dumps({"distance": d.value, "at_horizon": d.at_horizon}), end="")
        return 0
    print(dumps({"orbit_equal": orbit_equal(x, y, args.horizon)}), end="")
    return 0


def cmd_reconstruct(args):
    poly = load_polyhedron(args.poly)
    original = None
    if args.trajectory:
        original = load_trajectory(args.trajectory, poly)
        code = extract_code(original)
    elif args.code:
        code = _code(args.code)
    else:
        raise _Usage("reconstruct needs --code or --trajectory")
    try:
        pt, rep = reconstruct(poly, code, args.depth, guard=args.guard, verify=args.verify)
    except NotConverged as exc:
        print(f"NotConverged: {exc}", file=sys.stderr)
        print(f"residual_radius={exc.residual:.6g}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    d = trajectory_dict(pt)
    d["report"] = {
        "depth": rep.depth,
        "guard": rep.guard,
        "residual_forward": rep.residual_forward,
        "residual_backward": rep.residual_backward,
        "base_check": rep.base_check,
    }
    if original is not None:
        d["report"]["d_G_to_original"] = d_G(pt, original)
    _emit(dumps(d), args.output)
    return 0


def cmd_unfold(args):
    poly = load_polyhedron(args.poly)
    c = _code(args.code)
    w = window_word(c, args.depth) if isinstance(c, EventuallyPeriodicCode) else c
    chain = unfold_along(poly, w, args.base)
    _emit(dumps(chain_dict(chain)), args.output)
    if args.figure:
        from hypbilliard.plotting import chain_figure

        chain_figure(chain, verify_nesting(chain), args.figure)
    return 0


def cmd_conjugacy(args):
    pt = load_trajectory(args.trajectory)
    rep = conjugacy_check(pt.poly, pt, args.window)
    _emit(
        dumps(
            {
                "window": rep.window,
                "mismatches": [list(m) for m in rep.mismatches],
                "d_G_tau": rep.d_G_tau,
                "ok": rep.ok,
            }
        ),
        args.output,
    )
    if rep.mismatches:
        print(f"CodeMismatch: {len(rep.mismatches)} positions differ", file=sys.stderr)
        return EXIT_CODE_MISMATCH
    return 0


def cmd_metrics(args):
    a, b = load_trajectory(args.a), load_trajectory(args.b)
    if args.which == "dg":
        d = {"d_G": d_G(a, b)}
    else:
        d = {"d_H": d_H(a, b), "endpoint_bound": hausdorff_endpoint_bound(a, b)}
    _emit(dumps(d), args.output)
    return 0


def cmd_export(args):
    poly = load_polyhedron(args.poly)
    pt = load_trajectory(args.trajectory, poly) if args.trajectory else None
    _emit(to_obj(poly, pt, args.resolution, args.samples), args.output)
    return 0


# ---------------------------------------------------------------------------
# parser


class _Usage(Exception):
    pass


def build_parser():
    p = _Parser(
        prog="hypbilliard",
        description="Billiards in ideal hyperbolic polyhedra: tracing, symbolic codes, unfolding.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--tol-file", help="JSON tolerance overrides (applied after HYP_TOL_FILE)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def poly_opt(sp):
        sp.add_argument("--poly", default="tetrahedron", help="built-in name or polyhedron JSON file")

    def out_opt(sp):
        sp.add_argument("--output", help="write here instead of stdout")

    sp = sub.add_parser("polyhedron", help="describe a polyhedron")
    sp.add_argument("spec", help="tetrahedron, octahedron or a JSON file")
    out_opt(sp)
    sp.set_defaults(func=cmd_polyhedron)

    sp = sub.add_parser("trace", help="trace a billiard trajectory")
    poly_opt(sp)
    sp.add_argument("--point", type=float, nargs=3, metavar=("X", "Y", "Z"))
    sp.add_argument("--direction", type=float, nargs=3, metavar=("VX", "VY", "VZ"))
    sp.add_argument("--back", type=int, default=20, help="arcs before the base arc")
    sp.add_argument("--forward", type=int, default=20, help="arcs after the base arc")
    sp.add_argument("--random", action="store_true", help="sample seed point and direction")
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0, help="64-bit RNG seed for --random")
    sp.add_argument("--figure", help="PNG of the trajectory projections")
    out_opt(sp)
    sp.set_defaults(func=cmd_trace)

    sp = sub.add_parser("code", help="symbolic code utilities")
    csub = sp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    c = csub.add_parser("validate", help="check the grammar rules")
    poly_opt(c)
    c.add_argument("code")
    c = csub.add_parser("shift", help="move the point")
    c.add_argument("code")
    c.add_argument("--by", type=int, default=1)
    for name in ("metric", "orbit-equal"):
        c = csub.add_parser(name)
        c.add_argument("x")
        c.add_argument("y")
        c.add_argument("--horizon", type=int, default=64 if name == "metric" else 32)
    sp.set_defaults(func=cmd_code)

    sp = sub.add_parser("reconstruct", help="trajectory from a code")
    poly_opt(sp)
    sp.add_argument("--code")
    sp.add_argument("--trajectory", help="take the code from a trajectory JSON and compare")
    sp.add_argument("--depth", type=int, default=60)
    sp.add_argument("--guard", type=int, default=2)
    sp.add_argument("--verify", action="store_true", help="repeat from a second base point")
    out_opt(sp)
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("unfold", help="dump the unfolding chain of a code")
    poly_opt(sp)
    sp.add_argument("--code", required=True)
    sp.add_argument("--depth", type=int, default=10, help="window for periodic codes")
    sp.add_argument("--base", type=float, nargs=3, metavar=("X", "Y", "Z"))
    sp.add_argument("--figure", help="PNG of radii and distances against step")
    out_opt(sp)
    sp.set_defaults(func=cmd_unfold)

    sp = sub.add_parser("conjugacy-check", help="compare h(tau x) with sigma(h x)")
    sp.add_argument("--trajectory", required=True)
    sp.add_argument("--window", type=int, default=10)
    out_opt(sp)
    sp.set_defaults(func=cmd_conjugacy)

    sp = sub.add_parser("metrics", help="distances between pointed trajectories")
    sp.add_argument("which", choices=("dg", "dh"))
    sp.add_argument("a")
    sp.add_argument("b")
    out_opt(sp)
    sp.set_defaults(func=cmd_metrics)

    sp = sub.add_parser("export", help="OBJ mesh of the faces and arc polylines")
    poly_opt(sp)
    sp.add_argument("--trajectory")
    sp.add_argument("--format", choices=("obj",), default="obj")
    sp.add_argument("--resolution", type=int, default=8, help="subdivisions per face triangle edge")
    sp.add_argument("--samples", type=int, default=64, help="points per arc")
    out_opt(sp)
    sp.set_defaults(func=cmd_export)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tolerances.load_env()
        if args.tol_file:
            with open(args.tol_file) as fh:
                tolerances.override(json.load(fh))
        return args.func(args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HypBilliardError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return _exit_code(exc)


def _exit_code(exc):
    for cls, code in (
        (PolytopeError, EXIT_POLYTOPE),
        (EdgeOrVertexHit, EXIT_EDGE_HIT),
        (NotConverged, EXIT_NOT_CONVERGED),
        (CodeMismatch, EXIT_CODE_MISMATCH),
        (NoForwardHit, EXIT_NO_FORWARD_HIT),
        (CodeError, EXIT_INVALID_CODE),
    ):
        if isinstance(exc, cls):
            return code
    return EXIT_GEOMETRY
