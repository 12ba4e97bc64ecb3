"""Command-line front end.

Every subcommand writes plain LF-terminated text to stdout.  Floats are
printed with 12 significant digits so that outputs can be compared byte for
byte.  Exit status: 0 on success, 1 when a network is invalid or a numerical
check fails, 2 on usage errors (bad flags, unknown vertices, missing files).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import frame as fr
from . import models, operators
from .energy import VerificationError, dipole, dipole_system, resistance_matrix
from .network import InvalidNetworkError, NetworkError, dumps, load, save, validate


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """%.12g with -0 printed as 0, NaN as an empty field."""
    x = float(x)
    if math.isnan(x):
        return ""
    s = format(x, ".12g")
    return "0" if s == "-0" else s


def _read(path: str):
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return load(p)


def _valid(path: str):
    net = _read(path)
    net.require_valid()
    return net


def _vertex(net, x: str) -> str:
    if x not in net.index:
        raise UsageError(f"unknown vertex {x!r}")
    return x


def _table(rows, csv: bool) -> list[str]:
    """Key/value rows as CSV or as left-aligned text."""
    if csv:
        return [f"{k},{v}" for k, v in rows]
    width = max((len(k) for k, _ in rows), default=0)
    return [f"{k.ljust(width)}  {v}" for k, v in rows]


# ---- subcommands -------------------------------------------------------------------


def cmd_validate(args) -> tuple[int, list[str]]:
    net = _read(args.file)
    report = validate(net)
    if report.ok:
        return 0, ["ok"]
    return 1, report.lines()


def cmd_dipole(args):
    net = _valid(args.file)
    v = dipole(net, _vertex(net, args.x), _vertex(net, args.y))
    return 0, ["vertex,value"] + [f"{x},{fmt(val)}" for x, val in zip(net.vertices, v.values)]


def cmd_resistance(args):
    net = _valid(args.file)
    if args.all_pairs:
        if args.x is not None:
            raise UsageError("give either two vertices or --all-pairs")
        R = resistance_matrix(net)
        V = net.vertices
        rows = [f"{V[i]},{V[j]},{fmt(R[i, j])}" for i in range(len(V)) for j in range(i + 1, len(V))]
    else:
        if args.x is None or args.y is None:
            raise UsageError("resistance needs two vertices or --all-pairs")
        x, y = _vertex(net, args.x), _vertex(net, args.y)
        R = resistance_matrix(net)
        rows = [f"{x},{y},{fmt(R[net.index[x], net.index[y]])}"]
    return 0, ["x,y,distance"] + rows


def cmd_gramian(args):
    net = _valid(args.file)
    system = dipole_system(net)
    out = ["vertex," + ",".join(system.vertices)]
    for x, row in zip(system.vertices, system.gramian):
        out.append(x + "," + ",".join(fmt(g) for g in row))
    return 0, out


def _orientation(net, choice: str):
    if choice in ("lex", "geometric"):
        return fr.orient(net, choice)
    if choice.startswith("current:"):
        parts = choice.split(":")
        if len(parts) != 3:
            raise UsageError("orientation must look like current:SRC:SINK")
        src, sink = _vertex(net, parts[1]), _vertex(net, parts[2])
        if src == sink:
            raise UsageError("current orientation needs distinct source and sink")
        return fr.orient(net, "current-induced", src, sink)
    raise UsageError(f"unknown orientation {choice!r}")


def cmd_frame_check(args):
    net = _valid(args.file)
    frame = fr.build_frame(net, _orientation(net, args.orientation))
    return 0, _table(fr.frame_diagnostics(frame).rows(), args.csv)


def cmd_currents(args):
    net = _valid(args.file)
    v = dipole(net, _vertex(net, args.x), _vertex(net, args.y))
    oriented = fr.orient(net)
    cur = fr.currents(net, v, oriented)
    return 0, ["from,to,current"] + [f"{a},{b},{fmt(c)}" for (a, b), c in zip(oriented, cur)]


def cmd_factorize(args):
    net = _valid(args.file)
    tol = args.tol if args.tol is not None else operators.FACTOR_RTOL
    res = operators.friedrichs_matrix(net, rtol=tol)
    rows = [
        ("ll_star_defect", fmt(res.defect)),
        ("quadratic_form_defect", fmt(operators.quadratic_form_defect(net, seed=args.seed))),
        ("greens_gauss_defect", fmt(operators.greens_gauss_check(net))),
        ("adjoint_K_defect", fmt(operators.adjointness_defect(net, operators.build_K(net), seed=args.seed))),
        ("adjoint_L_defect", fmt(operators.adjointness_defect(net, operators.build_L(net), seed=args.seed))),
        ("geometry", res.spectrum.geometry),
    ]
    rows += [(f"eigenvalue[{k}]", fmt(v)) for k, v in enumerate(res.spectrum.eigenvalues)]
    return 0, _table(rows, args.csv)


def cmd_transition(args):
    net = _valid(args.file)
    tol = args.tol if args.tol is not None else operators.TRANSITION_TOL
    rep = operators.transition_operator(net, tol=tol)
    rows = [
        ("geometry", rep.spectrum.geometry),
        ("factorization_defect", fmt(rep.factorization_defect)),
        ("asymmetry", fmt(rep.asymmetry)),
        ("spectral_radius", fmt(rep.spectral_radius)),
        ("row_sum_defect", fmt(rep.row_sum_defect)),
        ("energy_norm", fmt(rep.energy_norm)),
    ]
    rows += [(f"eigenvalue[{k}]", fmt(v)) for k, v in enumerate(rep.spectrum.eigenvalues)]
    return 0, _table(rows, args.csv)


def _model_network(args):
    kind = args.kind
    if kind == "path":
        if args.a:
            a = [float(t) for t in args.a.split(",")]
            return models.PathModel(a).network()
        return models.PathModel(lambda n: np.ones(np.shape(n)), args.N).network()
    if kind == "geometric":
        return models.GeometricModel(args.Q, args.N).network()
    if kind == "tree":
        pm = args.pminus if args.pminus is not None else 1.0 - args.p0 - args.p1
        return models.binary_tree_network(models.BinaryTreeModel(args.p0, args.p1, pm, args.depth)).network
    if kind == "strip":
        return models.lattice_strip_network(models.LatticeStripModel(args.Q, args.Qbar, args.N, args.rung))
    return models.triangle_network(models.TriangleModel(args.c01, args.c02, args.c12))


def cmd_model(args):
    if args.deficiency:
        if args.kind != "geometric":
            raise UsageError("--deficiency applies to the geometric model only")
        rep = models.deficiency_recurrence(models.GeometricModel(args.Q, args.N))
        out = ["n,u,diff_ratio,energy_partial"]
        out += [f"{n},{fmt(u)},{fmt(r)},{fmt(e)}" for n, u, r, e in rep.rows()]
        verdict = rep.energy_classification
        if rep.indicator != verdict:
            verdict += f"; {rep.indicator}"
        print(f"energy: {verdict}", file=sys.stderr)
        return 0, out
    net = _model_network(args)
    if args.emit:
        save(net, args.emit)
        return 0, []
    return 0, dumps(net).splitlines()


# ---- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for randomized checks (default 42)")
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                        help="override the verification tolerance")
    common.add_argument("--csv", action="store_true", default=argparse.SUPPRESS,
                        help="key,value output instead of aligned text")

    p = argparse.ArgumentParser(prog="energynet",
                                description="Energy-space analysis of finite resistor networks.")
    p.add_argument("--seed", type=int, default=42, help="seed for randomized checks (default 42)")
    p.add_argument("--tol", type=float, default=None, help="override the verification tolerance")
    p.add_argument("--csv", action="store_true", default=False,
                   help="key,value output instead of aligned text")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_, description=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("validate", cmd_validate, "check a network file")
    sp.add_argument("file")
    sp = add("dipole", cmd_dipole, "grounded dipole v_xy as vertex,value CSV")
    sp.add_argument("file")
    sp.add_argument("x")
    sp.add_argument("y")
    sp = add("resistance", cmd_resistance, "effective resistance as x,y,distance CSV")
    sp.add_argument("file")
    sp.add_argument("x", nargs="?")
    sp.add_argument("y", nargs="?")
    sp.add_argument("--all-pairs", action="store_true", help="every unordered pair")
    sp = add("gramian", cmd_gramian, "energy Gramian of the grounded dipoles")
    sp.add_argument("file")
    sp = add("frame-check", cmd_frame_check, "Parseval frame diagnostics")
    sp.add_argument("file")
    sp.add_argument("--orientation", default="lex",
                    help="lex, geometric or current:SRC:SINK (default lex)")
    sp = add("currents", cmd_currents, "edge currents of dipole x,y as from,to,current CSV")
    sp.add_argument("file")
    sp.add_argument("x")
    sp.add_argument("y")
    sp = add("factorize", cmd_factorize, "LL* versus Laplacian and the spectrum on the energy space")
    sp.add_argument("file")
    sp = add("transition", cmd_transition, "transition operator checks and its l2(c) spectrum")
    sp.add_argument("file")

    sp = add("model", cmd_model, "generate an example network")
    sp.add_argument("kind", choices=["path", "geometric", "tree", "strip", "triangle"])
    sp.add_argument("--emit", metavar="FILE", help="write the network file here")
    sp.add_argument("--deficiency", action="store_true",
                    help="geometric only: print the deficiency recurrence as CSV")
    sp.add_argument("--N", type=int, default=10, help="truncation (default 10)")
    sp.add_argument("--Q", type=float, default=2.0, help="geometric ratio (default 2)")
    sp.add_argument("--Qbar", type=float, default=3.0, help="second strip rail ratio (default 3)")
    sp.add_argument("--rung", type=float, default=1.0, help="strip rung conductance (default 1)")
    sp.add_argument("--a", help="path conductances a_1,...,a_N (default all 1)")
    sp.add_argument("--p0", type=float, default=0.4, help="tree: append 0 (default 0.4)")
    sp.add_argument("--p1", type=float, default=0.4, help="tree: append 1 (default 0.4)")
    sp.add_argument("--pminus", type=float, default=None,
                    help="tree: step back (default 1 - p0 - p1)")
    sp.add_argument("--depth", type=int, default=4, help="tree depth (default 4)")
    sp.add_argument("--c01", type=float, default=1.0, help="triangle conductance (default 1)")
    sp.add_argument("--c02", type=float, default=1.0, help="triangle conductance (default 1)")
    sp.add_argument("--c12", type=float, default=1.0, help="triangle conductance (default 1)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code, lines = args.func(args)
    except UsageError as exc:
        print(f"energynet: error: {exc}", file=sys.stderr)
        return 2
    except InvalidNetworkError as exc:
        first = exc.report.lines()[0] if exc.report.lines() else str(exc)
        print(f"energynet: invalid network: {first}", file=sys.stderr)
        return 1
    except (NetworkError, VerificationError, ValueError) as exc:
        print(f"energynet: error: {str(exc).splitlines()[0]}", file=sys.stderr)
        return 1
    if lines:
        sys.stdout.write("\n".join(lines) + "\n")
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
