"""Command-line front end.

Subcommands ``green``, ``halfline`` and ``wedge`` write a field table;
``validate`` runs the cross-method checks for one problem and prints a
report.  Exit codes: 0 success, 2 validation failure, 1 usage or numerical
error.
"""

import argparse
import logging
import math
import sys

import numpy as np

from . import __version__
from .core import Lattice
from .table import FieldTable

log = logging.getLogger("helmlattice")

METHODS = {
    "green": ("double", "single", "recursive", "oracle"),
    "halfline": ("residue", "wh", "sommerfeld", "oracle"),
    "wedge": ("elliptic", "oracle"),
}
DEFAULT_METHOD = {"green": "recursive", "halfline": "residue", "wedge": "elliptic"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common(p):
    p.add_argument("--k-re", type=float, required=True, help="real part of K")
    p.add_argument("--k-im", type=float, required=True, help="imaginary part of K (> 0)")
    p.add_argument("--phi-in", type=float, help="incidence angle in radians")
    p.add_argument("--nmax", type=int, default=10, help="window size")
    p.add_argument("--method", help="solver (see --help of the subcommand)")
    p.add_argument("--grid", type=int, default=None, help="quadrature points M")
    p.add_argument("--box", type=int, default=60, help="box radius R of the oracle solve")
    p.add_argument("--tol", type=float, default=None, help="validation tolerance")
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    ap = _Parser(prog="helmlattice", description="Discrete Helmholtz solvers on the square lattice.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    for name in ("green", "halfline", "wedge"):
        p = sub.add_parser(name, help=f"{name} field table (methods: {', '.join(METHODS[name])})")
        _common(p)
    p = sub.add_parser("validate", help="run the cross-method checks for a problem")
    p.add_argument("problem", choices=("green", "halfline", "wedge"))
    p.add_argument("--flip-branch", action="store_true",
                   help="use a deliberately wrong branch sign (the report must fail)")
    _common(p)
    return ap


def _K(args):
    if not args.k_im > 0:
        raise UsageError("--k-im must be positive")
    return complex(args.k_re, args.k_im)


def _phi(args, problem):
    if args.phi_in is None:
        raise UsageError(f"--phi-in is required for {problem}")
    lo = -math.pi / 2 if problem == "halfline" else 0.0
    if not lo < args.phi_in < math.pi / 2:
        raise UsageError(f"--phi-in must lie in ({lo:.6g}, {math.pi / 2:.6g}) for {problem}")
    return args.phi_in


def _method(args, problem):
    m = args.method or DEFAULT_METHOD[problem]
    if m not in METHODS[problem]:
        raise UsageError(f"method {m!r} is not available for {problem}; "
                         f"choose from {', '.join(METHODS[problem])}")
    return m


def _green_residuals(table, kappa):
    from .greens import green_rhs
    res = table.stencil_residuals(kappa, rhs=green_rhs)
    table.meta["max_stencil_residual"] = max((abs(v) for v in res.values()), default=0.0)
    table.meta["max_boundary_residual"] = 0.0
    return table


def _diamond(table, N):
    vals = {k: v for k, v in table.values.items() if abs(k[0]) + abs(k[1]) <= N}
    return FieldTable(vals, table.meta)


def green_table(K, N, method, grid=None, box=60):
    from . import greens, oracle
    lat = Lattice(K)
    if method == "double":
        M = grid or 256
        t = greens.green_double_table(lat, N, M)
    elif method == "single":
        t = greens.green_single_table(lat, N, grid or greens.DEFAULT_GRID)
    elif method == "recursive":
        t = greens.green_recursive(lat, N, grid or greens.DEFAULT_GRID)
    else:
        t = _diamond(oracle.solve_green(K, box, window=N), N)
    return _green_residuals(t, lat.kappa)


def halfline_field_table(K, phi, N, method, grid=None, box=60, flip_branch=False):
    from . import halfline, oracle
    if method == "oracle":
        lat = Lattice(K)
        inc = lat.incident_wave(phi)
        t = oracle.solve_scattering(K, box, inc.x_in, inc.y_in, "halfline", window=N)
        t.meta["phi_in"] = phi
        return halfline.annotate(t, lat.kappa, halfline.on_halfline)
    return halfline.halfline_table(K, phi, N, method, M_grid=grid or 2048, flip_branch=flip_branch)


def wedge_field_table(K, phi, N, method, box=60, flip_branch=False):
    from . import wedge, oracle, halfline
    if method == "oracle":
        lat = Lattice(K)
        inc = lat.incident_wave(phi, lo=0.0, hi=math.pi / 2)
        t = oracle.solve_scattering(K, box, inc.x_in, inc.y_in, "wedge", window=N)
        t.meta["phi_in"] = phi
        return halfline.annotate(t, lat.kappa, wedge.in_scatterer)
    return wedge.wedge_table(K, phi, N, flip_branch=flip_branch)


def _emit(table, args):
    if args.out == "-":
        table.dump(sys.stdout, args.format)
    else:
        table.write(args.out, args.format)


# -- validation -------------------------------------------------------------------
class Report:
    def __init__(self):
        self.rows = []

    def check(self, name, value, tol):
        ok = bool(np.isfinite(value) and value <= tol)
        self.rows.append((name, float(value), float(tol), ok))
        return ok

    @property
    def ok(self):
        return all(r[3] for r in self.rows)

    def render(self):
        out = []
        for name, v, tol, ok in self.rows:
            out.append(f"{'PASS' if ok else 'FAIL'}  {name:<44s} {v:.3e}  (tol {tol:.1e})")
        out.append("OK" if self.ok else "FAILED")
        return "\n".join(out)


def validate_green(K, N, tol, grid, box):
    from . import oracle
    rep = Report()
    tabs = {m: green_table(K, N, m, grid) for m in ("double", "single", "recursive")}
    for m, t in tabs.items():
        rep.check(f"stencil residual ({m})", t.meta["max_stencil_residual"], tol)
    names = list(tabs)
    for i in range(3):
        for j in range(i + 1, 3):
            a, b = tabs[names[i]], tabs[names[j]]
            rep.check(f"{names[i]} vs {names[j]}", a.max_abs_diff(b), tol)
    o = oracle.solve_green(K, box, window=N)
    est = o.meta["truncation_estimate"]
    d = max(abs(o[k] - tabs["double"][k]) for k in tabs["double"].nodes())
    rep.check("oracle vs double", d, max(1e-6, est))
    return rep


def validate_halfline(K, phi, N, tol, grid, box, flip_branch=False):
    from . import halfline, oracle
    rep = Report()
    lat = Lattice(K)
    T = halfline.HalflineTransformant(lat, phi, flip_branch=flip_branch, check=False)
    want = np.array([-1, 0, 0, 1]) / halfline.TWO_PI_I
    res = np.array(list(T.pole_residues().values()))
    rep.check("pole residues of A Psi", float(np.max(np.abs(res - want))), tol)
    r = halfline.halfline_table(lat, phi, N, "residue", flip_branch=flip_branch)
    w = halfline.halfline_table(lat, phi, N, "wh", M_grid=grid or 2048)
    rep.check("boundary |u(m, 0)|, m >= 0", r.meta["max_boundary_residual"], tol)
    rep.check("stencil residual (residue)", r.meta["max_stencil_residual"], tol)
    rep.check("residue vs Wiener-Hopf", r.max_abs_diff(w), tol)
    inc = T.incident
    o = oracle.solve_scattering(K, box, inc.x_in, inc.y_in, "halfline", window=N)
    d = max(abs(o[k] - r[k]) for k in r.nodes())
    rep.check("oracle vs residue", d, max(1e-6, o.meta["truncation_estimate"]))
    return rep


def validate_wedge(K, phi, N, tol, box, flip_branch=False):
    from . import wedge, oracle
    rep = Report()
    sol = wedge.WedgeSolution(K, phi, flip_branch=flip_branch)
    T = sol.T
    want = np.array(wedge.POLE_SIGNS) / wedge.TWO_PI_I
    rep.check("pole residues of A dt", float(np.max(np.abs(np.array(T.pole_residues()) - want))), tol)
    rng = np.random.default_rng(0)
    w1, w3 = T.periods
    ts = [a * w1 + b * w3 for a, b in rng.uniform(0, 1, size=(5, 2))]
    rep.check("periodicity of A", T.periodicity_defect(ts), tol)
    t = wedge.wedge_table(K, phi, N, solution=sol)
    rep.check("boundary |u| on both arms", t.meta["max_boundary_residual"], tol)
    rep.check("stencil residual", t.meta["max_stencil_residual"], tol)
    inc = T.incident
    o = oracle.solve_scattering(K, box, inc.x_in, inc.y_in, "wedge", window=N)
    d = max(abs(o[k] - t[k]) for k in t.nodes())
    rep.check("oracle vs elliptic", d, max(1e-6, o.meta["truncation_estimate"]))
    return rep


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        K = _K(args)
        Lattice(K)
        if args.nmax < 1:
            raise UsageError("--nmax must be >= 1")
        if args.command == "validate":
            prob = args.problem
            if prob == "green":
                rep = validate_green(K, args.nmax, args.tol or 1e-8, args.grid, args.box)
            elif prob == "halfline":
                rep = validate_halfline(K, _phi(args, prob), args.nmax, args.tol or 1e-8,
                                        args.grid, args.box, args.flip_branch)
            else:
                rep = validate_wedge(K, _phi(args, prob), args.nmax, args.tol or 1e-7,
                                     args.box, args.flip_branch)
            print(rep.render())
            return 0 if rep.ok else 2
        method = _method(args, args.command)
        if args.command == "green":
            table = green_table(K, args.nmax, method, args.grid, args.box)
        elif args.command == "halfline":
            table = halfline_field_table(K, _phi(args, "halfline"), args.nmax, method,
                                         args.grid, args.box)
        else:
            table = wedge_field_table(K, _phi(args, "wedge"), args.nmax, method, args.box)
        _emit(table, args)
        return 0
    except UsageError as e:
        print(f"helmlattice: error: {e}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError, OverflowError) as e:
        print(f"helmlattice: numerical error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
