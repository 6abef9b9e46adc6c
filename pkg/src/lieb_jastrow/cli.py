"""Command-line entry point: scans, correlation data and the verification suite.

Exit codes: 0 success, 1 usage error, 2 computation failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import ast
import math
import operator
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import List, Optional, Sequence

import numpy as np

from . import jastrow
from .bethe import bethe_three_body, two_body_energy
from .ed import EDConfig, ed_energy, ed_pair_correlation
from .errors import BasisOverflowError, ConvergenceError, ResonanceError, TransitionDomainError
from .io import emit, render
from .model import CouplingSet, JastrowParams, g_from_k, k_from_g
from .quadrature import (
    QuadratureConfig,
    jacobi_density,
    pair_marginal,
    three_body_slice,
    two_body_density,
)
from .variational import error_point, optimize_v, stability_scan
from .verify import FAULTS, formula_report, run_suite, suite_passed

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_VERIFY = 0, 1, 2, 3
E_TG = 4.0 * math.pi**2
FRAMES = ("pair-mm", "pair-im", "jacobi", "two-body", "three-body-contour", "transition-curve")
# iso-level used for the three-body contour figure; emitted as metadata only
CONTOUR_LEVEL = 0.007

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.USub: operator.neg, ast.UAdd: operator.pos}


class UsageError(Exception):
    pass


def parse_number(text: str) -> float:
    """Float literal or simple arithmetic with ``pi``/``inf``, e.g. ``5*pi/6``."""
    text = text.strip().replace("π", "pi")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in ("pi", "inf"):
            return math.pi if node.id == "pi" else math.inf
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError
    try:
        return float(ev(ast.parse(text, mode="eval")))
    except (ValueError, SyntaxError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:count`` (inclusive ends) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"grid must be start:stop:count, got {text!r}")
        start, stop = parse_number(parts[0]), parse_number(parts[1])
        try:
            count = int(parts[2])
        except ValueError:
            raise argparse.ArgumentTypeError(f"grid count must be an integer, got {parts[2]!r}") from None
        if count < 1 or not (math.isfinite(start) and math.isfinite(stop)):
            raise argparse.ArgumentTypeError(f"invalid grid {text!r}")
        return np.linspace(start, stop, count)
    return np.array([parse_number(t) for t in text.split(",") if t.strip()])


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser, grid_default: Optional[str] = None, grid_help: str = "k grid") -> None:
    pair = p.add_mutually_exclusive_group()
    pair.add_argument("--k", type=parse_number, help="impurity-majority pair momentum in [0, pi]")
    pair.add_argument("--g", type=parse_number, help="impurity-majority coupling (>= 0, 'inf' allowed)")
    maj = p.add_mutually_exclusive_group()
    maj.add_argument("--k-prime", type=parse_number, action="append",
                     help="majority pair momentum; repeat for several curves")
    maj.add_argument("--g-prime", type=parse_number, action="append", help="majority coupling; repeatable")
    p.add_argument("--v", type=parse_number, default=1.0, help="Jastrow exponent used for k <-> g conversion")
    p.add_argument("--grid", type=parse_grid, default=parse_grid(grid_default) if grid_default else None,
                   help=f"{grid_help} as start:stop:count or a list (default {grid_default})")
    p.add_argument("--resolution", type=int, default=64, help="quadrature points per dimension")
    p.add_argument("--normalize-tg", action="store_true", help="divide energies by 4 pi^2")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--workers", type=int, default=1, help="worker processes for grid scans")
    p.add_argument("--quick", action="store_true", help="reduced grids")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lieb-jastrow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("energy-scan", help="E(k) for fixed k' values (integrable if none given)")
    _common(p, "0.05:pi:32")
    p.add_argument("--with-ed", action="store_true", help="also fill the E_ed column (slow)")

    p = sub.add_parser("error-scan", help="relative deviations between energy routes")
    _common(p, "0.05:pi:32")

    p = sub.add_parser("optimal-v", help="optimal Jastrow exponent along a k grid")
    _common(p, "0.05:pi:32")

    p = sub.add_parser("stability", help="slope of 1 - E/E_int at the integrable point")
    _common(p, "0.3:3.0:28")
    p.add_argument("--vary", choices=("k_prime", "k"), default="k_prime",
                   help="momentum moved away from the integrable point")

    p = sub.add_parser("correlations", help="pair, Jacobi, two-body, three-body and transition data")
    _common(p, None, "r grid (pair frames) or k grid (transition-curve)")
    p.add_argument("--frame", choices=FRAMES, required=True)
    p.add_argument("--source", choices=("jastrow", "ed"), default="jastrow",
                   help="pair frames only: closed form / quadrature, or the ED ground state")
    p.add_argument("--n-grid", type=int, default=81, help="points per axis for 2D frames")

    p = sub.add_parser("oracle", help="exact diagonalization energy with cutoff extrapolation")
    _common(p)
    p.add_argument("--particles", type=int, choices=(2, 3), default=3)
    p.add_argument("--n-max", type=parse_grid, default=None, help="cutoff sequence, e.g. 12,16,24,32,48")

    p = sub.add_parser("verify", help="run the invariant and formula-verification suite")
    _common(p)
    p.add_argument("--inject-fault", choices=FAULTS, default=None, help="mutation test of the suite")
    p.add_argument("--strict", action="store_true", help="known deviations also fail the run")
    p.add_argument("--formula-report", action="store_true",
                   help="emit the printed-vs-implemented closed-form report instead of the suite")
    return parser


def _impurity_k(args, default: Optional[float] = None) -> Optional[float]:
    if args.g is not None:
        return k_from_g(args.g, args.v)
    return args.k if args.k is not None else default


def _majority_ks(args) -> List[float]:
    if args.g_prime:
        return [k_from_g(g, args.v) for g in args.g_prime]
    return list(args.k_prime or [])


def _require_grid(args, lo: float, hi: float, open_lo=True, open_hi=False) -> np.ndarray:
    grid = args.grid
    if grid is None or len(grid) == 0:
        raise UsageError("a non-empty --grid is required")
    if args.quick:
        grid = grid[:: max(1, len(grid) // 8)]
    bad = (grid <= lo if open_lo else grid < lo) | (grid >= hi if open_hi else grid > hi)
    if np.any(bad) or not np.all(np.isfinite(grid)):
        raise UsageError(f"grid values must lie in {'(' if open_lo else '['}{lo:g}, {hi:g}{')' if open_hi else ']'}")
    return grid


def _pmap(fn, items: Sequence, workers: int) -> list:
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _quad_cfg(args) -> QuadratureConfig:
    return QuadratureConfig(points_per_dim=args.resolution)


def _energy_row(k, kp, cfg, with_ed):
    row = error_point(k, kp, cfg, EDConfig() if with_ed else None)
    return [row.k, row.k_prime, row.e_jastrow, row.e_variational, row.v_opt, row.e_bethe, row.e_ed]


def cmd_energy_scan(args) -> str:
    grid = _require_grid(args, 0.0, math.pi)
    kps = _majority_ks(args) or [None]
    cfg = _quad_cfg(args)
    tasks = [(k, kp) for kp in kps for k in grid]
    rows = _pmap(partial(_star, _energy_row, cfg=cfg, with_ed=args.with_ed), tasks, args.workers)
    if args.normalize_tg:
        rows = [r[:2] + [x / E_TG for x in r[2:4]] + [r[4]] + [x / E_TG for x in r[5:]] for r in rows]
    cols = ["k", "k_prime", "E_jastrow", "E_variational", "v_opt", "E_bethe", "E_ed"]
    meta = {"couplings": "g = 2 k tan(k/2) (v = 1 cusp condition)", "resolution": args.resolution,
            "E_bethe": "only where k = k'", "E_ed": "extrapolated ED" if args.with_ed else "not computed (nan)"}
    return render(cols, rows, args.format, meta, normalized=args.normalize_tg)


def _star(fn, task, **kw):
    return fn(*task, **kw)


def _error_row(k, kp, cfg):
    r = error_point(k, kp, cfg)
    return [r.k, r.k_prime, r.dev_v1_vs_bethe, r.dev_var_vs_bethe, r.dev_v1_vs_var]


def cmd_error_scan(args) -> str:
    grid = _require_grid(args, 0.0, math.pi)
    kps = _majority_ks(args) or [None]
    tasks = [(k, kp) for kp in kps for k in grid]
    rows = _pmap(partial(_star, _error_row, cfg=_quad_cfg(args)), tasks, args.workers)
    cols = ["k", "k_prime", "dev_v1_vs_bethe", "dev_var_vs_bethe", "dev_v1_vs_var"]
    meta = {"deviations": "relative, E_a/E_b - 1; Bethe columns nan where k != k'"}
    return render(cols, rows, args.format, meta)


def _optimal_row(k, kp, cfg):
    couplings = CouplingSet(g_from_k(k), g_from_k(k if kp is None else kp))
    res = optimize_v(couplings, cfg)
    return [k, k if kp is None else kp, res.v_opt, res.flat_flag]


def cmd_optimal_v(args) -> str:
    grid = _require_grid(args, 0.0, math.pi)
    kps = _majority_ks(args) or [None]
    tasks = [(k, kp) for kp in kps for k in grid]
    rows = _pmap(partial(_star, _optimal_row, cfg=_quad_cfg(args)), tasks, args.workers)
    meta = {"couplings": "g = 2 k tan(k/2) at v = 1, then E(v) minimized over v in [0.2, 5]"}
    return render(["k", "k_prime", "v_opt", "flat_flag"], rows, args.format, meta)


def cmd_stability(args) -> str:
    grid = _require_grid(args, 0.0, math.pi, open_hi=True)
    scan = stability_scan(grid)
    slope = scan.slope if args.vary == "k_prime" else scan.slope_vary_k
    rows = [[k, s, scan.h] for k, s in zip(scan.k_grid, slope)]
    gap = np.abs(scan.slope - scan.slope_vary_k) / np.abs(scan.slope)
    meta = {
        "slope": f"d/d{args.vary} [1 - E(k, k')/E(k, k)] at k' = k, central differences",
        "richardson_max_rel_gap": float(np.nanmax(scan.richardson_gap)),
        "max_rel_gap_vary_k_vs_vary_k_prime": float(np.nanmax(gap)),
        "overflow_points": int(np.sum(scan.overflow)),
    }
    return render(["k", "slope", "h_used"], rows, args.format, meta)


def _pair_rows(args, kind: str):
    r = args.grid if args.grid is not None else np.linspace(0.0, 1.0, 101)
    if np.any((r < 0) | (r > 1)):
        raise UsageError("r grid must lie in [0, 1]")
    k = _impurity_k(args, 0.0)
    rows = []
    for kp in _majority_ks(args) or [0.0]:
        if args.source == "ed":
            curve = ed_pair_correlation(CouplingSet(g_from_k(k, args.v), g_from_k(kp, args.v)), kind,
                                        EDConfig(n_max=24 if args.quick else 40, extrapolate=False), r)
            vals = curve.values
        elif args.v == 1.0:
            fn = jastrow.pair_corr_mm if kind == "majority-majority" else jastrow.pair_corr_im
            vals = fn(r, k, kp)
        else:
            vals = pair_marginal(JastrowParams(k, kp, args.v), kind, _quad_cfg(args), r).values
        rows += [[x, k, kp, y] for x, y in zip(r, vals)]
    return ["r", "k", "k_prime", "rho"], rows


def cmd_correlations(args) -> str:
    frame = args.frame
    meta = {"frame": frame, "source": args.source, "v": args.v}
    if frame in ("pair-mm", "pair-im"):
        cols, rows = _pair_rows(args, "majority-majority" if frame == "pair-mm" else "impurity-majority")
        return render(cols, rows, args.format, meta)
    if frame == "transition-curve":
        grid = args.grid if args.grid is not None else np.linspace(0.05, 2.9, 58)
        rows = []
        for k in grid:
            try:
                ks = jastrow.transition_kprime_star(k)
            except TransitionDomainError:
                continue
            rows.append([k, ks, k - ks])
        meta["note"] = "k values outside the transition domain are omitted"
        return render(["k", "k_prime_star", "k_minus_k_prime_star"], rows, args.format, meta)

    kps = _majority_ks(args)
    if args.source != "jastrow":
        raise UsageError("2D frames are only available from the Jastrow state")
    params = JastrowParams(_impurity_k(args, 0.0), kps[0] if kps else 0.0, args.v)
    n = 41 if args.quick else args.n_grid
    cfg = _quad_cfg(args)
    if frame == "jacobi":
        grid = jacobi_density(params, cfg, n_xi=n, n_r=n)
    elif frame == "two-body":
        grid = two_body_density(params, cfg, n_grid=n)
    else:
        grid = three_body_slice(params, cfg, n_grid=n)
        meta["axes"] = "u along (1,-1,0)/sqrt2, w along (1,1,-2)/sqrt6, plane through the origin"
        meta["iso_level"] = CONTOUR_LEVEL
    meta.update({"k": params.k, "k_prime": params.k_prime})
    a, b = grid.axis_names
    rows = [[x, y, grid.values[i, j]] for i, x in enumerate(grid.axis1) for j, y in enumerate(grid.axis2)]
    return render([a, b, "density"], rows, args.format, meta)


def cmd_oracle(args) -> str:
    k = _impurity_k(args)
    if k is None and args.g is None:
        raise UsageError("oracle needs --k or --g")
    g = args.g if args.g is not None else g_from_k(k, args.v)
    kps = _majority_ks(args)
    if args.g_prime:
        gp = args.g_prime[0]
    elif kps:
        gp = g_from_k(kps[0], args.v)
    else:
        gp = g
    seq = tuple(int(n) for n in args.n_max) if args.n_max is not None else EDConfig().n_max_sequence
    if args.quick:
        seq = seq[:4]
    couplings = CouplingSet(g, gp)
    spectrum = ed_energy(couplings, args.particles, EDConfig(n_max_sequence=seq))
    rows = [[n, e] for n, e in spectrum.energies_by_cutoff]
    rows.append(["inf", spectrum.extrapolated_energy])
    meta = {"g": g, "g_prime": gp, "particles": args.particles,
            "extrapolation": "polynomial in 1/n_max, cubic through the last four cutoffs",
            "uncertainty": spectrum.extrapolation_uncertainty, "basis_size": spectrum.basis_size,
            "residual": spectrum.residual, "gap": spectrum.gap}
    if g == gp:
        meta["E_bethe"] = (bethe_three_body(g).energy if args.particles == 3 else two_body_energy(g).total)
    return render(["n_max", "E_ed"], rows, args.format, meta)


def cmd_verify(args) -> tuple:
    if args.formula_report:
        rows = formula_report(cfg=_quad_cfg(args))
        ok = all(r[-1] < 1e-7 for r in rows)
        cols = ["formula", "k", "k_prime", "printed", "implemented", "quadrature", "dev_printed", "dev_implemented"]
        meta = {"deviations": "relative to brute-force quadrature of |Psi|^2", "result": "pass" if ok else "fail"}
        return render(cols, rows, args.format, meta), ok
    t0 = time.perf_counter()
    log = (lambda s: print(s, file=sys.stderr))
    checks = run_suite(quick=args.quick, fault=args.inject_fault, cfg=_quad_cfg(args), log=log)
    ok = suite_passed(checks, strict=args.strict)
    rows = [[c.name, c.tolerance, c.measured, c.status] for c in checks]
    meta = {"mode": "quick" if args.quick else "full", "fault": args.inject_fault or "none",
            "result": "pass" if ok else "fail"}
    failed = [c.name for c in checks if c.status == "FAIL" or (args.strict and not c.passed)]
    for name in failed:
        print(f"FAILED: {name}", file=sys.stderr)
    print(f"verify: {sum(c.passed for c in checks)}/{len(checks)} checks pass, "
          f"{sum(c.status == 'known-deviation' for c in checks)} known deviations, "
          f"{time.perf_counter() - t0:.1f} s", file=sys.stderr)
    return render(["check", "tolerance", "measured", "status"], rows, args.format, meta), ok


COMMANDS = {
    "energy-scan": cmd_energy_scan,
    "error-scan": cmd_error_scan,
    "optimal-v": cmd_optimal_v,
    "stability": cmd_stability,
    "correlations": cmd_correlations,
    "oracle": cmd_oracle,
    "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.workers < 1 or args.resolution < 16:
            parser.error("--workers must be >= 1 and --resolution >= 16")
    except SystemExit as exc:
        # argparse exits on --help (0) and on usage errors (EXIT_USAGE)
        return int(exc.code or 0)
    try:
        result = COMMANDS[args.command](args)
    except (UsageError, ValueError, ResonanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, BasisOverflowError, TransitionDomainError, OverflowError, ArithmeticError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    if args.command == "verify":
        text, ok = result
        emit(text, args.out)
        return EXIT_OK if ok else EXIT_VERIFY
    try:
        emit(result, args.out)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
