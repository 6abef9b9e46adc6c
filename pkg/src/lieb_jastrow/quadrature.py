"""Brute-force integration of the variational Jastrow state.

The wavefunction depends only on relative positions, so the impurity is
pinned at x1 = 0 and every integral runs over (a, b) = (x2 - x1, x3 - x1)
on the unit square. The pair factors have kinks on a = 0, b = 0 and
a = b, which split the square into the two cyclic-order sectors

    upper: 0 < a < b < 1        lower: 0 < b < a < 1.

Each sector is collapsed onto the unit square (a = s t, b = t and its
mirror) and integrated with composite Gauss-Legendre panels that are
geometrically graded toward both ends, where the pair factors are
nearly singular as k -> pi.

Every numerical result carries a relative error estimate obtained by
doubling the resolution, |I(n) - I(2n)| / |I(2n)|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np

from .errors import ConvergenceError
from .model import INFINITE, CouplingSet, JastrowParams, cusp_residual
from .results import CorrelationCurve, DensityGrid, EnergyReport

RULES = ("gauss-legendre-composite", "trapezoid")
MAX_REFINEMENTS = 3
GRADING = 0.3


@dataclass(frozen=True)
class QuadratureConfig:
    points_per_dim: int = 64
    rule: str = "gauss-legendre-composite"
    tol_report: float = 1e-9
    panel_order: int = 8

    def __post_init__(self) -> None:
        if self.points_per_dim < 16:
            raise ValueError(f"points_per_dim must be >= 16, got {self.points_per_dim}")
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}; choose from {RULES}")
        if self.panel_order < 2:
            raise ValueError("panel_order must be >= 2")

    def doubled(self) -> "QuadratureConfig":
        return QuadratureConfig(2 * self.points_per_dim, self.rule, self.tol_report, self.panel_order)


@lru_cache(maxsize=64)
def _unit_nodes(n: int, rule: str, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1] with clustering at both ends."""
    if rule == "trapezoid":
        x = np.linspace(0.0, 1.0, n + 1)
        w = np.full(n + 1, 1.0 / n)
        w[[0, -1]] *= 0.5
        return x, w
    panels = max(4, -(-n // order))
    # A quarter of the panels grade geometrically into each end, the rest
    # split the middle evenly, so doubling n refines both regions.
    levels = panels // 4
    middle = panels - 2 * levels
    c = 1.0 / (middle + 2)
    left = c * GRADING ** np.arange(levels - 1, -1, -1)
    inner = np.linspace(c, 1.0 - c, middle + 1)
    edges = np.concatenate(([0.0], left[:-1], inner, 1.0 - left[::-1][1:], [1.0]))
    gx, gw = np.polynomial.legendre.leggauss(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    x = (0.5 * (hi - lo) * gx + 0.5 * (hi + lo)).ravel()
    w = (0.5 * (hi - lo) * gw).ravel()
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=64)
def _mapped_nodes(n: int, rule: str, order: int, power: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes pushed through x = t^p / (t^p + (1 - t)^p), flattening end singularities."""
    t, w = _unit_nodes(n, rule, order)
    if power == 1:
        return t, w
    tp, sp_ = t**power, (1.0 - t) ** power
    den = tp + sp_
    x = tp / den
    jac = power * (t * (1.0 - t)) ** (power - 1) / den**2
    x, w = x, w * jac
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def unit_nodes(cfg: QuadratureConfig, power: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    return _mapped_nodes(cfg.points_per_dim, cfg.rule, cfg.panel_order, power)


def end_power(params: JastrowParams) -> int:
    """Power of the end map needed for the kinetic integrand.

    With a node at contact (k or k' = pi) and v != 1 the gradient squared
    behaves like d^(2v - 2): singular for v < 1 and non-smooth for v > 1,
    which graded panels alone resolve only slowly. The map turns it into
    a high positive power of t.
    """
    nodal = max(params.k, params.k_prime) >= math.pi * (1.0 - 1e-12)
    if not nodal or params.v == 1.0:
        return 1
    return max(3, math.ceil(2.0 / (2.0 * params.v - 1.0)))


def _frac(x):
    return np.mod(x, 1.0)


def pair_factor(d, k: float, v: float):
    """``cos^v[k (d - 1/2)]`` for separations ``d`` already mapped into [0, 1]."""
    base = np.cos(k * (np.asarray(d) - 0.5))
    # |k (d - 1/2)| <= pi/2 keeps the base non-negative; only rounding can dip below 0.
    if np.any(base < -1e-12):
        raise ValueError("negative pair-function base; k must lie in [0, pi]")
    base = np.maximum(base, 0.0)
    return base if v == 1.0 else base**v


def pair_factor_derivative(d, k: float, v: float):
    theta = k * (np.asarray(d) - 0.5)
    base = np.maximum(np.cos(theta), 0.0)
    if v == 1.0:
        return -k * np.sin(theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -v * k * np.sin(theta) * base ** (v - 1.0)
    return np.where(base > 0.0, out, 0.0)


def wavefunction_value(x1, x2, x3, params: JastrowParams):
    """Unnormalized ``prod_{i<j} cos^v[k_ij (d_ij - 1/2)]`` (atom 1 is the impurity)."""
    x1, x2, x3 = (np.asarray(x, dtype=float) for x in (x1, x2, x3))
    k, kp, v = params.k, params.k_prime, params.v
    return (
        pair_factor(_frac(x2 - x1), k, v)
        * pair_factor(_frac(x3 - x1), k, v)
        * pair_factor(_frac(x3 - x2), kp, v)
    )


def reduced_wavefunction(a, b, params: JastrowParams):
    """Wavefunction with the impurity at the origin, ``x2 = a``, ``x3 = b``."""
    return wavefunction_value(0.0, a, b, params)


def reduced_gradient(a, b, params: JastrowParams):
    """Values and partial derivatives (d/da, d/db) of the reduced wavefunction.

    Valid away from the contact lines a = 0, b = 0, a = b where the
    derivative jumps.
    """
    k, kp, v = params.k, params.k_prime, params.v
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    da, db, dc = _frac(a), _frac(b), _frac(b - a)
    fa, fb, gc = pair_factor(da, k, v), pair_factor(db, k, v), pair_factor(dc, kp, v)
    dfa = pair_factor_derivative(da, k, v)
    dfb = pair_factor_derivative(db, k, v)
    dgc = pair_factor_derivative(dc, kp, v)
    phi = fa * fb * gc
    phi_a = dfa * fb * gc - fa * fb * dgc
    phi_b = fa * dfb * gc + fa * fb * dgc
    return phi, phi_a, phi_b


def _sector_points(cfg: QuadratureConfig, power: int = 1):
    """(a, b, weight) for both cyclic sectors, in a fixed order."""
    x, w = unit_nodes(cfg, power)
    s, t = np.meshgrid(x, x, indexing="ij")
    ws = np.outer(w, w) * t
    upper = (s * t, t, ws)
    lower = (t, s * t, ws)
    return upper, lower


def _sector_sums(params: JastrowParams, cfg: QuadratureConfig) -> dict:
    upper, lower = _sector_points(cfg, end_power(params))
    out = {"norm": 0.0, "kinetic": 0.0, "norm_upper": 0.0, "ordered_cube": 0.0}
    for name, (a, b, w) in (("upper", upper), ("lower", lower)):
        phi, pa, pb = reduced_gradient(a, b, params)
        dens = phi * phi
        norm = float(np.sum(w * dens))
        out["norm"] += norm
        out["kinetic"] += 0.5 * float(np.sum(w * ((pa + pb) ** 2 + pa * pa + pb * pb)))
        if name == "upper":
            out["norm_upper"] = norm
            # x1 < x2 < x3 inside the unit cube: x1 ranges over [0, 1 - b)
            out["ordered_cube"] = float(np.sum(w * (1.0 - b) * dens))
    return out


def _contact_sums(params: JastrowParams, cfg: QuadratureConfig) -> Tuple[float, float]:
    """Contact integrals of |psi|^2 on x1 = x2 (same as x1 = x3) and on x2 = x3."""
    x, w = unit_nodes(cfg)
    k, kp, v = params.k, params.k_prime, params.v
    f0 = pair_factor(0.0, k, v)
    g0 = pair_factor(0.0, kp, v)
    fx, gx = pair_factor(x, k, v), pair_factor(x, kp, v)
    imp = float(np.sum(w * (f0 * fx * gx) ** 2))
    maj = float(np.sum(w * (fx * fx * g0) ** 2))
    return imp, maj


def _rel_err(coarse: float, fine: float) -> float:
    if fine == coarse:
        return 0.0
    return abs(fine - coarse) / max(abs(fine), 1e-300)


def _refine(evaluate: Callable[[QuadratureConfig], float], cfg: QuadratureConfig, what: str):
    """Double the resolution until the estimate meets ``cfg.tol_report``."""
    coarse = evaluate(cfg)
    current = cfg
    for _ in range(MAX_REFINEMENTS):
        current = current.doubled()
        fine = evaluate(current)
        err = _rel_err(coarse, fine)
        if err <= cfg.tol_report:
            return fine, err, current
        coarse = fine
    raise ConvergenceError(
        f"{what}: error estimate {err:.3e} above tol_report={cfg.tol_report:.1e} "
        f"at points_per_dim={current.points_per_dim}"
    )


def norm_quadrature(params: JastrowParams, cfg: QuadratureConfig = QuadratureConfig()):
    """Integral of |Psi|^2 over the unit 3-torus, with its error estimate."""
    value, err, _ = _refine(lambda c: _sector_sums(params, c)["norm"], cfg, "norm")
    return value, err


def sector_integrals(params: JastrowParams, cfg: QuadratureConfig = QuadratureConfig()) -> dict:
    """Per-sector pieces of the norm integral.

    ``ordered_cube`` is the integral over the single ordering sector
    x1 < x2 < x3 of the unit cube; for a fully exchange-symmetric state
    the norm is exactly six times it.
    """
    return _sector_sums(params, cfg.doubled())


def _check_consistent(params: JastrowParams, couplings: CouplingSet) -> None:
    for k, g, label in ((params.k, couplings.g, "k"), (params.k_prime, couplings.g_prime, "k_prime")):
        if abs(cusp_residual(k, g, params.v)) > 1e-9:
            raise ValueError(f"{label}={k!r} does not satisfy the cusp condition for g={g!r}, v={params.v!r}")


def _energy_parts(params: JastrowParams, couplings: CouplingSet, cfg: QuadratureConfig):
    sums = _sector_sums(params, cfg)
    imp, maj = _contact_sums(params, cfg)
    norm = sums["norm"]
    # Infinite coupling pairs with a node at contact: the product is zero.
    contact = 0.0
    if couplings.g != INFINITE:
        contact += 2.0 * couplings.g * imp
    if couplings.g_prime != INFINITE:
        contact += couplings.g_prime * maj
    return sums["kinetic"] / norm, contact / norm


def variational_energy(
    params: JastrowParams,
    couplings: CouplingSet,
    cfg: QuadratureConfig = QuadratureConfig(),
) -> EnergyReport:
    """Energy expectation of the Jastrow state at exponent ``params.v``.

    Uses the quadratic form 1/2 |grad Psi|^2 + sum g_ij |Psi|^2 on
    contact, so the result is a strict variational upper bound.
    """
    _check_consistent(params, couplings)
    total, err, fine_cfg = _refine(lambda c: sum(_energy_parts(params, couplings, c)), cfg, "energy")
    kinetic, interaction = _energy_parts(params, couplings, fine_cfg)
    return EnergyReport(
        total=total,
        kinetic=kinetic,
        interaction=interaction,
        method="jastrow-variational",
        error=err,
    )


def _mm_marginal(r: np.ndarray, params: JastrowParams, cfg: QuadratureConfig) -> np.ndarray:
    x, w = unit_nodes(cfg)
    r = r[:, None]
    # kink where x3 = a + r wraps through 0, i.e. a = 1 - r
    a1, w1 = x * (1.0 - r), w * (1.0 - r)
    a2, w2 = (1.0 - r) + x * r, w * r
    s1 = np.sum(w1 * reduced_wavefunction(a1, a1 + r, params) ** 2, axis=1)
    s2 = np.sum(w2 * reduced_wavefunction(a2, a2 + r, params) ** 2, axis=1)
    return s1 + s2


def _im_marginal(r: np.ndarray, params: JastrowParams, cfg: QuadratureConfig) -> np.ndarray:
    x, w = unit_nodes(cfg)
    r = r[:, None]
    b1, w1 = x * r, w * r
    b2, w2 = r + x * (1.0 - r), w * (1.0 - r)
    s1 = np.sum(w1 * reduced_wavefunction(r, b1, params) ** 2, axis=1)
    s2 = np.sum(w2 * reduced_wavefunction(r, b2, params) ** 2, axis=1)
    return s1 + s2


def pair_marginal(
    params: JastrowParams,
    kind: str,
    cfg: QuadratureConfig = QuadratureConfig(),
    r_grid=None,
) -> CorrelationCurve:
    """Normalized pair-distance density from direct integration of |Psi|^2."""
    if kind == "majority-majority":
        fn = _mm_marginal
    elif kind == "impurity-majority":
        fn = _im_marginal
    else:
        raise ValueError(f"unknown pair kind {kind!r}")
    r = np.linspace(0.0, 1.0, 101) if r_grid is None else np.asarray(r_grid, dtype=float)
    if np.any((r < 0.0) | (r > 1.0)):
        raise ValueError("r_grid must lie in [0, 1]")
    norm, norm_err = norm_quadrature(params, cfg)
    coarse = fn(r, params, cfg)
    fine = fn(r, params, cfg.doubled())
    scale = max(float(np.max(np.abs(fine))), 1e-300)
    err = float(np.max(np.abs(fine - coarse))) / scale + norm_err
    if err > cfg.tol_report:
        raise ConvergenceError(f"pair marginal error estimate {err:.3e} above {cfg.tol_report:.1e}")
    return CorrelationCurve(r, fine / norm, kind, params, err)


def two_body_density(
    params: JastrowParams,
    cfg: QuadratureConfig = QuadratureConfig(),
    n_grid: int = 64,
) -> DensityGrid:
    """Density of the majority pair positions, impurity integrated out."""
    x, w = unit_nodes(cfg)
    grid = np.arange(n_grid) / n_grid
    m1, m2 = np.meshgrid(grid, grid, indexing="ij")
    lo, hi = np.minimum(m1, m2)[..., None], np.maximum(m1, m2)[..., None]
    total = np.zeros_like(m1)
    # kinks of the impurity integrand at x_i = x_m1 and x_i = x_m2
    for start, stop in ((0.0, lo), (lo, hi), (hi, 1.0)):
        width = stop - start
        xi = start + x * width
        psi = wavefunction_value(xi, m1[..., None], m2[..., None], params)
        total += np.sum(w * width * psi * psi, axis=-1)
    norm, err = norm_quadrature(params, cfg)
    return DensityGrid(grid, grid, total / norm, "cartesian-pair", ("x_m1", "x_m2"), params, err)


def jacobi_value(xi, r, params: JastrowParams, norm: float):
    """Density in Jacobi coordinates at given ``(xi, r)``.

    ``xi = 2/3 (x_i - (x_m1 + x_m2)/2)`` with the majority midpoint taken
    along the shorter arc, ``r = x_m1 - x_m2`` wrapped into [-1/2, 1/2).
    The 3/2 Jacobian makes the density integrate to one over
    ``xi in [-1/3, 1/3)``, ``r in [-1/2, 1/2)``.
    """
    s = 1.5 * np.asarray(xi, dtype=float)
    r = np.asarray(r, dtype=float)
    a = -s + 0.5 * r
    b = -s - 0.5 * r
    return 1.5 * reduced_wavefunction(a, b, params) ** 2 / norm


def _jacobi_axes(n_xi: int, n_r: int):
    return np.linspace(-1.0 / 3.0, 1.0 / 3.0, n_xi), np.linspace(-0.5, 0.5, n_r)


def jacobi_density(
    params: JastrowParams,
    cfg: QuadratureConfig = QuadratureConfig(),
    n_xi: int = 81,
    n_r: int = 121,
) -> DensityGrid:
    """Three-body density on a symmetric (xi, r) grid, center of mass removed."""
    xi, r = _jacobi_axes(n_xi, n_r)
    norm, err = norm_quadrature(params, cfg)
    X, R = np.meshgrid(xi, r, indexing="ij")
    vals = jacobi_value(X, R, params, norm)
    return DensityGrid(xi, r, vals, "jacobi", ("xi", "r"), params, err)


def xi_reflection_asymmetry(grid: DensityGrid) -> float:
    """max |rho(xi, r) - rho(-xi, r)| on a grid whose xi axis is symmetric."""
    if not np.allclose(grid.axis1, -grid.axis1[::-1], atol=1e-15):
        raise ValueError("xi axis is not symmetric about zero")
    return float(np.max(np.abs(grid.values - grid.values[::-1, :])))


def exchange_asymmetry(
    params: JastrowParams,
    cfg: QuadratureConfig = QuadratureConfig(),
    n_xi: int = 81,
    n_r: int = 121,
) -> float:
    """Largest Jacobi-density change when the impurity is swapped with a majority atom.

    Zero exactly when all three pairs share one momentum; this is the
    permutation symmetry that unequal couplings break.
    """
    xi, r = _jacobi_axes(n_xi, n_r)
    norm, _ = norm_quadrature(params, cfg)
    X, R = np.meshgrid(xi, r, indexing="ij")
    s = 1.5 * X
    a = -s + 0.5 * R
    b = -s - 0.5 * R
    k, kp, v = params.k, params.k_prime, params.v
    orig = reduced_wavefunction(a, b, params)
    # psi(x2, x1, x3): pair 1-3 now carries k' and pair 2-3 carries k
    swapped = (
        pair_factor(_frac(a), k, v)
        * pair_factor(_frac(b - a), k, v)
        * pair_factor(_frac(b), kp, v)
    )
    return float(np.max(np.abs(orig**2 - swapped**2))) * 1.5 / norm


def three_body_slice(
    params: JastrowParams,
    cfg: QuadratureConfig = QuadratureConfig(),
    n_grid: int = 101,
    extent: float = 1.0,
) -> DensityGrid:
    """|Psi|^2 / norm on the plane through the origin orthogonal to (1, 1, 1).

    In-plane axes: ``u`` along (1, -1, 0)/sqrt 2 and ``w`` along
    (1, 1, -2)/sqrt 6; positions are wrapped onto the ring.
    """
    u = np.linspace(-extent, extent, n_grid)
    U, W = np.meshgrid(u, u, indexing="ij")
    e1 = np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)
    e2 = np.array([1.0, 1.0, -2.0]) / math.sqrt(6.0)
    pos = U[..., None] * e1 + W[..., None] * e2
    norm, err = norm_quadrature(params, cfg)
    psi = wavefunction_value(pos[..., 0], pos[..., 1], pos[..., 2], params)
    return DensityGrid(u, u, psi * psi / norm, "three-body-slice", ("u", "w"), params, err)
