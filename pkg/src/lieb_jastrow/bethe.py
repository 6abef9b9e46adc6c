"""Exact Bethe-ansatz ground states of the equal-coupling ring.

With H = -1/2 sum d^2/dx^2 + g sum delta(x_i - x_j) on a unit ring the
ground-state quasi-momenta solve

    k_m + sum_n 2 atan((k_m - k_n) / g) = 2 pi (m - (N + 1) / 2)

and the energy is E = 1/2 sum_m k_m^2. The 1/2 is what makes the
Tonks-Girardeau roots {-2 pi, 0, 2 pi} give 4 pi^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._roots import bracketed_newton
from .errors import ConvergenceError
from .model import INFINITE, k_from_g, _check_coupling
from .results import EnergyReport

MAX_PARTICLES = 12


@dataclass(frozen=True)
class BetheSolution:
    roots: np.ndarray
    energy: float
    n_particles: int
    coupling: float
    residual: float = 0.0


def _energy(roots: np.ndarray) -> float:
    return 0.5 * float(np.sum(roots * roots))


def free_fermion_roots(n: int) -> np.ndarray:
    """Quasi-momenta at g = infinity: ``2 pi (m - (n + 1)/2)``."""
    return 2.0 * math.pi * (np.arange(1, n + 1) - 0.5 * (n + 1))


def tonks_energy(n: int) -> float:
    return _energy(free_fermion_roots(n))


def three_body_residual(kappa: float, g: float) -> float:
    """``kappa - 2 [pi - atan(kappa/g) - atan(2 kappa/g)]``."""
    if g == INFINITE:
        return kappa - 2.0 * math.pi
    return kappa - 2.0 * (math.pi - math.atan(kappa / g) - math.atan(2.0 * kappa / g))


def bethe_three_body(g: float) -> BetheSolution:
    """Ground state of three bosons, roots ``{-kappa, 0, kappa}``.

    ``kappa`` is the unique root of the three-body condition in
    ``(0, 2 pi]``; at ``g = 0`` all roots vanish.
    """
    g = _check_coupling("g", g)
    if g == 0.0:
        return BetheSolution(np.zeros(3), 0.0, 3, g)
    if g == INFINITE:
        kappa = 2.0 * math.pi
    else:
        # pi - atan(x) = pi/2 + atan(1/x) keeps small-kappa roots accurate.
        def f(x: float) -> float:
            if x == 0.0:
                return -2.0 * math.pi
            return x - 2.0 * (math.atan(g / x) + math.atan(g / (2.0 * x)))

        def df(x: float) -> float:
            return 1.0 + 2.0 * g / (g * g + x * x) + 4.0 * g / (g * g + 4.0 * x * x)

        kappa = bracketed_newton(f, df, 0.0, 2.0 * math.pi)
    residual = abs(three_body_residual(kappa, g))
    if residual > 1e-12:
        raise ConvergenceError(f"three-body Bethe root residual {residual:.3e} at g={g!r}")
    roots = np.array([-kappa, 0.0, kappa])
    return BetheSolution(roots, kappa * kappa, 3, g, residual)


def bethe_residual(roots: np.ndarray, g: float) -> np.ndarray:
    n = len(roots)
    quantum = 2.0 * math.pi * (np.arange(1, n + 1) - 0.5 * (n + 1))
    diff = roots[:, None] - roots[None, :]
    return roots + 2.0 * np.arctan(diff / g).sum(axis=1) - quantum


def _jacobian(roots: np.ndarray, g: float) -> np.ndarray:
    diff = roots[:, None] - roots[None, :]
    kern = 2.0 * g / (g * g + diff * diff)
    np.fill_diagonal(kern, 0.0)
    jac = -kern
    jac[np.diag_indices_from(jac)] = 1.0 + kern.sum(axis=1)
    return jac


def _newton(roots: np.ndarray, g: float, tol: float, max_iter: int = 100) -> np.ndarray:
    res = bethe_residual(roots, g)
    norm = np.max(np.abs(res))
    for _ in range(max_iter):
        if norm < tol:
            return roots
        step = np.linalg.solve(_jacobian(roots, g), res)
        lam = 1.0
        # The Jacobian is the Hessian of the convex Yang-Yang action, so
        # backtracking on the residual always finds a descent step.
        while lam > 1e-8:
            trial = roots - lam * step
            trial_res = bethe_residual(trial, g)
            trial_norm = np.max(np.abs(trial_res))
            if trial_norm < norm or trial_norm < tol:
                break
            lam *= 0.5
        roots, res, norm = trial, trial_res, trial_norm
    if norm < tol:
        return roots
    raise ConvergenceError(f"Bethe Newton iteration stalled at g={g!r}, residual {norm:.3e}")


def bethe_general(g: float, n: int, tol: float = 1e-12) -> BetheSolution:
    """Solve the N coupled Bethe equations by continuation in ``g``.

    The solve starts from free-fermion roots at large coupling and walks
    ``g`` down geometrically, seeding each Newton solve with the
    previous roots.
    """
    g = _check_coupling("g", g)
    if not (2 <= n <= MAX_PARTICLES):
        raise ValueError(f"n must be in [2, {MAX_PARTICLES}], got {n}")
    if not (0.0 < g < INFINITE):
        raise ValueError(f"bethe_general needs a finite g > 0, got {g!r}")

    roots = free_fermion_roots(n)
    g_start = max(g, 1e3 * n)
    schedule = [g_start]
    while schedule[-1] > g:
        schedule.append(max(schedule[-1] / 4.0, g))
    for g_step in schedule:
        # Strong-coupling expansion k_m ~ I_m g/(g + N) is a better seed than the raw roots.
        if g_step == g_start:
            roots = free_fermion_roots(n) * g_step / (g_step + n)
        roots = _newton(roots, g_step, tol)

    roots = np.sort(roots)
    residual = float(np.max(np.abs(bethe_residual(roots, g))))
    if residual > 1e-10:
        raise ConvergenceError(f"Bethe residual {residual:.3e} above 1e-10 at g={g!r}")
    return BetheSolution(roots, _energy(roots), n, g, residual)


def two_body_energy(g: float) -> EnergyReport:
    """Two-body ground state energy ``k^2`` with ``k = k_from_g(g, 1)``."""
    k = k_from_g(g, 1.0)
    return EnergyReport(total=k * k, method="bethe")
