"""Closed forms for the three-body Jastrow state at exponent v = 1.

The state is Psi = C f_k(d_12) f_k(d_13) f_k'(d_23) with the bare pair
function f_k(d) = cos[k (d - 1/2)] and d the separation on the unit
ring mapped into [0, 1]. Everything here is expressed through

    norm_integral(k, k') = integral of |f f f|^2 over the unit 3-torus,

so C^2 = 1 / norm_integral. Each formula is cross-checked against the
brute-force quadrature in :mod:`lieb_jastrow.quadrature`.

Formulas that branch at k = k' lose digits to cancellation in their
(k^2 - k'^2)^-2 terms as k' -> k. For ``|k - k'| < BRANCH_TOL`` they are
replaced by a quadratic in k' through the exact equal-momentum value and
two generic evaluations a safe ``BRIDGE_STEP`` away.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import TransitionDomainError
from .model import JastrowParams, _check_momentum
from .results import CorrelationCurve, EnergyReport

BRANCH_TOL = 5e-4
BRIDGE_STEP = 1e-3
# Below this k the equal-momentum branch is evaluated from its Taylor series.
SERIES_K = 1e-3


def _integrable(k: float, k_prime: float) -> bool:
    return abs(k - k_prime) < BRANCH_TOL


def _norm_equal(k: float) -> float:
    if k < SERIES_K:
        k2 = k * k
        return 1.0 - k2 / 4.0 + k2 * k2 / 30.0 - 13.0 * k2**3 / 4032.0
    c, s = math.cos, math.sin
    num = (
        48.0 + 32.0 * k**2 + 3.0 * c(k) + 8.0 * k**2 * c(k)
        - 48.0 * c(2.0 * k) - 3.0 * c(3.0 * k) + 108.0 * k * s(k)
    )
    return num / (256.0 * k**2)


def _norm_generic_numerator(k: float, kp: float) -> float:
    c, s = math.cos, math.sin
    d2 = (k * k - kp * kp) ** 2
    return (
        4.0 * kp * (d2 + k**4 * c(kp)) * s(k) ** 2
        + 8.0 * k * d2 * s(k) * (kp + s(kp))
        + k * (
            4.0 * k * kp * d2
            + (4.0 * k**5 - 10.0 * k**3 * kp**2 + 6.0 * k * kp**4
               + kp**2 * (kp**2 - 3.0 * k**2) * s(2.0 * k)) * s(kp)
        )
    )


def _sinc(x: float) -> float:
    return 1.0 if x == 0.0 else math.sin(x) / x


def _bridge(unequal, equal, k: float, kp: float):
    """Quadratic in k' through ``equal(k)`` and ``unequal(k, k +- step)``."""
    h = BRIDGE_STEP
    f0 = equal(k)
    if h <= k <= math.pi - h:
        fp, fm = unequal(k, k + h), unequal(k, k - h)
        c1, c2 = (fp - fm) / (2.0 * h), (fp + fm - 2.0 * f0) / h**2
    else:
        # one-sided nodes, pointing away from the nearer end of [0, pi]
        s = h if k < h else -h
        f1, f2 = unequal(k, k + s), unequal(k, k + 2.0 * s)
        c1, c2 = (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * s), (f0 - 2.0 * f1 + f2) / s**2
    d = kp - k
    return f0 + c1 * d + 0.5 * c2 * d * d


def norm_integral(k: float, k_prime: float) -> float:
    """Integral of the bare product |f_k f_k f_k'|^2 over the unit 3-torus."""
    k = _check_momentum("k", k)
    kp = _check_momentum("k_prime", k_prime)
    if k == kp:
        return _norm_equal(k)
    if _integrable(k, kp):
        return _bridge(_norm_unequal, _norm_equal, k, kp)
    return _norm_unequal(k, kp)


def _norm_unequal(k: float, kp: float) -> float:
    if kp == 0.0:
        return (0.5 * (1.0 + _sinc(k))) ** 2
    if k == 0.0:
        return 0.5 * (1.0 + _sinc(kp))
    return _norm_generic_numerator(k, kp) / (32.0 * kp * (k**3 - k * kp**2) ** 2)


def norm_c2(k: float, k_prime: float) -> float:
    """Squared normalization constant, ``C^2 = 1 / norm_integral``."""
    return 1.0 / norm_integral(k, k_prime)


def _energy_equal(k: float) -> float:
    if k < SERIES_K:
        return 3.0 * k * k + k**6 / 120.0 + k**8 / 3360.0
    c, s = math.cos, math.sin
    x = 3.0 + 2.0 * k**2 + 2.0 * k**2 * c(k) - 3.0 * c(2.0 * k) + 6.0 * k * s(k)
    y = (8.0 * k**2 - 1.0) * c(k) + c(3.0 * k) - 4.0 * k * s(k)
    # 3k^2 (3 - 16 x/y)^-1 rewritten to stay finite where y -> 0
    return 3.0 * k * k + 3.0 * k * k * y / (3.0 * y - 16.0 * x)


def _energy_generic(k: float, kp: float) -> float:
    c, s = math.cos, math.sin
    num = (
        -2.0 * k * kp * c(kp) * s(k) ** 2
        + (k**3 - k * kp**2 + (k**2 + kp**2) * c(k) * s(k)) * s(kp)
    )
    corr = 3.0 * k * kp * num / (16.0 * (k * k - kp * kp) ** 2 * _norm_unequal(k, kp))
    return 2.0 * k * k + kp * kp + corr


def jastrow_energy(k: float, k_prime: float) -> EnergyReport:
    """Energy of the v = 1 Jastrow state with pair momenta ``(k, k_prime)``.

    The interaction energy is folded into the cusp conditions, so only
    the total is available.
    """
    k = _check_momentum("k", k)
    kp = _check_momentum("k_prime", k_prime)
    if k == kp:
        total = _energy_equal(k)
    elif _integrable(k, kp):
        total = _bridge(_energy_generic, _energy_equal, k, kp)
    else:
        total = _energy_generic(k, kp)
    return EnergyReport(total=total, method="jastrow-analytic")


def _impurity_bracket(r: np.ndarray, k: float) -> np.ndarray:
    """Integral over the impurity position of f_k(.)^2 f_k(.)^2 at majority distance r.

    Equals [4k + 2kr cos 2k(1-r) + sin 2k(1-r) + 2k(1-r) cos 2kr + sin 2kr + 8 sin k] / (16 k).
    """
    if k == 0.0:
        return np.ones_like(r)
    q = 1.0 - r
    br = (
        4.0 * k + 2.0 * k * r * np.cos(2.0 * k * q) + np.sin(2.0 * k * q)
        + 2.0 * k * q * np.cos(2.0 * k * r) + np.sin(2.0 * k * r) + 8.0 * math.sin(k)
    )
    return br / (16.0 * k)


def _as_grid(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if np.any((r < 0.0) | (r > 1.0)):
        raise ValueError("pair distance r must lie in [0, 1]")
    return r


def pair_corr_mm(r, k: float, k_prime: float):
    """Majority-majority pair-distance density on ``r`` in [0, 1]."""
    scalar = np.ndim(r) == 0
    r = _as_grid(r)
    k = _check_momentum("k", k)
    kp = _check_momentum("k_prime", k_prime)
    out = np.cos(kp * (r - 0.5)) ** 2 * _impurity_bracket(r, k) / norm_integral(k, kp)
    return float(out) if scalar else out


def pair_corr_im(r, k: float, k_prime: float):
    """Impurity-majority pair-distance density on ``r`` in [0, 1]."""
    scalar = np.ndim(r) == 0
    r = _as_grid(r)
    k = _check_momentum("k", k)
    kp = _check_momentum("k_prime", k_prime)
    if k == kp:
        out = pair_corr_mm(r, k, k)
    elif _integrable(k, kp):
        out = _bridge(lambda a, b: _im_unequal(r, a, b), lambda a: pair_corr_mm(r, a, a), k, kp)
    else:
        out = _im_unequal(r, k, kp)
    return float(out) if scalar else out


def _im_unequal(r: np.ndarray, k: float, kp: float) -> np.ndarray:
    if k == 0.0 or kp == 0.0:
        # One factor is flat: the other majority atom integrates out trivially.
        inner = 0.5 * (1.0 + _sinc(k if kp == 0.0 else kp)) * np.ones_like(r)
    else:
        u = 1.0 - 2.0 * r
        dk2 = k * k - kp * kp
        inner = (
            (dk2 + k * k * np.cos(kp * u)) * kp * math.sin(k)
            + k * dk2 * (kp + math.sin(kp))
            - k * kp * kp * np.cos(k * u) * math.sin(kp)
        ) / (4.0 * k * kp * dk2)
    return np.cos(k * (r - 0.5)) ** 2 * inner / _norm_unequal(k, kp)


def correlation_curve(r_grid, params: JastrowParams, kind: str) -> CorrelationCurve:
    if params.v != 1.0:
        raise ValueError("closed-form correlations exist only for v = 1")
    r_grid = np.asarray(r_grid, dtype=float)
    fn = pair_corr_mm if kind == "majority-majority" else pair_corr_im
    return CorrelationCurve(r_grid, fn(r_grid, params.k, params.k_prime), kind, params)


def _transition_ratio(k: float) -> float:
    c, s = math.cos, math.sin
    num = 6.0 * (2.0 * k + k * c(k) + 5.0 * s(k))
    den = (
        12.0 * k + 4.0 * k * c(2.0 * k / 3.0) + 2.0 * k * c(4.0 * k / 3.0)
        + 3.0 * s(2.0 * k / 3.0) + 24.0 * s(k) + 3.0 * s(4.0 * k / 3.0)
    )
    return math.sqrt(num) / math.sqrt(den)


def transition_kprime_star(k: float) -> float:
    """Majority momentum ``k'*`` at which rho_mm(1/2) = rho_mm(1/3).

    For ``k' > k'*`` the majority pair prefers r = 1/2; below it a
    correlation hole opens at r = 1/2.

    Raises
    ------
    TransitionDomainError
        If the arccos argument leaves [-1, 1] or ``k'*`` falls outside
        [0, pi].
    """
    k = _check_momentum("k", k)
    if k == 0.0:
        raise TransitionDomainError("no transition without impurity coupling (k = 0)")
    ratio = _transition_ratio(k)
    if not (-1.0 <= ratio <= 1.0):
        raise TransitionDomainError(f"arccos argument {ratio!r} outside [-1, 1] at k={k!r}")
    kps = 6.0 * math.acos(ratio)
    if kps > math.pi:
        raise TransitionDomainError(f"k'*={kps!r} exceeds pi at k={k!r}")
    return kps


# Reference expressions exactly as originally printed, kept for the verification report.

def printed_c2(k: float, k_prime: float) -> float:
    """Printed normalization expression read literally as C^2 (it is the norm integral)."""
    return norm_integral(k, k_prime)


def printed_energy(k: float, k_prime: float) -> float:
    """Printed energy; the generic denominator lacks the 1/(4k') on its later terms."""
    if _integrable(k, k_prime):
        return _energy_equal(k)
    c, s = math.cos, math.sin
    kp = k_prime
    num = (
        -2.0 * k * kp * c(kp) * s(k) ** 2
        + (k**3 - k * kp**2 + (k**2 + kp**2) * c(k) * s(k)) * s(kp)
    )
    d2 = (k * k - kp * kp) ** 2
    den = (
        (d2 + k**4 * c(kp)) * s(k) ** 2
        + 8.0 * k * d2 * s(k) * (kp + s(kp))
        + k * (4.0 * k * kp * d2
               + (4.0 * k**5 - 10.0 * k**3 * kp**2 + 6.0 * k * kp**4
                  + kp**2 * (kp**2 - 3.0 * k**2) * s(2.0 * k)) * s(kp))
    )
    return 2.0 * k * k + kp * kp + 1.5 * k**3 * kp * num / den


def printed_pair_corr_mm(r, k: float, k_prime: float):
    """Printed majority-majority form; missing the overall 1/k."""
    return pair_corr_mm(r, k, k_prime) * k if k > 0.0 else pair_corr_mm(r, k, k_prime)


def printed_pair_corr_im(r, k: float, k_prime: float):
    """Printed impurity-majority form with its (k' - sin k') term."""
    if _integrable(k, k_prime) or k == 0.0 or k_prime == 0.0:
        return pair_corr_im(r, k, k_prime)
    kp = k_prime
    r = np.asarray(r, dtype=float)
    u = 1.0 - 2.0 * r
    dk2 = k * k - kp * kp
    inner = (
        (dk2 + k * k * np.cos(kp * u)) * kp * math.sin(k)
        + k * dk2 * (kp - math.sin(kp))
        - k * kp * kp * np.cos(k * u) * math.sin(kp)
    ) / (4.0 * k * kp * dk2)
    return np.cos(k * (r - 0.5)) ** 2 * inner / norm_integral(k, kp)
