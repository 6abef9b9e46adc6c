"""Units, couplings and the coupling <-> pair-momentum map.

Conventions: lengths in units of the ring size L, energies in
hbar^2/(M L^2), couplings in hbar^2/(M L). The three atoms are labelled
1 (impurity), 2 and 3 (majority); g_12 = g_13 = g and g_23 = g_prime.

The Tonks-Girardeau point is represented exactly by ``math.inf``
(:data:`INFINITE`), which maps to k = pi without any tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._roots import bracketed_newton
from .errors import ResonanceError

INFINITE = math.inf

#: Riemann zeta(1/2); cross-checked against scipy.special.zeta and mpmath in the tests.
ZETA_HALF = -1.4603545088095868

K_MAX = math.pi


def _check_coupling(name: str, g: float) -> float:
    g = float(g)
    if math.isnan(g) or g == -math.inf:
        raise ValueError(f"{name} must be a non-negative number or INFINITE, got {g!r}")
    if g < 0.0:
        raise ValueError(f"{name} must be >= 0 (repulsive regime only), got {g!r}")
    return g


def _check_exponent(v: float) -> float:
    v = float(v)
    if not (v > 0.0 and math.isfinite(v)):
        raise ValueError(f"variational exponent must be finite and > 0, got {v!r}")
    return v


def _check_momentum(name: str, k: float) -> float:
    k = float(k)
    if not (0.0 <= k <= K_MAX):
        raise ValueError(f"{name} must lie in [0, pi], got {k!r}")
    return k


@dataclass(frozen=True)
class CouplingSet:
    """Impurity-majority coupling ``g`` and majority-majority coupling ``g_prime``."""

    g: float
    g_prime: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "g", _check_coupling("g", self.g))
        object.__setattr__(self, "g_prime", _check_coupling("g_prime", self.g_prime))

    @property
    def integrable(self) -> bool:
        return self.g == self.g_prime

    @classmethod
    def from_momenta(cls, k: float, k_prime: float, v: float = 1.0) -> "CouplingSet":
        return cls(g_from_k(k, v), g_from_k(k_prime, v))


@dataclass(frozen=True)
class JastrowParams:
    """Pair momenta of the Jastrow state and its common exponent ``v``."""

    k: float
    k_prime: float
    v: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "k", _check_momentum("k", self.k))
        object.__setattr__(self, "k_prime", _check_momentum("k_prime", self.k_prime))
        object.__setattr__(self, "v", _check_exponent(self.v))

    @classmethod
    def from_couplings(cls, couplings: CouplingSet, v: float = 1.0) -> "JastrowParams":
        """Solve the cusp condition of each pair at exponent ``v``."""
        return cls(k_from_g(couplings.g, v), k_from_g(couplings.g_prime, v), v)

    def couplings(self) -> CouplingSet:
        return CouplingSet(g_from_k(self.k, self.v), g_from_k(self.k_prime, self.v))

    @property
    def integrable(self) -> bool:
        return self.k == self.k_prime


@dataclass(frozen=True)
class TrapGeometry:
    """Transverse confinement of a quasi-1D tube.

    ``a3d`` and ``a_perp`` are measured in the same length unit as
    ``ring_length``.
    """

    a3d: float
    a_perp: float
    ring_length: float = 1.0

    def __post_init__(self) -> None:
        if not self.a_perp > 0.0:
            raise ValueError(f"a_perp must be > 0, got {self.a_perp!r}")
        if not self.ring_length > 0.0:
            raise ValueError(f"ring_length must be > 0, got {self.ring_length!r}")
        if self.a3d < 0.0:
            raise ValueError(f"a3d must be >= 0 (repulsive regime), got {self.a3d!r}")

    @property
    def resonance_a3d(self) -> float:
        """Scattering length at which g_1D diverges."""
        return math.sqrt(2.0) * self.a_perp / abs(ZETA_HALF)


def k_from_g(g: float, v: float = 1.0) -> float:
    """Pair momentum ``k`` in [0, pi] solving ``k = 2 atan(g / (2 v k))``.

    Parameters
    ----------
    g : float
        Pair coupling, ``>= 0``; ``INFINITE`` gives exactly ``pi``.
    v : float
        Jastrow exponent, ``> 0``.
    """
    g = _check_coupling("g", g)
    v = _check_exponent(v)
    if g == 0.0:
        return 0.0
    if g == INFINITE:
        return K_MAX
    c = g / (2.0 * v)

    # Two algebraically equal forms; each is cancellation-free in its own regime.
    if c < 1.0:
        def f(k: float) -> float:
            return k - 2.0 * math.atan(c / k) if k > 0.0 else -math.pi
    else:
        def f(k: float) -> float:
            return k - math.pi + 2.0 * math.atan(k / c)

    def df(k: float) -> float:
        return 1.0 + 2.0 * c / (c * c + k * k)

    return bracketed_newton(f, df, 0.0, K_MAX)


def g_from_k(k: float, v: float = 1.0) -> float:
    """Coupling ``g = 2 v k tan(k/2)``; returns ``INFINITE`` at ``k = pi``."""
    k = _check_momentum("k", k)
    v = _check_exponent(v)
    if k == K_MAX:
        return INFINITE
    return 2.0 * v * k * math.tan(0.5 * k)


def cusp_residual(k: float, g: float, v: float = 1.0) -> float:
    """``k - 2 atan(g / (2 v k))``, zero when ``k`` solves the cusp condition."""
    if g == INFINITE:
        return k - K_MAX
    if k == 0.0:
        return 0.0 if g == 0.0 else -math.pi
    return k - 2.0 * math.atan(g / (2.0 * v * k))


def g1d_from_geometry(geom: TrapGeometry) -> float:
    """Dimensionless coupling ``g = g_1D / (hbar^2 / M L)`` of a confined tube.

    Raises
    ------
    ResonanceError
        If ``a3d`` is at or beyond the confinement-induced resonance.
    """
    if geom.a3d >= geom.resonance_a3d:
        raise ResonanceError(
            f"a3d={geom.a3d!r} is at/beyond the confinement-induced resonance "
            f"a3d*={geom.resonance_a3d!r}"
        )
    shift = 1.0 - abs(ZETA_HALF) * geom.a3d / (math.sqrt(2.0) * geom.a_perp)
    return 2.0 * geom.a3d * geom.ring_length / (geom.a_perp**2 * shift)
