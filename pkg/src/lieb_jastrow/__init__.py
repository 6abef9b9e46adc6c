"""Jastrow-ansatz study of three bosons on a ring with broken integrability.

Atom 1 is the impurity, coupled to the two majority atoms with ``g``;
the majority pair interacts with ``g_prime``. Energies are in units of
hbar^2 / (M L^2) on a ring of length L = 1.
"""

from .bethe import BetheSolution, bethe_general, bethe_three_body, two_body_energy
from .errors import BasisOverflowError, ConvergenceError, ResonanceError, TransitionDomainError
from .jastrow import (
    jastrow_energy,
    norm_c2,
    norm_integral,
    pair_corr_im,
    pair_corr_mm,
    transition_kprime_star,
)
from .model import CouplingSet, JastrowParams, TrapGeometry, g1d_from_geometry, g_from_k, k_from_g
from .results import CorrelationCurve, DensityGrid, EnergyReport

__version__ = "0.1.0"

__all__ = [
    "BasisOverflowError",
    "BetheSolution",
    "ConvergenceError",
    "CorrelationCurve",
    "CouplingSet",
    "DensityGrid",
    "EnergyReport",
    "JastrowParams",
    "ResonanceError",
    "TransitionDomainError",
    "TrapGeometry",
    "bethe_general",
    "bethe_three_body",
    "g1d_from_geometry",
    "g_from_k",
    "jastrow_energy",
    "k_from_g",
    "norm_c2",
    "norm_integral",
    "pair_corr_im",
    "pair_corr_mm",
    "transition_kprime_star",
    "two_body_energy",
]
