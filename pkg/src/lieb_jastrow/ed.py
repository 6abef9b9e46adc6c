"""Exact diagonalization in a truncated plane-wave basis.

Single-particle states are exp(2 pi i n x) with |n| <= n_max. Contact
interactions couple every pair of momentum-conserving two-particle
states with the same matrix element g_ij, so each interaction term is a
block of ones over states sharing the spectator momentum. The basis is
symmetrized over the two majority atoms only; the impurity stays
distinguishable so a single basis serves both g = g' and g != g'.

Truncation errors fall off as a power series in 1/n_max and are removed
by polynomial (Richardson) extrapolation over a cutoff sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import BasisOverflowError, ConvergenceError
from .model import INFINITE, CouplingSet
from .results import CorrelationCurve

TWO_PI = 2.0 * math.pi
DENSE_LIMIT = 1500


@dataclass(frozen=True)
class EDConfig:
    n_max: int = 40
    total_momentum: int = 0
    extrapolate: bool = True
    n_max_sequence: tuple = (12, 16, 24, 32, 48)
    size_cap: int = 20000

    def __post_init__(self) -> None:
        if self.n_max < 4 or any(n < 4 for n in self.n_max_sequence):
            raise ValueError("cutoffs must be >= 4")
        if self.extrapolate and len(self.n_max_sequence) < 3:
            raise ValueError("extrapolation needs at least three cutoffs")


@dataclass(frozen=True)
class SpectrumResult:
    ground_energy: float
    gap: float
    basis_size: int
    residual: float
    n_max: int
    extrapolated_energy: Optional[float] = None
    extrapolation_uncertainty: Optional[float] = None
    energies_by_cutoff: tuple = ()

    @property
    def best_energy(self) -> float:
        return self.ground_energy if self.extrapolated_energy is None else self.extrapolated_energy


@dataclass(frozen=True)
class _Basis:
    n: np.ndarray       # (D, particles) momenta of the unsymmetrized states
    proj: sp.csr_matrix  # (D, D_sym) isometry onto the majority-symmetric subspace


def _basis3(n_max: int, total: int, size_cap: int) -> _Basis:
    ns = np.arange(-n_max, n_max + 1)
    n2, n3 = (m.ravel() for m in np.meshgrid(ns, ns, indexing="ij"))
    n1 = total - n2 - n3
    keep = np.abs(n1) <= n_max
    n = np.stack([n1[keep], n2[keep], n3[keep]], axis=1)
    if len(n) > size_cap:
        raise BasisOverflowError(f"basis size {len(n)} exceeds cap {size_cap}")
    index = {tuple(row): i for i, row in enumerate(n.tolist())}
    rows, cols, vals = [], [], []
    col = 0
    for i, (a, b, c) in enumerate(n.tolist()):
        if b < c:
            j = index[(a, c, b)]
            rows += [i, j]
            cols += [col, col]
            vals += [math.sqrt(0.5)] * 2
            col += 1
        elif b == c:
            rows.append(i)
            cols.append(col)
            vals.append(1.0)
            col += 1
    proj = sp.csr_matrix((vals, (rows, cols)), shape=(len(n), col))
    return _Basis(n, proj)


def _basis2(n_max: int, total: int, size_cap: int) -> _Basis:
    n1 = np.arange(-n_max, n_max + 1)
    n2 = total - n1
    keep = np.abs(n2) <= n_max
    n = np.stack([n1[keep], n2[keep]], axis=1)
    if len(n) > size_cap:
        raise BasisOverflowError(f"basis size {len(n)} exceeds cap {size_cap}")
    index = {tuple(row): i for i, row in enumerate(n.tolist())}
    rows, cols, vals = [], [], []
    col = 0
    for i, (a, b) in enumerate(n.tolist()):
        if a < b:
            rows += [i, index[(b, a)]]
            cols += [col, col]
            vals += [math.sqrt(0.5)] * 2
            col += 1
        elif a == b:
            rows.append(i)
            cols.append(col)
            vals.append(1.0)
            col += 1
    return _Basis(n, sp.csr_matrix((vals, (rows, cols)), shape=(len(n), col)))


def _same_group(labels: np.ndarray) -> sp.csr_matrix:
    """Matrix of ones between all states sharing ``labels`` (a momentum-conserving block)."""
    _, inv = np.unique(labels, return_inverse=True)
    inc = sp.csr_matrix((np.ones(len(labels)), (np.arange(len(labels)), inv)))
    return (inc @ inc.T).tocsr()


def hamiltonian(couplings: CouplingSet, n_particles: int, n_max: int, total_momentum: int = 0,
                size_cap: int = 20000):
    """Sparse Hamiltonian in the unsymmetrized basis plus the basis itself."""
    if INFINITE in (couplings.g, couplings.g_prime):
        raise ValueError("ED needs finite couplings; approach g = inf by extrapolation in g")
    if n_particles == 3:
        basis = _basis3(n_max, total_momentum, size_cap)
        n = basis.n
        # pair (2,3) conserves n1, pair (1,2) conserves n3, pair (1,3) conserves n2
        pot = (
            couplings.g_prime * _same_group(n[:, 0])
            + couplings.g * _same_group(n[:, 2])
            + couplings.g * _same_group(n[:, 1])
        )
    elif n_particles == 2:
        basis = _basis2(n_max, total_momentum, size_cap)
        n = basis.n
        pot = couplings.g * _same_group(n.sum(axis=1))
    else:
        raise ValueError(f"ED supports 2 or 3 particles, got {n_particles}")
    kin = sp.diags(0.5 * TWO_PI**2 * np.sum(n.astype(float) ** 2, axis=1))
    return (kin + pot).tocsr(), basis


def _check_assembly(h: sp.csr_matrix, basis: _Basis) -> None:
    coo = h.tocoo()
    tot = basis.n.sum(axis=1)
    if np.any(tot[coo.row] != tot[coo.col]):
        raise AssertionError("matrix element connects different total momenta")
    if (h - h.T).count_nonzero() != 0:
        raise AssertionError("assembled Hamiltonian is not symmetric")


def _lowest_two(h: sp.csr_matrix):
    dim = h.shape[0]
    if dim <= DENSE_LIMIT:
        w, vecs = scipy.linalg.eigh(h.toarray(), subset_by_index=[0, min(1, dim - 1)])
    else:
        v0 = np.ones(dim) / math.sqrt(dim)
        w, vecs = spla.eigsh(h, k=2, which="SA", tol=1e-14, v0=v0, maxiter=20000)
        order = np.argsort(w)
        w, vecs = w[order], vecs[:, order]
    return w, vecs


def _solve(couplings: CouplingSet, n_particles: int, n_max: int, total: int, size_cap: int):
    h, basis = hamiltonian(couplings, n_particles, n_max, total, size_cap)
    _check_assembly(h, basis)
    h_sym = (basis.proj.T @ h @ basis.proj).tocsr()
    w, vecs = _lowest_two(h_sym)
    vec = vecs[:, 0]
    residual = float(np.linalg.norm(h_sym @ vec - w[0] * vec))
    # float round-off alone gives ~eps * ||H|| ~ n_max^2, so very large
    # two-body cutoffs (n_max >~ 100) cannot meet this bound
    if residual > 1e-10 * max(1.0, abs(w[0])):
        raise ConvergenceError(f"eigensolver residual {residual:.3e} at n_max={n_max}")
    gap = float(w[1] - w[0]) if len(w) > 1 else math.nan
    return float(w[0]), gap, residual, basis, vec


def richardson(cutoffs: Sequence[int], energies: Sequence[float], order: int) -> float:
    """Value at 1/n -> 0 of the degree-``order`` polynomial in 1/n through the last points."""
    x = 1.0 / np.asarray(cutoffs[-(order + 1):], dtype=float)
    y = np.asarray(energies[-(order + 1):], dtype=float)
    vander = np.vander(x, order + 1, increasing=True)
    return float(np.linalg.solve(vander, y)[0])


def ed_energy(couplings: CouplingSet, n: int = 3, cfg: EDConfig = EDConfig()) -> SpectrumResult:
    """Ground state of the ring Hamiltonian by exact diagonalization.

    With ``cfg.extrapolate`` the cutoff sequence is solved and the
    energies extrapolated in 1/n_max; the uncertainty is the gap between
    the cubic (last four cutoffs) and quadratic (last three) fits.
    """
    if not cfg.extrapolate:
        e0, gap, res, basis, _ = _solve(couplings, n, cfg.n_max, cfg.total_momentum, cfg.size_cap)
        return SpectrumResult(e0, gap, basis.proj.shape[1], res, cfg.n_max)

    cutoffs = sorted(cfg.n_max_sequence)
    energies = []
    for n_max in cutoffs:
        e0, gap, res, basis, _ = _solve(couplings, n, n_max, cfg.total_momentum, cfg.size_cap)
        energies.append(e0)
    order = min(3, len(cutoffs) - 1)
    e_inf = richardson(cutoffs, energies, order)
    e_low = richardson(cutoffs, energies, order - 1)
    return SpectrumResult(
        energies[-1], gap, basis.proj.shape[1], res, cutoffs[-1],
        e_inf, abs(e_inf - e_low), tuple(zip(cutoffs, energies)),
    )


def _coefficient_grid(basis: _Basis, vec_full: np.ndarray, n_max: int) -> np.ndarray:
    size = 2 * n_max + 1
    grid = np.zeros((size, size))
    grid[basis.n[:, 1] + n_max, basis.n[:, 2] + n_max] = vec_full
    return grid


def _shift_overlap(c: np.ndarray, q: int, axis_shift: tuple) -> float:
    """sum_n c(n) c(n + q * shift) over the (n2, n3) coefficient grid."""
    di, dj = (q * s for s in axis_shift)
    size = c.shape[0]
    i0, i1 = max(0, -di), min(size, size - di)
    j0, j1 = max(0, -dj), min(size, size - dj)
    if i0 >= i1 or j0 >= j1:
        return 0.0
    return float(np.sum(c[i0:i1, j0:j1] * c[i0 + di:i1 + di, j0 + dj:j1 + dj]))


def ed_pair_correlation(
    couplings: CouplingSet,
    kind: str,
    cfg: EDConfig = EDConfig(),
    r_grid=None,
) -> CorrelationCurve:
    """Pair-distance density of the ED ground state (three particles).

    Built from the Fourier series rho(r) = sum_q rho_q cos(2 pi q r),
    rho_q = sum_n c(n) c(n + q (e_j - e_i)); truncation shows up as
    Gibbs ripples at the contact cusp.
    """
    if kind == "majority-majority":
        shift = (1, -1)  # n2 + q, n3 - q
    elif kind == "impurity-majority":
        shift = (1, 0)   # n2 + q, n1 - q
    else:
        raise ValueError(f"unknown pair kind {kind!r}")
    r = np.linspace(0.0, 1.0, 101) if r_grid is None else np.asarray(r_grid, dtype=float)
    _, _, _, basis, vec = _solve(couplings, 3, cfg.n_max, cfg.total_momentum, cfg.size_cap)
    full = basis.proj @ vec
    c = _coefficient_grid(basis, full / np.linalg.norm(full), cfg.n_max)
    rho = np.ones_like(r)
    for q in range(1, 2 * cfg.n_max + 1):
        rho_q = _shift_overlap(c, q, shift)
        if rho_q != 0.0:
            rho += 2.0 * rho_q * np.cos(TWO_PI * q * r)
    return CorrelationCurve(r, rho, kind, None)
