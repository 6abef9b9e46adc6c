import math

import numpy as np
import pytest

from lieb_jastrow.bethe import bethe_three_body, two_body_energy
from lieb_jastrow.ed import EDConfig, ed_energy, ed_pair_correlation, hamiltonian, richardson
from lieb_jastrow.errors import BasisOverflowError
from lieb_jastrow.model import INFINITE, CouplingSet

PI = math.pi


def test_free_particles():
    res = ed_energy(CouplingSet(0.0, 0.0), 3, EDConfig(extrapolate=False, n_max=8))
    assert res.ground_energy == pytest.approx(0.0, abs=1e-12)


def test_two_body_against_exact():
    res = ed_energy(CouplingSet(PI, PI), 2, EDConfig(n_max_sequence=(16, 24, 32, 48, 64)))
    assert res.residual < 1e-10 * max(1.0, res.ground_energy)
    assert res.best_energy == pytest.approx(PI**2 / 4, rel=1e-3)
    assert res.best_energy == pytest.approx(two_body_energy(PI).total, rel=1e-5)


@pytest.mark.parametrize("g", [1.0, 10.0])
def test_three_body_against_bethe(g):
    res = ed_energy(CouplingSet(g, g), 3)
    assert res.best_energy == pytest.approx(bethe_three_body(g).energy, rel=5e-6)
    assert res.extrapolation_uncertainty < 1e-4


def test_monotone_in_cutoff():
    cfg = EDConfig(n_max_sequence=(6, 8, 12, 16))
    res = ed_energy(CouplingSet(10.0, 3.0), 3, cfg)
    energies = [e for _, e in res.energies_by_cutoff]
    assert np.all(np.diff(energies) < 0)
    assert res.best_energy < energies[-1]


def test_hamiltonian_is_symmetric_and_conserves_momentum():
    h, basis = hamiltonian(CouplingSet(2.0, 5.0), 3, 6)
    assert (h - h.T).count_nonzero() == 0
    coo = h.tocoo()
    tot = basis.n.sum(axis=1)
    assert np.all(tot[coo.row] == tot[coo.col])
    assert np.all(tot == 0)


def test_richardson_recovers_polynomial():
    cut = [8, 12, 16, 24]
    e = [2.0 + 3.0 / n - 1.0 / n**2 + 0.5 / n**3 for n in cut]
    assert richardson(cut, e, 3) == pytest.approx(2.0, abs=1e-12)


def test_pair_correlation_symmetric_and_uniform():
    cfg = EDConfig(n_max=10, extrapolate=False)
    r = np.linspace(0.0, 1.0, 41)
    free = ed_pair_correlation(CouplingSet(0.0, 0.0), "majority-majority", cfg, r)
    assert np.allclose(free.values, 1.0, atol=1e-12)
    c = CouplingSet(6.0, 2.0)
    for kind in ("majority-majority", "impurity-majority"):
        rho = ed_pair_correlation(c, kind, cfg, r).values
        assert np.allclose(rho, rho[::-1], atol=1e-12)
    eq = CouplingSet(4.0, 4.0)
    a = ed_pair_correlation(eq, "majority-majority", cfg, r).values
    b = ed_pair_correlation(eq, "impurity-majority", cfg, r).values
    assert np.allclose(a, b, atol=1e-10)


def test_errors():
    with pytest.raises(BasisOverflowError):
        ed_energy(CouplingSet(1.0, 1.0), 3, EDConfig(n_max=80, extrapolate=False, size_cap=1000))
    with pytest.raises(ValueError):
        ed_energy(CouplingSet(INFINITE, 1.0), 3, EDConfig(extrapolate=False))
    with pytest.raises(ValueError):
        ed_energy(CouplingSet(1.0, 1.0), 4, EDConfig(extrapolate=False))
    with pytest.raises(ValueError):
        EDConfig(n_max_sequence=(8, 12))
    with pytest.raises(ValueError):
        ed_pair_correlation(CouplingSet(1.0, 1.0), "pair", EDConfig(n_max=6, extrapolate=False))
