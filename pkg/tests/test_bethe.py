import math

import numpy as np
import pytest

from lieb_jastrow.bethe import (
    bethe_general,
    bethe_residual,
    bethe_three_body,
    free_fermion_roots,
    tonks_energy,
    two_body_energy,
)
from lieb_jastrow.errors import ConvergenceError
from lieb_jastrow.model import INFINITE

PI = math.pi
# frozen reference values (three-body root solved independently to full precision)
E3_G10 = 16.992879665631804


def test_three_body_limits():
    zero = bethe_three_body(0.0)
    assert zero.energy == 0.0 and np.all(zero.roots == 0.0)
    tg = bethe_three_body(INFINITE)
    assert tg.energy == 4 * PI**2
    assert list(tg.roots) == [-2 * PI, 0.0, 2 * PI]


def test_three_body_reference_value():
    sol = bethe_three_body(10.0)
    assert sol.energy == pytest.approx(E3_G10, rel=1e-14)
    assert sol.residual < 1e-12


def test_general_matches_three_body_on_log_grid():
    for g in np.logspace(-3, 4, 50):
        e3 = bethe_three_body(g).energy
        assert bethe_general(g, 3).energy == pytest.approx(e3, rel=1e-9)


def test_general_strong_and_weak():
    strong = bethe_general(1e8, 3)
    assert np.allclose(strong.roots, [-2 * PI, 0.0, 2 * PI], atol=1e-6)
    assert strong.energy == pytest.approx(4 * PI**2, rel=1e-6)
    weak = bethe_general(1e-6, 3)
    assert weak.energy == pytest.approx(3e-6, rel=1e-5)


@pytest.mark.parametrize("n", [2, 4, 5, 8, 12])
@pytest.mark.parametrize("g", [0.01, 1.0, 30.0])
def test_general_invariants(n, g):
    sol = bethe_general(g, n)
    assert np.max(np.abs(bethe_residual(sol.roots, g))) < 1e-10
    assert np.all(np.diff(sol.roots) > 0)
    assert np.allclose(np.sort(-sol.roots), sol.roots, atol=1e-12)
    assert 0.0 < sol.energy < tonks_energy(n)


def test_energy_increases_with_g():
    energies = [bethe_three_body(g).energy for g in np.logspace(-2, 3, 40)]
    assert np.all(np.diff(energies) > 0)
    assert energies[-1] < 4 * PI**2


def test_general_bad_input():
    with pytest.raises(ValueError):
        bethe_general(1.0, 13)
    with pytest.raises(ValueError):
        bethe_general(INFINITE, 3)
    with pytest.raises(ValueError):
        bethe_three_body(-1.0)


def test_two_body():
    assert two_body_energy(0.0).total == 0.0
    assert two_body_energy(INFINITE).total == pytest.approx(PI**2, rel=1e-15)
    assert two_body_energy(PI).total == pytest.approx(PI**2 / 4, rel=1e-13)
    assert bethe_general(PI, 2).energy == pytest.approx(PI**2 / 4, rel=1e-10)


def test_free_fermion_roots():
    assert list(free_fermion_roots(3)) == [-2 * PI, 0.0, 2 * PI]
    assert tonks_energy(3) == 4 * PI**2


def test_convergence_error_is_runtime_error():
    assert issubclass(ConvergenceError, RuntimeError)
