import math

import numpy as np
import pytest

from lieb_jastrow.errors import ConvergenceError
from lieb_jastrow.jastrow import jastrow_energy
from lieb_jastrow.model import INFINITE, CouplingSet, g_from_k, k_from_g
from lieb_jastrow.quadrature import QuadratureConfig
from lieb_jastrow.variational import (
    error_point,
    error_scan,
    optimize_v,
    self_consistent_point,
    stability_scan,
    stability_slope,
)

PI = math.pi


def test_free_case_is_flat():
    res = optimize_v(CouplingSet(0.0, 0.0))
    assert res.flat_flag and res.v_opt == 1.0
    assert res.energy.total == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("k", [1.0, 2.0, 2.7])
def test_integrable_optimum_below_one(k):
    g = g_from_k(k)
    res = optimize_v(CouplingSet(g, g))
    assert 0.5 < res.v_opt < 1.0
    assert not res.flat_flag
    assert res.energy.total <= res.energy_v1 + 1e-12
    assert res.energy_v1 == pytest.approx(jastrow_energy(k, k).total, rel=1e-10)


def test_nodal_majority_optimum_crosses_one():
    # with a hard-core majority pair the optimal exponent starts above one
    # at weak impurity coupling and drops below it at strong coupling
    weak = optimize_v(CouplingSet(g_from_k(1.0), INFINITE))
    strong = optimize_v(CouplingSet(g_from_k(2.8), INFINITE))
    assert weak.v_opt > 1.0
    assert strong.v_opt < 1.0


def test_error_point_fields():
    row = error_point(2.0)
    assert row.k == row.k_prime == 2.0
    assert row.dev_v1_vs_bethe > row.dev_var_vs_bethe > 0.0
    assert row.dev_v1_vs_var > 0.0
    assert math.isnan(error_point(2.0, 1.0).e_bethe)


def test_error_scan_rejects_bad_grid():
    with pytest.raises(ValueError):
        error_scan([0.0, 1.0])


def test_stability_slope_behaviour():
    scan = stability_scan(np.linspace(0.3, 3.0, 10))
    assert np.all(scan.slope < 0)
    assert np.all(np.diff(scan.slope) > 0)
    assert np.all(scan.richardson_gap < 1e-6)
    # at k = k' the impurity momentum sits in two pairs, the majority one in one
    assert np.allclose(scan.slope_vary_k, 2.0 * scan.slope, rtol=1e-6)


def test_stability_overflow_and_validation():
    with pytest.raises(OverflowError):
        stability_slope(1e-8)
    scan = stability_scan([1e-8, 1.0])
    assert list(scan.overflow) == [True, False]
    assert math.isnan(scan.slope[0])
    with pytest.raises(ValueError):
        stability_scan([PI])
    with pytest.raises(ValueError):
        stability_slope(1.0, vary="g")


def test_self_consistent_point():
    couplings, res = self_consistent_point(2.0, 1.0)
    assert k_from_g(couplings.g, res.v_opt) == pytest.approx(2.0, abs=1e-6)
    assert k_from_g(couplings.g_prime, res.v_opt) == pytest.approx(1.0, abs=1e-6)


def test_self_consistent_point_reports_failure():
    with pytest.raises(ConvergenceError):
        self_consistent_point(2.5, 1.0, max_iter=1)


def test_variational_bound_against_bethe():
    for k in (0.5, 1.5, 2.5, PI):
        row = error_point(k, cfg=QuadratureConfig())
        assert row.e_variational >= row.e_bethe * (1 - 1e-12)
