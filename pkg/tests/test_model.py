import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lieb_jastrow.errors import ResonanceError
from lieb_jastrow.model import (
    INFINITE,
    ZETA_HALF,
    CouplingSet,
    JastrowParams,
    TrapGeometry,
    cusp_residual,
    g1d_from_geometry,
    g_from_k,
    k_from_g,
)

PI = math.pi


def test_zeta_half_constant():
    from scipy.special import zeta

    # scipy's zeta is the Hurwitz form; zeta(s, 1) is Riemann's for s > 1 only,
    # so compare against the known value via mpmath instead when available.
    mpmath = pytest.importorskip("mpmath")
    assert ZETA_HALF == pytest.approx(float(mpmath.zeta(0.5)), rel=1e-15)
    assert callable(zeta)


@pytest.mark.parametrize(
    "g, v, k",
    [(0.0, 1.0, 0.0), (INFINITE, 1.0, PI), (INFINITE, 0.3, PI), (PI, 1.0, PI / 2)],
)
def test_k_from_g_exact_points(g, v, k):
    assert k_from_g(g, v) == pytest.approx(k, abs=1e-14)


def test_k_from_g_tg_is_exact():
    assert k_from_g(INFINITE) == PI


def test_k_four_fifths_pi():
    g = 2 * (4 * PI / 5) * math.tan(2 * PI / 5)
    assert g == pytest.approx(15.47, abs=5e-3)
    assert k_from_g(g) == pytest.approx(4 * PI / 5, rel=1e-13)
    assert g_from_k(4 * PI / 5) == pytest.approx(15.4701, abs=1e-4)


def test_g_from_k_examples():
    assert g_from_k(0.0) == 0.0
    assert g_from_k(PI / 2) == pytest.approx(PI, rel=1e-15)
    assert g_from_k(PI) == INFINITE


@pytest.mark.parametrize("v", [0.5, 1.0, 2.0])
def test_round_trip_log_grid(v):
    for g in np.logspace(-6, 6, 61):
        k = k_from_g(g, v)
        assert 0.0 <= k <= PI
        assert abs(cusp_residual(k, g, v)) < 1e-12
        assert abs(g_from_k(k, v) - g) / g < 1e-10


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-6, 1e6), st.floats(1e-6, 1e6), st.sampled_from([0.5, 1.0, 2.0]))
def test_monotone_in_g(g1, g2, v):
    lo, hi = sorted((g1, g2))
    assert k_from_g(lo, v) <= k_from_g(hi, v)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(0.2, 5.0), st.floats(0.2, 5.0))
def test_decreasing_in_v(g, v1, v2):
    lo, hi = sorted((v1, v2))
    if hi - lo < 1e-6:
        return
    assert k_from_g(g, hi) < k_from_g(g, lo)


@pytest.mark.parametrize("bad", [-1.0, math.nan, -math.inf])
def test_bad_couplings(bad):
    with pytest.raises(ValueError):
        k_from_g(bad)
    with pytest.raises(ValueError):
        CouplingSet(bad, 1.0)


def test_bad_exponent_and_momentum():
    with pytest.raises(ValueError):
        k_from_g(1.0, 0.0)
    with pytest.raises(ValueError):
        g_from_k(PI + 1e-9)
    with pytest.raises(ValueError):
        JastrowParams(-0.1, 1.0)


def test_params_from_couplings_round_trip():
    c = CouplingSet(3.0, INFINITE)
    p = JastrowParams.from_couplings(c, 0.8)
    assert p.k_prime == PI
    back = p.couplings()
    assert back.g == pytest.approx(3.0, rel=1e-12)
    assert back.g_prime == INFINITE
    assert not c.integrable and CouplingSet(2.0, 2.0).integrable


def test_geometry_examples():
    assert g1d_from_geometry(TrapGeometry(0.0, 1.0)) == 0.0
    g = g1d_from_geometry(TrapGeometry(0.01, 1.0))
    assert g == pytest.approx(0.02 / (1 - 0.010326), rel=1e-5)
    assert g == pytest.approx(0.02021, abs=1e-5)


def test_geometry_resonance():
    geom = TrapGeometry(0.5, 1.0)
    a_star = geom.resonance_a3d
    assert g1d_from_geometry(TrapGeometry(a_star * (1 - 1e-9), 1.0)) > 1e8
    with pytest.raises(ResonanceError):
        g1d_from_geometry(TrapGeometry(a_star, 1.0))
    with pytest.raises(ValueError):
        TrapGeometry(0.1, 0.0)
