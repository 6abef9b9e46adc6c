"""Invariant and formula-verification suite behind the ``verify`` command.

Each check records what was measured against which tolerance. Checks
marked ``known_deviation`` reproduce reference accuracy targets the
implementation has been shown not to meet; they are reported with their
measured values but only gate the exit code under ``strict``.
"""

from __future__ import annotations

import contextlib
import math
import time
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from . import jastrow
from .bethe import bethe_general, bethe_three_body, two_body_energy
from .ed import EDConfig, ed_energy, ed_pair_correlation
from .model import CouplingSet, JastrowParams, g_from_k, k_from_g
from .quadrature import (
    QuadratureConfig,
    exchange_asymmetry,
    jacobi_density,
    norm_quadrature,
    pair_marginal,
    variational_energy,
    xi_reflection_asymmetry,
)
from .variational import error_scan, optimize_v, self_consistent_point, stability_scan

PI = math.pi
FAULTS = ("norm-c2",)


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    tolerance: str
    passed: bool
    known_deviation: bool = False
    note: str = ""

    @property
    def status(self) -> str:
        if self.passed:
            return "pass"
        return "known-deviation" if self.known_deviation else "FAIL"


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


@contextlib.contextmanager
def injected_fault(name):
    """Temporarily perturb a closed-form coefficient (mutation test of the suite)."""
    if name is None:
        yield
        return
    if name != "norm-c2":
        raise ValueError(f"unknown fault {name!r}; choose from {FAULTS}")
    original = jastrow.norm_c2
    jastrow.norm_c2 = lambda k, kp: 1.01 * original(k, kp)
    try:
        yield
    finally:
        jastrow.norm_c2 = original


def _momentum_grid(quick: bool):
    return [0.4, 1.7, 2.9] if quick else list(np.linspace(0.3, PI, 5))


def check_anchors() -> List[Check]:
    e_j = jastrow.jastrow_energy(PI, PI).total
    e_b = bethe_three_body(math.inf).energy
    e10 = bethe_three_body(10.0).energy
    return [
        Check("tonks anchor jastrow_energy(pi, pi) = 4 pi^2", _rel(e_j, 4 * PI**2), "rel < 1e-9",
              _rel(e_j, 4 * PI**2) < 1e-9),
        Check("tonks anchor bethe_three_body(inf) = 4 pi^2", abs(e_b - 4 * PI**2), "exact",
              e_b == 4 * PI**2),
        Check("bethe three-body equals general solver at g=10", _rel(e10, bethe_general(10.0, 3).energy),
              "rel < 1e-9", _rel(e10, bethe_general(10.0, 3).energy) < 1e-9),
        Check("cusp round trip k -> g -> k", max(abs(k_from_g(g_from_k(k)) - k) for k in (0.1, 1.0, 2.5, 3.1)),
              "abs < 1e-12", max(abs(k_from_g(g_from_k(k)) - k) for k in (0.1, 1.0, 2.5, 3.1)) < 1e-12),
    ]


def check_closed_forms(quick: bool, cfg: QuadratureConfig) -> List[Check]:
    grid = _momentum_grid(quick)
    r = np.linspace(0.0, 1.0, 21)
    dev_c2 = dev_e = dev_mm = dev_im = 0.0
    for k in grid:
        for kp in grid:
            params = JastrowParams(k, kp)
            couplings = CouplingSet(g_from_k(k), g_from_k(kp))
            norm, _ = norm_quadrature(params, cfg)
            dev_c2 = max(dev_c2, _rel(jastrow.norm_c2(k, kp), 1.0 / norm))
            e_q = variational_energy(params, couplings, cfg).total
            dev_e = max(dev_e, _rel(jastrow.jastrow_energy(k, kp).total, e_q))
            mm = pair_marginal(params, "majority-majority", cfg, r).values
            im = pair_marginal(params, "impurity-majority", cfg, r).values
            dev_mm = max(dev_mm, float(np.max(np.abs(jastrow.pair_corr_mm(r, k, kp) - mm) / np.max(mm))))
            dev_im = max(dev_im, float(np.max(np.abs(jastrow.pair_corr_im(r, k, kp) - im) / np.max(im))))
    jump = 0.0
    for k in (0.7, 2.0, 3.0):
        for d in (1e-4, 1e-6):
            e_near = jastrow.jastrow_energy(k, k + d).total
            e_quad = variational_energy(JastrowParams(k, k + d), CouplingSet(g_from_k(k), g_from_k(k + d)), cfg).total
            jump = max(jump, _rel(e_near, e_quad))
    label = f"{len(grid)}x{len(grid)} grid"
    return [
        Check(f"norm_c2 quadrature equivalence ({label})", dev_c2, "rel < 1e-7", dev_c2 < 1e-7),
        Check(f"jastrow_energy quadrature equivalence ({label})", dev_e, "rel < 1e-7", dev_e < 1e-7),
        Check(f"pair_corr_mm quadrature equivalence ({label})", dev_mm, "rel < 1e-7", dev_mm < 1e-7),
        Check(f"pair_corr_im quadrature equivalence ({label})", dev_im, "rel < 1e-7", dev_im < 1e-7),
        Check("energy branch continuity at |k-k'| in {1e-4, 1e-6}", jump, "rel < 1e-7", jump < 1e-7),
    ]


def check_correlations() -> List[Check]:
    r = np.linspace(0.0, 1.0, 101)
    ident = max(
        float(np.max(np.abs(jastrow.pair_corr_mm(r, k, k) - jastrow.pair_corr_im(r, k, k))))
        for k in (PI / 4, PI / 2, 3 * PI / 4, PI)
    )
    k, kp = 5 * PI / 6, PI / 3
    fine = np.linspace(0.0, 1.0, 2001)
    rho = jastrow.pair_corr_mm(fine, k, kp)
    interior = np.arange(1, len(fine) - 1)
    is_max = (rho[interior] > rho[interior - 1]) & (rho[interior] > rho[interior + 1])
    is_min = (rho[interior] < rho[interior - 1]) & (rho[interior] < rho[interior + 1])
    maxima = fine[interior[is_max]]
    minima = fine[interior[is_min]]
    strict_min = bool(np.any(np.abs(minima - 0.5) < 1e-9))
    max_dev = float(np.max(np.abs(maxima - np.array([1 / 3, 2 / 3])))) if len(maxima) == 2 else math.inf
    sc = 0.0
    for kk in (1.0, 2.0, 2.5, 2.9):
        ks = jastrow.transition_kprime_star(kk)
        sc = max(sc, abs(jastrow.pair_corr_mm(0.5, kk, ks) - jastrow.pair_corr_mm(1 / 3, kk, ks)))
    return [
        Check("integrable identity pair_corr_mm == pair_corr_im", ident, "abs < 1e-10", ident < 1e-10),
        Check("correlation hole at (5pi/6, pi/3): strict minimum at r = 1/2", 0.0 if strict_min else 1.0,
              "local minimum", strict_min),
        Check("correlation hole maxima within 0.02 of r = 1/3, 2/3 (reference target)", max_dev, "< 0.02",
              max_dev < 0.02, known_deviation=True, note="closed form and quadrature put them near 0.11, 0.89"),
        Check("transition curve self-consistency rho(1/2) = rho(1/3)", sc, "abs < 1e-8", sc < 1e-8),
    ]


def check_integrable_profile(quick: bool, cfg: QuadratureConfig) -> List[Check]:
    ks = np.linspace(0.0, PI, 62)[1:-1]
    dev = np.array([jastrow.jastrow_energy(k, k).total / bethe_three_body(g_from_k(k)).energy - 1 for k in ks])
    i = int(np.argmax(dev))
    out = [
        Check("v=1 integrable error profile max in (5e-4, 2e-3)", float(dev[i]), "(5e-4, 2e-3)",
              5e-4 < dev[i] < 2e-3),
        Check("v=1 integrable error maximum located in k in [2.2, 2.8]", float(ks[i]), "[2.2, 2.8]",
              2.2 <= ks[i] <= 2.8),
    ]
    scan_grid = ks[::12] if quick else ks
    rows = error_scan(scan_grid, None, cfg)
    v_max = max(r.v_opt for r in rows)
    dev_var = np.array([r.dev_var_vs_bethe for r in rows])
    below_v1 = all(r.e_variational <= r.e_jastrow * (1 + 1e-12) for r in rows)
    out += [
        Check(f"optimal exponent below 1 on integrable grid ({len(rows)} points)", v_max, "< 1", v_max < 1.0),
        Check("variational energy above Bethe (upper bound)", float(dev_var.min()), ">= -1e-9",
              dev_var.min() >= -1e-9),
        Check("variational energy at or below v=1 energy", float(max(r.dev_v1_vs_var for r in rows) * -1.0),
              "<= 0", below_v1),
        Check("variational error below 1e-4 (reference target)", float(dev_var.max()), "< 1e-4 + 1e-9",
              dev_var.max() < 1e-4 + 1e-9, known_deviation=True,
              note="quick grid may miss the peak near k = 2.7" if quick else ""),
    ]
    return out


def check_oracle(quick: bool) -> List[Check]:
    gs = (10.0,) if quick else (1.0, 5.0, 10.0, 50.0)
    ed_cfg = EDConfig()
    dev = max(_rel(ed_energy(CouplingSet(g, g), 3, ed_cfg).best_energy, bethe_three_body(g).energy) for g in gs)
    two = _rel(ed_energy(CouplingSet(PI, PI), 2, ed_cfg).best_energy, two_body_energy(PI).total)
    coarse = EDConfig(n_max=12, extrapolate=False)
    sym = ed_pair_correlation(CouplingSet(5.0, 5.0), "majority-majority", coarse, np.linspace(0, 1, 21)).values
    sym2 = ed_pair_correlation(CouplingSet(5.0, 5.0), "impurity-majority", coarse, np.linspace(0, 1, 21)).values
    mono = ed_energy(CouplingSet(5.0, 2.0), 3, EDConfig(n_max_sequence=(6, 8, 10, 12))).energies_by_cutoff
    monotone = all(b[1] <= a[1] for a, b in zip(mono, mono[1:]))
    return [
        Check(f"ED vs Bethe, g in {gs}", dev, "rel < 5e-4", dev < 5e-4),
        Check("ED two-body g=pi vs k^2", two, "rel < 1e-3", two < 1e-3),
        Check("ED pair correlations coincide at g=g'", float(np.max(np.abs(sym - sym2))), "abs < 1e-8",
              float(np.max(np.abs(sym - sym2))) < 1e-8),
        Check("ED energy nonincreasing in n_max", 0.0 if monotone else 1.0, "monotone", monotone),
    ]


def check_nonintegrable(quick: bool, cfg: QuadratureConfig) -> List[Check]:
    points = ((PI / 2, PI / 6),) if quick else ((5 * PI / 6, PI / 3), (PI / 3, 5 * PI / 6), (PI / 2, PI / 6))
    out = []
    worst_bound = math.inf
    worst_dev = 0.0
    for k, kp in points:
        couplings, var = self_consistent_point(k, kp, cfg)
        spectrum = ed_energy(couplings, 3, EDConfig())
        e_ed, unc = spectrum.best_energy, spectrum.extrapolation_uncertainty
        slack = var.energy.total - (e_ed - 3 * var.energy.error * var.energy.total - unc)
        worst_bound = min(worst_bound, slack)
        worst_dev = max(worst_dev, abs(var.energy.total - e_ed) / e_ed - unc / e_ed)
    out.append(Check("variational energy above ED (non-integrable)", worst_bound, ">= 0", worst_bound >= 0.0))
    out.append(Check("variational vs ED below 5e-3 (non-integrable)", worst_dev, "< 5e-3", worst_dev < 5e-3,
                     known_deviation=True))
    return out


def check_symmetry(cfg: QuadratureConfig) -> List[Check]:
    equal = JastrowParams(2.5, 2.5)
    broken = JastrowParams(2.5, 1.5)
    ex_eq = exchange_asymmetry(equal, cfg)
    ex_br = exchange_asymmetry(broken, cfg)
    xi_eq = xi_reflection_asymmetry(jacobi_density(equal, cfg))
    xi_br = xi_reflection_asymmetry(jacobi_density(broken, cfg))
    return [
        Check("impurity-majority exchange symmetric at k=k'", ex_eq, "abs < 1e-12", ex_eq < 1e-12),
        Check("impurity-majority exchange broken at (5/2, 3/2)", ex_br, ">= 1e-5", ex_br >= 1e-5),
        Check("xi reflection symmetric at k=k'", xi_eq, "abs < 1e-6", xi_eq < 1e-6),
        Check("xi reflection broken at (5/2, 3/2) (reference target)", xi_br, ">= 1e-5", xi_br >= 1e-5,
              known_deviation=True, note="xi -> -xi is exact for any (k, k')"),
    ]


def check_stability() -> List[Check]:
    scan = stability_scan(np.linspace(0.5, 3.0, 10))
    mags = np.abs(scan.slope)
    gap = float(np.nanmax(scan.richardson_gap))
    return [
        Check("stability |slope(3.0)| < |slope(0.5)|", float(mags[-1] / mags[0]), "< 1", mags[-1] < mags[0]),
        Check("stability slope step-halving agreement", gap, "rel < 1e-4", gap < 1e-4),
    ]


def check_crossing() -> List[Check]:
    ok = True
    for kp in (1.0, 2.0):
        for d in (-0.05, 0.05):
            k = kp + d
            delta = jastrow.jastrow_energy(k, kp).total - jastrow.jastrow_energy(k, k).total
            # k < k' lies above the integrable curve, k > k' below
            ok &= (delta > 0) if d < 0 else (delta < 0)
    return [Check("non-integrable curve crosses integrable curve at k = k'", 0.0 if ok else 1.0, "sign change", ok)]


REPORT_POINTS = ((PI / 3, PI / 3), (5 * PI / 6, PI / 3), (PI / 3, 5 * PI / 6), (PI / 2, PI / 6), (2.5, 1.5))


def formula_report(points=REPORT_POINTS, cfg: QuadratureConfig = QuadratureConfig()) -> list:
    """Rows (formula, k, k', printed, implemented, quadrature, dev_printed, dev_implemented).

    ``printed`` evaluates each closed form exactly as originally printed; the
    implemented version carries the corrections found by quadrature.
    """
    rows = []
    r_probe = np.array([0.1, 0.25, 0.4])
    for k, kp in points:
        params = JastrowParams(k, kp)
        norm, _ = norm_quadrature(params, cfg)
        e_q = variational_energy(params, CouplingSet(g_from_k(k), g_from_k(kp)), cfg).total
        mm_q = pair_marginal(params, "majority-majority", cfg, r_probe).values
        im_q = pair_marginal(params, "impurity-majority", cfg, r_probe).values
        entries = [
            ("C^2", jastrow.printed_c2(k, kp), jastrow.norm_c2(k, kp), 1.0 / norm),
            ("energy", jastrow.printed_energy(k, kp), jastrow.jastrow_energy(k, kp).total, e_q),
        ]
        for j, r in enumerate(r_probe):
            entries.append((f"rho_mm(r={r:g})", float(jastrow.printed_pair_corr_mm(r, k, kp)),
                            jastrow.pair_corr_mm(r, k, kp), float(mm_q[j])))
            entries.append((f"rho_im(r={r:g})", float(jastrow.printed_pair_corr_im(r, k, kp)),
                            jastrow.pair_corr_im(r, k, kp), float(im_q[j])))
        for name, printed, implemented, ref in entries:
            rows.append([name, k, kp, printed, implemented, ref, _rel(printed, ref), _rel(implemented, ref)])
    return rows


def run_suite(quick: bool = False, fault=None, cfg: QuadratureConfig = QuadratureConfig(),
              log: Callable[[str], None] = lambda s: None) -> List[Check]:
    groups = [
        ("anchors", check_anchors),
        ("closed forms", lambda: check_closed_forms(quick, cfg)),
        ("correlations", check_correlations),
        ("integrable profile", lambda: check_integrable_profile(quick, cfg)),
        ("oracle", lambda: check_oracle(quick)),
        ("non-integrable", lambda: check_nonintegrable(quick, cfg)),
        ("symmetry", lambda: check_symmetry(cfg)),
        ("stability", check_stability),
        ("crossing", check_crossing),
    ]
    checks: List[Check] = []
    with injected_fault(fault):
        for label, fn in groups:
            t0 = time.perf_counter()
            part = fn()
            log(f"{label}: {len(part)} checks in {time.perf_counter() - t0:.1f} s")
            checks += part
    return checks


def suite_passed(checks: List[Check], strict: bool = False) -> bool:
    return all(c.passed or (c.known_deviation and not strict) for c in checks)
