"""One test per acceptance criterion, each at its stated tolerance.

Criteria that split into independent conditions report every part on
the same line and fail if any part fails.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from lieb_jastrow import jastrow
from lieb_jastrow.bethe import bethe_three_body
from lieb_jastrow.ed import EDConfig, ed_energy
from lieb_jastrow.model import INFINITE, CouplingSet, JastrowParams, g_from_k
from lieb_jastrow.quadrature import (
    QuadratureConfig,
    jacobi_density,
    norm_quadrature,
    pair_marginal,
    variational_energy,
    xi_reflection_asymmetry,
)
from lieb_jastrow.variational import error_scan, self_consistent_point, stability_scan

PI = math.pi
CFG = QuadratureConfig()
K_GRID = np.linspace(PI / 60, PI, 60)


@pytest.fixture(scope="module")
def integrable_sweep():
    start = time.perf_counter()
    rows = error_scan(K_GRID, cfg=CFG)
    return rows, time.perf_counter() - start


def _rel(a, b):
    return abs(a - b) / abs(b)


def test_criterion_01_tonks_anchor(report):
    dev = _rel(jastrow.jastrow_energy(PI, PI).total, 4 * PI**2)
    sol = bethe_three_body(INFINITE)
    exact = sol.energy == 4 * PI**2 and sol.roots[-1] == 2 * PI
    report(1, dev < 1e-9 and exact, f"jastrow rel dev {dev:.2e}, bethe exact={exact}", "1e-9 rel; exact")


def test_criterion_02_jastrow_error_profile(report):
    start = time.perf_counter()
    dev = np.array([jastrow.jastrow_energy(k, k).total / bethe_three_body(g_from_k(k)).energy - 1 for k in K_GRID])
    elapsed = time.perf_counter() - start
    i = int(np.argmax(dev))
    ok = 5e-4 < dev[i] < 2e-3 and 2.2 <= K_GRID[i] <= 2.8 and elapsed < 10
    report(2, ok, f"max dev {dev[i]:.4e} at k={K_GRID[i]:.3f}, {elapsed:.2f}s", "(5e-4, 2e-3), k in [2.2, 2.8], < 10 s")


def test_criterion_03_variational_improvement(report, integrable_sweep):
    rows, elapsed = integrable_sweep
    dev = np.array([r.dev_var_vs_bethe for r in rows])
    i = int(np.argmax(dev))
    bound = 1e-4 + CFG.tol_report
    ok = dev[i] < bound and elapsed < 600
    report(3, ok, f"max dev {dev[i]:.4e} at k={K_GRID[i]:.3f}, sweep {elapsed:.1f}s", f"< {bound:.9g}, < 10 min")


def test_criterion_04_optimal_exponent(report, integrable_sweep):
    rows, _ = integrable_sweep
    v = np.array([r.v_opt for r in rows[1:-1]])
    report(4, bool(np.all(v < 1.0)), f"v_opt in [{v.min():.4f}, {v.max():.4f}] on {len(v)} interior points", "< 1")


def test_criterion_05_oracle_integrable(report):
    start = time.perf_counter()
    devs = {}
    for g in (1.0, 5.0, 10.0, 50.0):
        e_b = bethe_three_body(g).energy
        devs[g] = abs(e_b - ed_energy(CouplingSet(g, g), 3, EDConfig()).best_energy) / e_b
    elapsed = time.perf_counter() - start
    worst = max(devs.values())
    report(5, worst < 5e-4 and elapsed < 300, f"max rel dev {worst:.2e}, {elapsed:.1f}s", "< 5e-4, < 5 min")


def test_criterion_06_oracle_nonintegrable(report):
    start = time.perf_counter()
    parts = []
    ok = True
    for k, kp in ((5 * PI / 6, PI / 3), (PI / 3, 5 * PI / 6), (PI / 2, PI / 6)):
        couplings, var = self_consistent_point(k, kp, CFG)
        ed = ed_energy(couplings, 3, EDConfig())
        # the extrapolation uncertainty eats into the margin
        dev = abs(var.energy.total - ed.best_energy) / ed.best_energy
        margin = dev + ed.extrapolation_uncertainty / ed.best_energy
        ok &= margin < 5e-3
        parts.append(f"({k:.4f},{kp:.4f}) v={var.v_opt:.5f} dev={dev:.2e}+unc {ed.extrapolation_uncertainty / ed.best_energy:.1e}")
    elapsed = time.perf_counter() - start
    report(6, ok and elapsed < 600, "; ".join(parts) + f"; {elapsed:.1f}s", "dev + unc < 5e-3, < 10 min")


def test_criterion_07_closed_form_equivalence(report):
    start = time.perf_counter()
    grid = np.linspace(0.3, PI, 5)
    r = np.linspace(0.0, 1.0, 21)
    worst = {"norm_c2": 0.0, "energy": 0.0, "rho_mm": 0.0, "rho_im": 0.0}
    for k in grid:
        for kp in grid:
            p = JastrowParams(k, kp)
            c = CouplingSet(g_from_k(k), g_from_k(kp))
            norm, _ = norm_quadrature(p, CFG)
            worst["norm_c2"] = max(worst["norm_c2"], _rel(jastrow.norm_c2(k, kp), 1 / norm))
            e_q = variational_energy(p, c, CFG).total
            worst["energy"] = max(worst["energy"], _rel(jastrow.jastrow_energy(k, kp).total, e_q))
            for key, kind, fn in (("rho_mm", "majority-majority", jastrow.pair_corr_mm),
                                  ("rho_im", "impurity-majority", jastrow.pair_corr_im)):
                q = pair_marginal(p, kind, CFG, r).values
                worst[key] = max(worst[key], float(np.max(np.abs(fn(r, k, kp) - q)) / np.max(q)))
    cont = 0.0
    for k in grid[:-1]:
        for d in (1e-4, 1e-6):
            p = JastrowParams(k, k + d)
            e_q = variational_energy(p, p.couplings(), CFG).total
            cont = max(cont, _rel(jastrow.jastrow_energy(k, k + d).total, e_q))
    worst["continuity"] = cont
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) < 1e-7 and elapsed < 120
    shown = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    report(7, ok, f"{shown}, {elapsed:.1f}s", "1e-7 rel, < 2 min")


def test_criterion_08_correlation_hole_transition(report):
    k, kp = 5 * PI / 6, PI / 3
    r = np.linspace(0.0, 1.0, 100001)
    rho = jastrow.pair_corr_mm(r, k, kp)
    mid = 50000
    strict_min = rho[mid] < rho[mid - 1] and rho[mid] < rho[mid + 1]
    interior = (np.diff(np.sign(np.diff(rho))) < 0).nonzero()[0] + 1
    maxima = r[interior]
    near = [min(abs(maxima - t)) for t in (1 / 3, 2 / 3)] if len(maxima) else [1.0, 1.0]
    kps = jastrow.transition_kprime_star(k)
    gap = abs(jastrow.pair_corr_mm(0.5, k, kps) - jastrow.pair_corr_mm(1 / 3, k, kps))
    ok = strict_min and max(near) < 0.02 and gap < 1e-8
    report(8, ok, f"strict min at 1/2={strict_min}, maxima at {np.round(maxima, 4).tolist()} "
                  f"(off by {max(near):.4f}), transition gap {gap:.1e}", "maxima within 0.02; gap < 1e-8")


def test_criterion_09_symmetry_breaking(report):
    sym = xi_reflection_asymmetry(jacobi_density(JastrowParams(1.7, 1.7), CFG))
    broken = xi_reflection_asymmetry(jacobi_density(JastrowParams(2.5, 1.5), CFG))
    ok = sym < 1e-6 and broken >= 1e-5
    report(9, ok, f"k=k' asymmetry {sym:.1e}, (5/2, 3/2) asymmetry {broken:.1e}", "< 1e-6 and >= 1e-5")


def test_criterion_10_stability_trend(report):
    scan = stability_scan(np.linspace(0.5, 3.0, 10))
    s_lo, s_hi = abs(scan.slope[0]), abs(scan.slope[-1])
    report(10, s_hi < s_lo, f"|slope(0.5)|={s_lo:.4f}, |slope(3.0)|={s_hi:.4f}", "|slope(3.0)| < |slope(0.5)|")


def test_criterion_11_integrable_identity(report):
    r = np.linspace(0.0, 1.0, 101)
    dev = max(float(np.max(np.abs(jastrow.pair_corr_mm(r, k, k) - jastrow.pair_corr_im(r, k, k))))
              for k in (PI / 4, PI / 2, 3 * PI / 4, PI))
    report(11, dev < 1e-10, f"max |mm - im| {dev:.1e}", "< 1e-10")


def _timed_verify(*extra):
    start = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "lieb_jastrow", "verify", *extra],
                          capture_output=True, text=True, timeout=3600)
    return proc.returncode, time.perf_counter() - start


def test_criterion_12_verify_suite(report):
    q_code, q_time = _timed_verify("--quick")
    f_code, f_time = _timed_verify()
    ok = q_code == 0 and q_time < 60 and f_code == 0 and f_time < 1800
    report(12, ok, f"quick exit {q_code} in {q_time:.1f}s, full exit {f_code} in {f_time:.1f}s",
           "quick exit 0 < 60 s, full exit 0 < 30 min")
