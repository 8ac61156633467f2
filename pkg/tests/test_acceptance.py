"""Acceptance suite: one criterion per test, each printing a single
PASS/FAIL line (run with pytest -s to see them inline)."""

import math
import time

import jax.numpy as jnp
import numpy as np
import pytest

from crlab import (FoliatedGraph, QuadratureSpec, RotationalHeis, TorusS3,
                   VerticalPlane, bump, direct_volume_fit, exact_form_check,
                   el_residual_e2, first_variation_check, ibp_check, integrate,
                   jet_at, renorm_coefficients, scan_family)
from crlab.conformal import da1_invariance_check, surface_points
from crlab.oracles import _shifted_sphere_sup_hcr
from crlab.yamabe import default_eps_list, expansion_coeffs

TWO_PI = 2.0 * math.pi


def report(num: int, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}")
    assert ok, detail


def test_criterion_1_clifford_first_energy(clifford):
    spec = QuadratureSpec(n1=128, n2=128)
    integrate(clifford, "da1", spec, quiet=True)  # jit warmup
    t0 = time.perf_counter()
    value = integrate(clifford, "da1", spec, quiet=True).value
    elapsed = time.perf_counter() - t0
    rel = abs(value - math.pi ** 2 / math.sqrt(2.0)) / (math.pi ** 2 / math.sqrt(2.0))
    report(1, rel < 1e-8 and elapsed < 1.0,
           f"E1(Clifford) rel err {rel:.2e} (tol 1e-8), {elapsed:.3f}s (< 1 s)")


def test_criterion_2_shifted_sphere_hcr_zero():
    sup = _shifted_sphere_sup_hcr()
    report(2, sup < 1e-10,
           f"sup |Hcr| over shifted spheres rho0 in {{0.7, 1, 1.3}} "
           f"= {sup:.2e} (tol 1e-10)")


def test_criterion_3_cone_family_scans():
    gen = lambda c: RotationalHeis("dilation_cone", c=c)
    grid = np.linspace(0.5, 1.2, 15)
    spec = QuadratureSpec(n1=16, n2=16)
    target = math.sqrt(3.0) / 2.0
    s_e2 = scan_family(gen, grid, "ResidualE2", spec)
    s_hcr = scan_family(gen, grid, "Hcr", spec)
    err_e2 = (abs(s_e2.critical_params[0] - target)
              if s_e2.critical_params else math.inf)
    err_hcr = (abs(s_hcr.critical_params[0] - target)
               if s_hcr.critical_params else math.inf)
    report(3, err_e2 < 1e-9 and err_hcr < 1e-12,
           f"cone critical c: residual-scan err {err_e2:.2e} (tol 1e-9), "
           f"Hcr-zero err {err_hcr:.2e} (tol 1e-12)")


def test_criterion_4_cylinder_expansion(cylinder):
    p = cylinder.point(0.7, 0.1)
    expansion_coeffs(cylinder, p)  # jit warmup
    el_residual_e2(cylinder, p)
    t0 = time.perf_counter()
    coeffs = expansion_coeffs(cylinder, p)
    resid = el_residual_e2(cylinder, p)
    elapsed = time.perf_counter() - t0
    exact = (-1.0 / 6.0, -1.0 / 9.0, -11.0 / 108.0, 4.0 / 135.0)
    err = max(abs(a - b) for a, b in zip(coeffs, exact))
    err_r = abs(resid - 4.0 / 27.0)
    report(4, err < 1e-12 and err_r < 1e-12 and elapsed < 0.1,
           f"cylinder (v, w, z, l) max err {err:.2e}, residual err "
           f"{err_r:.2e} (tol 1e-12), {elapsed * 1e3:.2f} ms (< 100 ms)")


def test_criterion_5_log_coefficient_identity():
    spec = QuadratureSpec(n1=64, n2=64)
    tori = [TorusS3(math.sqrt(q)) for q in (0.3, 0.5, 0.7, 0.8)]
    for fam in tori:  # jit warmup per family
        renorm_coefficients(fam, spec)
        integrate(fam, "da2", spec, quiet=True)
    t0 = time.perf_counter()
    worst = 0.0
    for fam in tori:
        L = renorm_coefficients(fam, spec).L
        e2 = integrate(fam, "da2", spec, quiet=True).value
        worst = max(worst, abs(L - 2.0 * e2) / abs(L))
    elapsed = time.perf_counter() - t0
    report(5, worst < 1e-7 and elapsed < 5.0,
           f"|L - 2 E2|/|L| max {worst:.2e} over 4 tori (tol 1e-7), "
           f"{elapsed:.2f}s (< 5 s)")


def test_criterion_6_log_term_is_fifth_of_residual(
        clifford, torus08, cylinder, cone):
    families = [clifford, torus08, cylinder, cone, FoliatedGraph(-1, 0.3)]
    worst = 0.0
    for fam in families:
        pts = jnp.asarray(surface_points(fam, 100, seed=11))
        l_vals = np.asarray(fam.engine.batch_fn("l")(pts))
        e2_vals = np.asarray(fam.engine.batch_fn("e2_resid")(pts))
        worst = max(worst, float(np.max(np.abs(l_vals - e2_vals / 5.0))))
    report(6, worst < 1e-9,
           f"max |l - residual/5| = {worst:.2e} at 100 points x "
           f"{len(families)} families (tol 1e-9)")


def test_criterion_7_direct_volume_fit(torus08):
    spec = QuadratureSpec(n1=32, n2=32)
    t0 = time.perf_counter()
    fit = direct_volume_fit(torus08, default_eps_list(), spec)
    elapsed = time.perf_counter() - t0
    coeffs = renorm_coefficients(torus08, spec)
    rel = max(abs(fit.c0_fit - coeffs.c0) / abs(coeffs.c0),
              abs(fit.c1_fit - coeffs.c1) / max(abs(coeffs.c1), 1e-12),
              abs(fit.c2_fit - coeffs.c2) / abs(coeffs.c2),
              abs(fit.L_fit - coeffs.L) / abs(coeffs.L))
    report(7, rel < 1e-3 and elapsed < 60.0,
           f"volume fit (c0, c1, c2, L) max rel err {rel:.2e} (tol 1e-3), "
           f"{elapsed:.1f}s (< 60 s)")


def test_criterion_8_first_variation_bump(torus08):
    f = bump((0.5, 1.5), 2.5, periods=(TWO_PI, TWO_PI))
    check = first_variation_check(torus08, f, lambda uv: 0.0 * uv[0],
                                  [4e-3, 2e-3, 1e-3], target="E2",
                                  spec=QuadratureSpec(n1=64, n2=64))
    scale = max(1.0, abs(check.formula_derivative))
    rel = check.mismatches[0] / scale  # smallest step, 1e-3
    ratio = check.mismatches[2] / max(check.mismatches[0], 1e-300)
    second_order = ratio > 8.0  # 16 expected for a 4x step increase
    report(8, rel < 1e-3 and second_order,
           f"dE2 bump check: rel mismatch {rel:.2e} at step 1e-3 (tol 1e-3), "
           f"mismatch(4e-3)/mismatch(1e-3) = {ratio:.1f} (O(step^2))")


def test_criterion_9_internal_identities(clifford, torus08, cylinder, cone):
    # (a) tangential constraint residual at sampled points
    worst_ode = 0.0
    for fam in (clifford, torus08, cylinder, cone):
        ax1, ax2 = fam.quad_axes(0.05)
        for u in np.linspace(ax1.lo + 0.1, ax1.hi - 0.1, 5):
            for v in np.linspace(ax2.lo + 0.1 * (ax2.hi - ax2.lo),
                                 ax2.hi - 0.1 * (ax2.hi - ax2.lo), 5):
                jet = jet_at(fam, fam.point(float(u), float(v)))
                worst_ode = max(worst_ode, abs(jet.ode_residual()))
    # (b) the two groupings of the first-energy residual agree
    worst_dual = 0.0
    for fam in (clifford, torus08, cone):
        for amb in surface_points(fam, 20, seed=7):
            main = fam.engine.value("e1_resid_main", amb)
            alt = fam.engine.value("e1_resid_alt", amb)
            worst_dual = max(worst_dual,
                             abs(main - alt) / max(1.0, abs(main)))
    # (c) conformal invariance of the first energy density
    worst_conf = 0.0
    for fam in (cylinder, FoliatedGraph(-1, 0.3), torus08):
        worst_conf = max(worst_conf,
                         da1_invariance_check(fam, surface_points(fam, 4)))
    # (d) integration by parts
    spec = QuadratureSpec(n1=32, n2=32)
    f1 = lambda uv: jnp.sin(uv[0]) + 0.3 * jnp.cos(uv[1])
    f2 = lambda uv: jnp.cos(uv[0] + uv[1]) + 0.5
    worst_ibp = 0.0
    for lhs, rhs in ibp_check(torus08, f1, f2, spec):
        worst_ibp = max(worst_ibp, abs(lhs - rhs) / max(1.0, abs(lhs)))
    # (e) exact-form integral on closed tori
    worst_exact = max(abs(exact_form_check(fam, spec).value)
                      for fam in (clifford, torus08))
    ok = (worst_ode < 1e-6 and worst_dual < 1e-6 and worst_conf < 1e-5
          and worst_ibp < 1e-6 and worst_exact < 1e-8)
    report(9, ok,
           f"identities: ode {worst_ode:.1e} (1e-6), dual residual "
           f"{worst_dual:.1e} (1e-6), conformal {worst_conf:.1e} (1e-5), "
           f"ibp {worst_ibp:.1e} (1e-6), exact form {worst_exact:.1e} (1e-8)")


def test_criterion_10_residual_closed_forms(clifford):
    err_c = abs(el_residual_e2(clifford, clifford.point(0.3, 1.1)) - 4.0 / 3.0)
    plane = VerticalPlane(1.0, 0.0, 0.0)
    graphs = [plane, FoliatedGraph(1, 0.4), FoliatedGraph(-1, -0.2)]
    worst0 = max(abs(el_residual_e2(g, g.point(*g.reference_params)))
                 for g in graphs)
    report(10, err_c < 1e-9 and worst0 < 1e-12,
           f"E2 residual: Clifford err {err_c:.2e} (tol 1e-9), "
           f"zero-surface max {worst0:.2e} (tol 1e-12)")
