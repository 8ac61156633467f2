import math

import jax.numpy as jnp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crlab import (GraphHeis, QuadratureSpec, RotationalHeis, bump,
                   first_variation_check, scan_family)
from crlab.errors import HcrZeroError, SupportError
from crlab.varcheck import zero_fn

TWO_PI = 2.0 * math.pi


def test_bump_shape():
    f = bump((0.0, 0.0), 1.0)
    assert float(f(jnp.array([0.0, 0.0]))) == pytest.approx(1.0)
    assert float(f(jnp.array([1.0, 0.0]))) == 0.0
    assert float(f(jnp.array([0.9, 0.9]))) == 0.0
    assert 0.0 < float(f(jnp.array([0.5, 0.0]))) < 1.0


def test_bump_periodic_wrap():
    f = bump((0.1, 0.0), 1.0, periods=(TWO_PI, None))
    # the wrapped distance from 0.1 to 0.1 - 2 pi is zero
    assert float(f(jnp.array([0.1 - TWO_PI, 0.0]))) == pytest.approx(1.0)


@settings(deadline=None, max_examples=30)
@given(st.floats(-3.0, 3.0), st.floats(-3.0, 3.0),
       st.floats(0.2, 2.0), st.floats(0.0, 10.0), st.floats(0.0, TWO_PI))
def test_bump_supported_in_ball(cx, cy, radius, rr, angle):
    f = bump((cx, cy), radius)
    uv = jnp.array([cx + rr * math.cos(angle), cy + rr * math.sin(angle)])
    val = float(f(uv))
    if rr >= radius:
        assert val == 0.0
    else:
        assert 0.0 <= val <= 1.0
    assert np.isfinite(val)


def test_scan_validation(cone):
    gen = lambda c: RotationalHeis("dilation_cone", c=c)
    with pytest.raises(ValueError):
        scan_family(gen, [1.0, 0.5, 2.0], "Hcr")
    with pytest.raises(ValueError):
        scan_family(gen, [0.5, 1.0], "Hcr")
    with pytest.raises(ValueError):
        scan_family(gen, [0.5, 1.0, 1.5], "NoSuchTarget")


def test_scan_finds_hcr_zero_on_cone_family():
    # Hcr on the dilation cone changes sign at c = sqrt(3)/2
    gen = lambda c: RotationalHeis("dilation_cone", c=c)
    scan = scan_family(gen, np.linspace(0.5, 1.2, 8), "Hcr",
                       QuadratureSpec(n1=16, n2=16))
    assert len(scan.critical_params) == 1
    assert scan.critical_params[0] == pytest.approx(math.sqrt(3.0) / 2.0,
                                                    abs=1e-12)
    assert not scan.errors


def test_scan_records_failures():
    def gen(c):
        if c > 1.0:
            raise RuntimeError("boom")
        return RotationalHeis("dilation_cone", c=c)

    scan = scan_family(gen, [0.8, 0.9, 1.0, 1.1], "Hcr",
                       QuadratureSpec(n1=16, n2=16))
    assert math.isnan(scan.values[-1])
    assert scan.errors and scan.errors[0][0] == 1.1


def test_variation_support_enforced():
    flat = GraphHeis("flat", level=0.0)

    def one(uv):
        return 1.0 + 0.0 * uv[0]

    with pytest.raises(SupportError):
        first_variation_check(flat, one, zero_fn, [1e-3])


def test_variation_e1_needs_nonzero_hcr():
    # the critical dilation cone has Hcr = 0 identically
    crit = GraphHeis("dilation_cone", c=math.sqrt(3.0) / 2.0)
    f = bump((0.5, 0.5), 0.6)
    with pytest.raises(HcrZeroError):
        first_variation_check(crit, f, zero_fn, [1e-3], target="E1")


def test_variation_input_validation(torus08):
    f = bump((math.pi, math.pi), 1.0, periods=(TWO_PI, TWO_PI))
    with pytest.raises(ValueError):
        first_variation_check(torus08, f, zero_fn, [], target="E2")
    with pytest.raises(ValueError):
        first_variation_check(torus08, f, zero_fn, [1e-3], target="E3")


def test_first_variation_torus_second_energy(torus08):
    # periodic test functions: the finite-difference derivative of E2
    # along X = f e2 + g T matches the residual pairing
    def f(uv):
        return 0.5 + jnp.sin(uv[0]) + 0.3 * jnp.cos(uv[1]) * jnp.sin(uv[0] + uv[1])

    def g(uv):
        return 0.2 * jnp.cos(uv[0] - uv[1])

    check = first_variation_check(torus08, f, g, [4e-3, 1e-3],
                                  spec=QuadratureSpec(n1=48, n2=48))
    # steps are reported in increasing order
    assert check.steps == (1e-3, 4e-3)
    scale = max(1.0, abs(check.formula_derivative))
    assert check.mismatches[0] / scale < 1e-3
    # central differences converge at second order: quartering the step
    # shrinks the mismatch by roughly 16
    assert check.mismatches[0] < check.mismatches[1] / 8.0
