import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crlab import (FoliatedGraph, GraphHeis, VerticalPlane, da1_density,
                   da2_density, el_residual_e1, el_residual_e2, frak_f,
                   h_coefficients, h_derivatives, hcr, jet_at)
from crlab.errors import HcrZeroError, SingularPointError
from crlab.invariants import el_residuals

SQRT5 = math.sqrt(5.0)


def test_cone_jet_closed_forms(cone):
    jet = jet_at(cone, cone.point(0.0, 1.0))
    assert jet.alpha == pytest.approx(1.0 / SQRT5, abs=1e-12)
    assert jet.H == pytest.approx(-2.0 / SQRT5, abs=1e-12)
    assert jet.hcr == pytest.approx(1.0 / 30.0, abs=1e-13)
    assert jet.Im_A11 == 0.0
    # jet field agrees with its reassembled combination
    assert hcr(jet) == pytest.approx(jet.hcr, abs=1e-13)
    assert da1_density(jet) == pytest.approx(abs(jet.hcr) ** 1.5, abs=1e-15)


def test_cone_second_fundamental_form(cone):
    jet = jet_at(cone, cone.point(0.0, 1.0))
    h11, h10, h00 = h_coefficients(jet)
    assert h11 == pytest.approx(-2.0 / SQRT5, abs=1e-12)
    assert h00 == pytest.approx(-2.0 / 5.0 ** 1.5, abs=1e-12)
    h111, h110, h100 = h_derivatives(jet)
    assert h110 == pytest.approx(4.0 / 5.0 ** 1.5, abs=1e-12)
    # the invariant combination built from these derivatives vanishes on
    # every dilation-invariant cone
    assert frak_f(jet) == pytest.approx(0.0, abs=1e-10)


def test_ode_residual_vanishes(cone, torus08, cylinder, shifted_sphere):
    for fam, uv in ((cone, (0.4, 1.1)), (torus08, (0.3, 1.1)),
                    (cylinder, (0.7, 0.1)), (shifted_sphere, (1.2, 0.3))):
        jet = jet_at(fam, fam.point(*uv))
        scale = 1.0 + abs(jet.e1e1_alpha) + abs(jet.V_H)
        assert abs(jet.ode_residual()) < 1e-10 * scale


def test_da2_density_torus(torus08):
    # on rho1 = const tori alpha = 0, so dA2 reduces to (2/3)h10 H + (2/27)H^3
    jet = jet_at(torus08, torus08.point(0.2, 0.9))
    h11, h10, h00 = h_coefficients(jet)
    assert h00 == pytest.approx(0.0, abs=1e-13)
    expected = (2.0 / 3.0) * h10 * h11 + (2.0 / 27.0) * h11 ** 3
    assert da2_density(jet) == pytest.approx(expected, abs=1e-13)


def test_el_residual_e2_zero_surfaces():
    plane = VerticalPlane(1.0, 0.0, 0.0)
    assert el_residual_e2(plane, plane.point(0.2, 0.1)) == \
        pytest.approx(0.0, abs=1e-12)
    fol = FoliatedGraph(-1, 0.3)
    assert el_residual_e2(fol, fol.point(0.4, -0.3)) == \
        pytest.approx(0.0, abs=1e-12)


def test_el_residual_e2_clifford(clifford):
    val = el_residual_e2(clifford, clifford.point(0.3, 1.1))
    assert val == pytest.approx(4.0 / 3.0, abs=1e-9)


def test_el_residual_e1_needs_nonzero_hcr():
    # Hcr vanishes identically on the critical dilation cone
    from crlab import RotationalHeis
    crit = RotationalHeis("dilation_cone", c=math.sqrt(3.0) / 2.0)
    p = crit.point(0.0, 1.0)
    assert jet_at(crit, p).hcr == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(HcrZeroError):
        el_residual_e1(crit, p)
    with pytest.raises(HcrZeroError):
        frak_f(jet_at(crit, p))
    res = el_residuals(crit, p)
    assert res.epsilon1 is None
    assert res.epsilon2 == pytest.approx(0.0, abs=1e-10)


def test_el_residual_e1_groupings_agree(cone, clifford):
    # the check_tol path compares two algebraically equal groupings
    for fam, uv in ((cone, (0.0, 1.0)), (clifford, (0.3, 1.1))):
        el_residual_e1(fam, fam.point(*uv), check_tol=1e-9)


def test_singular_point_raises():
    fol = FoliatedGraph(-1, 0.3)
    with pytest.raises(SingularPointError):
        jet_at(fol, fol.point(0.4, 0.0))
    with pytest.raises(SingularPointError):
        el_residual_e2(fol, fol.point(0.4, 0.0))


@settings(deadline=None, max_examples=20)
@given(theta=st.floats(0.0, 2.0 * math.pi), r=st.floats(0.4, 1.8))
def test_cone_invariants_scale_under_dilation(cone, theta, r):
    # the cone is dilation invariant, so alpha and H carry weight -1
    # and Hcr weight -2 in r (rotational symmetry kills the theta
    # dependence)
    jet = jet_at(cone, cone.point(theta, r))
    assert r * jet.alpha == pytest.approx(1.0 / SQRT5, abs=1e-11)
    assert r * jet.H == pytest.approx(-2.0 / SQRT5, abs=1e-11)
    assert r * r * jet.hcr == pytest.approx(1.0 / 30.0, abs=1e-11)
