import math

import numpy as np
import pytest

from crlab import (CylinderHeis, FoliatedGraph, GraphHeis, RotationalHeis,
                   TorusS3, VerticalPlane, adapted_frame, area_form,
                   family_from_json, singular_set)
from crlab.ambient import theta_covector
from crlab.errors import SingularPointError
from crlab.surfaces import TorusGraphS3, riemannian_area_density


def test_point_matches_chart(cone):
    p = cone.point(0.3, 1.0)
    assert p.params == (0.3, 1.0)
    np.testing.assert_allclose(
        p.ambient, np.asarray(cone.chart(np.array([0.3, 1.0]))), atol=1e-15)


def test_constructor_validation():
    with pytest.raises(ValueError):
        TorusS3(1.2)
    with pytest.raises(ValueError):
        CylinderHeis(radius=-1.0)
    with pytest.raises(ValueError):
        RotationalHeis("no_such_profile", c=1.0)
    with pytest.raises(ValueError):
        RotationalHeis("dilation_cone")  # missing parameter c
    with pytest.raises(ValueError):
        VerticalPlane(0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        FoliatedGraph(2, 0.0)


def test_adapted_frame_relations(cone):
    p = cone.point(0.7, 1.2)
    fr = adapted_frame(cone, p)
    theta = theta_covector(cone.model, p.ambient)
    # e1, e2 horizontal; V = T + alpha e2 tangent to the level set
    assert abs(theta @ fr.e1) < 1e-12
    assert abs(theta @ fr.e2) < 1e-12
    import jax
    grad = np.asarray(jax.grad(cone.u_def)(np.asarray(p.ambient)))
    assert abs(grad @ (fr.T + fr.alpha * fr.e2)) < 1e-12
    assert abs(grad @ fr.e1) < 1e-12
    assert fr.area_density > 0.0
    assert fr.area_density == pytest.approx(area_form(cone, p))


def test_rotational_closed_forms():
    # on the cone t = c r^2: alpha = 1/(r sqrt(1+4c^2)),
    # H = -2c/(r sqrt(1+4c^2))
    c, r = 0.8, 1.3
    fam = RotationalHeis("dilation_cone", c=c)
    fr = adapted_frame(fam, fam.point(0.2, r))
    q = r * math.sqrt(1.0 + 4.0 * c * c)
    assert fr.alpha == pytest.approx(1.0 / q, abs=1e-12)
    assert fr.H == pytest.approx(-2.0 * c / q, abs=1e-12)


def test_singular_sets():
    assert singular_set(TorusS3(0.5)).empty
    assert singular_set(CylinderHeis()).empty
    assert not singular_set(RotationalHeis("dilation_cone", c=1.0)).empty
    assert not singular_set(FoliatedGraph(-1, 0.3)).empty
    # spheres touch the poles r = 0
    fam = RotationalHeis("shifted_sphere", rho0=1.0, lam=0.5)
    assert not singular_set(fam).empty
    assert singular_set(GraphHeis("flat")).empty


def test_singular_point_rejected():
    fam = FoliatedGraph(-1, 0.3)
    with pytest.raises(SingularPointError):
        adapted_frame(fam, fam.point(0.4, 0.0))  # on the singular line y = 0


def test_area_density_matches_riemannian_on_torus(torus08):
    # on rho1 = const tori theta ^ e1 and the adapted metric agree
    uv = (0.3, 1.1)
    dens = adapted_frame(torus08, torus08.point(*uv)).area_density
    assert dens == pytest.approx(riemannian_area_density(torus08, uv),
                                 rel=1e-12)


def test_torus_graph_reduces_to_torus(torus08):
    rho1 = torus08.rho1
    fam = TorusGraphS3(lambda u, v: rho1 + 0.0 * u)
    p1 = torus08.point(0.3, 1.1)
    p2 = fam.point(0.3, 1.1)
    fr1, fr2 = adapted_frame(torus08, p1), adapted_frame(fam, p2)
    assert fr1.alpha == pytest.approx(fr2.alpha, abs=1e-12)
    assert fr1.H == pytest.approx(fr2.H, abs=1e-12)


# -- JSON construction -------------------------------------------------------

FAMILIES = [
    RotationalHeis("dilation_cone", c=1.0),
    RotationalHeis("shifted_sphere", rho0=1.0, lam=0.5),
    GraphHeis("flat"),
    VerticalPlane(1.0, 2.0, 0.5),
    FoliatedGraph(-1, 0.3),
    CylinderHeis(),
    TorusS3(math.sqrt(0.8)),
]


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: type(f).__name__)
def test_json_roundtrip(fam):
    doc = fam.json_spec()
    assert doc["schema"] == 1
    rebuilt = family_from_json(doc)
    assert type(rebuilt) is type(fam)
    p0 = fam.reference_params
    np.testing.assert_allclose(fam.point(*p0).ambient,
                               rebuilt.point(*p0).ambient, atol=1e-15)


@pytest.mark.parametrize("doc", [
    "not a dict",
    {},  # missing schema
    {"schema": 2, "variant": "cylinder"},
    {"schema": 1},  # missing variant
    {"schema": 1, "variant": "no_such_variant"},
    {"schema": 1, "variant": "cylinder", "bogus": 1.0},
    {"schema": 1, "variant": "torus_s3"},  # neither rho1 nor rho1_sq
    {"schema": 1, "variant": "torus_s3", "rho1": 0.7, "rho1_sq": 0.5},
    {"schema": 1, "variant": "rotational", "profile": "dilation_cone"},
    {"schema": 1, "variant": "graph", "profile": "no_such_profile"},
])
def test_json_rejection(doc):
    with pytest.raises(ValueError):
        family_from_json(doc)


def test_json_torus_rho1_sq():
    fam = family_from_json({"schema": 1, "variant": "torus_s3",
                            "rho1_sq": 0.8})
    assert fam.rho1 == pytest.approx(math.sqrt(0.8))
