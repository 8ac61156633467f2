import math

import numpy as np
import pytest

from crlab import QuadratureSpec, ibp_check, integrate
from crlab.errors import SupportError


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(n1=4)
    with pytest.raises(ValueError):
        QuadratureSpec(cutoff_radius=-0.1)
    with pytest.raises(ValueError):
        QuadratureSpec(extrapolation_levels=5)


def test_clifford_area(clifford):
    # area of the rho1^2 = 1/2 torus against theta ^ e1 is 2 pi^2
    rep = integrate(clifford, "one", QuadratureSpec(n1=32, n2=32), quiet=True)
    assert rep.converged
    assert rep.value == pytest.approx(2.0 * math.pi ** 2, rel=1e-12)


def test_clifford_first_energy(clifford):
    rep = integrate(clifford, "da1", QuadratureSpec(n1=64, n2=64), quiet=True)
    assert rep.value == pytest.approx(math.pi ** 2 / math.sqrt(2.0), rel=1e-10)


def test_torus_second_energy_closed_form(torus08):
    rep = integrate(torus08, "da2", QuadratureSpec(n1=64, n2=64), quiet=True)
    assert rep.value == pytest.approx(1.2 * math.pi ** 2, rel=1e-10)


def test_callable_density(cylinder):
    # integrate 1 via a callable: per-period lateral area 2 pi R T
    rep = integrate(cylinder, lambda uvs: np.ones(len(uvs)),
                    QuadratureSpec(n1=16, n2=16), quiet=True)
    assert rep.value == pytest.approx(2.0 * math.pi, rel=1e-12)


def test_bad_density_type(cylinder):
    with pytest.raises(TypeError):
        integrate(cylinder, 3.14, QuadratureSpec(), quiet=True)


def test_thread_count_bit_stability(clifford, monkeypatch):
    spec = QuadratureSpec(n1=32, n2=32)
    monkeypatch.setenv("CRLAB_THREADS", "1")
    v1 = integrate(clifford, "da1", spec, quiet=True).value
    monkeypatch.setenv("CRLAB_THREADS", "7")
    v7 = integrate(clifford, "da1", spec, quiet=True).value
    assert v1 == v7  # bitwise


def test_cutoff_excision_converges(cone):
    # the cone touches its singular pole at r = 0: excise and
    # extrapolate; the area density is sqrt(5) r^2 on the chart
    # (theta, r), so the area over r < 2 is (2 pi) sqrt(5) 8/3
    spec = QuadratureSpec(n1=32, n2=32, cutoff_radius=0.05)
    rep = integrate(cone, "one", spec, quiet=True)
    assert rep.converged
    expected = 2.0 * math.pi * math.sqrt(5.0) * 8.0 / 3.0
    assert rep.value == pytest.approx(expected, rel=1e-7)


def test_log_divergent_cutoff_reported(cone):
    # the first energy of the cone diverges logarithmically at the pole
    spec = QuadratureSpec(n1=32, n2=32, cutoff_radius=0.05,
                          extrapolation_levels=1)
    rep = integrate(cone, "da1", spec, quiet=True)
    assert not rep.converged


def test_divergent_cutoff_reported(shifted_sphere):
    # the second energy of the shifted sphere diverges at the pole;
    # the excision sequence must be reported as not converged
    spec = QuadratureSpec(n1=16, n2=16, cutoff_radius=0.05,
                          extrapolation_levels=1)
    rep = integrate(shifted_sphere, "da2", spec, quiet=True)
    assert not rep.converged


def test_ibp_identities(torus08):
    import jax.numpy as jnp

    def f1(uv):
        return jnp.sin(uv[0]) + 0.3 * jnp.cos(uv[1])

    def f2(uv):
        return jnp.cos(uv[0] + uv[1]) + 0.5

    spec = QuadratureSpec(n1=32, n2=32)
    (l_e1, r_e1), (l_v, r_v) = ibp_check(torus08, f1, f2, spec)
    assert l_e1 == pytest.approx(r_e1, abs=1e-9 * max(1.0, abs(l_e1)))
    assert l_v == pytest.approx(r_v, abs=1e-9 * max(1.0, abs(l_v)))


def test_ibp_support_enforced(cylinder):
    import jax.numpy as jnp
    # fine on the doubly periodic cylinder, rejected on an open chart
    from crlab import GraphHeis

    def one(uv):
        return 1.0 + 0.0 * uv[0]

    spec = QuadratureSpec(n1=16, n2=16)
    ibp_check(cylinder, one, one, spec)  # no edge to touch
    flat = GraphHeis("flat", level=0.0)
    with pytest.raises(SupportError):
        ibp_check(flat, one, one, spec)
