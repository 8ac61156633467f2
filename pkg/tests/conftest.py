import math

import pytest

import crlab


@pytest.fixture(scope="session")
def clifford():
    return crlab.TorusS3(math.sqrt(0.5))


@pytest.fixture(scope="session")
def torus08():
    return crlab.TorusS3(math.sqrt(0.8))


@pytest.fixture(scope="session")
def cylinder():
    return crlab.CylinderHeis()


@pytest.fixture(scope="session")
def cone():
    return crlab.RotationalHeis("dilation_cone", c=1.0)


@pytest.fixture(scope="session")
def shifted_sphere():
    return crlab.RotationalHeis("shifted_sphere", rho0=1.0,
                                lam=math.sqrt(3.0) / 2.0)
