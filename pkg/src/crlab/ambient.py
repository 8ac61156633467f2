"""Model pseudohermitian 3-manifolds: the Heisenberg group H1 and the
standard CR sphere S3.

Both models are torsion free with constant Webster curvature (W = 0 on
H1, W = 2 on S3).  H1 carries coordinates (x, y, t) with contact form
theta = dt + x dy - y dx and left-invariant horizontal frame

    e1* = d/dx + y d/dt,      e2* = d/dy - x d/dt,      T = d/dt.

S3 is described in torus coordinates (phi1, phi2, rho1) with
rho2 = sqrt(1 - rho1^2), contact form
Theta = rho1^2 dphi1 + rho2^2 dphi2, Reeb field T = d/dphi1 + d/dphi2,
and the global horizontal orthonormal frame

    e1* = -(rho2/rho1) d/dphi1 + (rho1/rho2) d/dphi2,
    e2* = rho2 d/drho1,           e2* = J e1*,

whose Tanaka-Webster connection form is omega = w1 e^1 with
w1 = (rho1^2 - rho2^2)/(rho1 rho2).  All vectors and covectors are
expressed in coordinate components.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ChartDomainError, StepSizeError


class ModelKind(Enum):
    Heisenberg = "heisenberg"
    Sphere3 = "sphere3"


@dataclass(frozen=True)
class AmbientModel:
    """A supported ambient pseudohermitian structure."""

    kind: ModelKind
    webster_W: float
    torsion_a1: float = 0.0
    torsion_a2: float = 0.0

    def __post_init__(self) -> None:
        expected = {ModelKind.Heisenberg: 0.0, ModelKind.Sphere3: 2.0}
        if self.webster_W != expected[self.kind]:
            raise ValueError(f"webster_W must be {expected[self.kind]} for {self.kind}")
        if self.torsion_a1 != 0.0 or self.torsion_a2 != 0.0:
            raise ValueError("supported models are torsion free")

    @property
    def webster_R(self) -> float:
        """Webster scalar curvature R = 2W."""
        return 2.0 * self.webster_W


HEISENBERG = AmbientModel(ModelKind.Heisenberg, 0.0)
SPHERE3 = AmbientModel(ModelKind.Sphere3, 2.0)


@dataclass(frozen=True)
class AmbientPoint:
    """Point of a model chart: (x, y, t) on H1, (phi1, phi2, rho1) on S3."""

    coords: tuple[float, float, float]

    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


@dataclass(frozen=True)
class HorizontalFrame:
    """Orthonormal horizontal pair with e2 = J e1, plus the Reeb field."""

    e1: np.ndarray
    e2: np.ndarray
    reeb_T: np.ndarray


def check_chart(model: AmbientModel, coords) -> np.ndarray:
    p = np.asarray(coords, dtype=float)
    if p.shape != (3,):
        raise ChartDomainError("ambient point needs exactly 3 coordinates")
    if model.kind is ModelKind.Sphere3 and not (0.0 < p[2] < 1.0):
        raise ChartDomainError(f"rho1 = {p[2]} outside (0, 1)")
    return p


# ---------------------------------------------------------------------------
# Frame, contact form and connection data in coordinate components.
# ---------------------------------------------------------------------------

def frame_vectors(model: AmbientModel, p) -> tuple[np.ndarray, np.ndarray]:
    """Reference horizontal orthonormal frame (e1*, e2*) at p."""
    x, y, t = p
    if model.kind is ModelKind.Heisenberg:
        return np.array([1.0, 0.0, y]), np.array([0.0, 1.0, -x])
    rho1 = t
    rho2 = np.sqrt(1.0 - rho1 * rho1)
    return (np.array([-rho2 / rho1, rho1 / rho2, 0.0]),
            np.array([0.0, 0.0, rho2]))


def reeb_vector(model: AmbientModel, p) -> np.ndarray:
    if model.kind is ModelKind.Heisenberg:
        return np.array([0.0, 0.0, 1.0])
    return np.array([1.0, 1.0, 0.0])


def theta_covector(model: AmbientModel, p) -> np.ndarray:
    x, y, t = p
    if model.kind is ModelKind.Heisenberg:
        return np.array([-y, x, 1.0])
    rho1 = t
    return np.array([rho1 * rho1, 1.0 - rho1 * rho1, 0.0])


def omega_ref_covector(model: AmbientModel, p) -> np.ndarray:
    """Connection form of the reference frame, coordinate components.

    Zero on H1 (the left-invariant frame is parallel); on S3 it is
    w1 e^1 with w1 = (rho1^2 - rho2^2)/(rho1 rho2) and
    e^1 = -rho1 rho2 (dphi1 - dphi2).
    """
    if model.kind is ModelKind.Heisenberg:
        return np.zeros(3)
    rho1 = p[2]
    d = 2.0 * rho1 * rho1 - 1.0  # rho1^2 - rho2^2
    return np.array([-d, d, 0.0])


def horizontal_coefficients(model: AmbientModel, p, vec) -> tuple[float, float]:
    """Coefficients (c1, c2) of the horizontal part of vec in the
    reference frame.  The Reeb component is projected out implicitly."""
    if model.kind is ModelKind.Heisenberg:
        return float(vec[0]), float(vec[1])
    rho1 = p[2]
    rho2 = np.sqrt(1.0 - rho1 * rho1)
    return float(rho1 * rho2 * (vec[1] - vec[0])), float(vec[2] / rho2)


def levi_inner(model: AmbientModel, p, u, v) -> float:
    """Levi metric (1/2) dtheta(., J.) on horizontal parts."""
    u1, u2 = horizontal_coefficients(model, p, u)
    v1, v2 = horizontal_coefficients(model, p, v)
    return u1 * v1 + u2 * v2


def j_rotate(model: AmbientModel, p, vec) -> np.ndarray:
    """Apply the CR rotation J to the horizontal part of vec."""
    c1, c2 = horizontal_coefficients(model, p, vec)
    f1, f2 = frame_vectors(model, p)
    return c1 * f2 - c2 * f1


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def contact_data(model: AmbientModel, p: AmbientPoint):
    """Return (theta, (e1*, e2*), T) at p.

    The frame pair is horizontal, Levi-orthonormal, spans ker(theta)
    and satisfies dtheta = 2 e^1 ^ e^2.
    """
    c = check_chart(model, p.coords if isinstance(p, AmbientPoint) else p)
    f1, f2 = frame_vectors(model, c)
    return theta_covector(model, c), (f1, f2), reeb_vector(model, c)


def connection_form_coeffs(model: AmbientModel, p, frame_field=None,
                           h: float = 1e-5):
    """Evaluate the connection form omega of a horizontal frame field on
    (e1, e2, T), returning (omega(e1), omega(e2), omega(T)).

    frame_field maps coordinates -> (e1, e2) with e2 = J e1; by default
    the model's reference frame is used.  Derivatives of the frame
    coefficient functions are taken by central finite differences with
    one Richardson refinement, so the evaluation is independent of any
    closed-form connection data for non-reference frames.
    """
    c = check_chart(model, p.coords if isinstance(p, AmbientPoint) else p)

    if frame_field is None:
        def frame_field(q):
            return frame_vectors(model, q)

    def coeffs(q):
        e1q, _ = frame_field(q)
        return np.array(horizontal_coefficients(model, q, e1q))

    def omega_on(direction):
        # omega(X) = a1 X(a2) - a2 X(a1) + omega_ref(X) for e1 = a1 e1* + a2 e2*.
        def fd(step):
            return (coeffs(c + step * direction) - coeffs(c - step * direction)) / (2.0 * step)
        d = (4.0 * fd(h / 2.0) - fd(h)) / 3.0
        a1, a2 = coeffs(c)
        return a1 * d[1] - a2 * d[0] + float(omega_ref_covector(model, c) @ direction)

    e1, e2 = frame_field(c)
    t_vec = reeb_vector(model, c)
    return omega_on(e1), omega_on(e2), omega_on(t_vec)


def contact_geodesic(model: AmbientModel, p, v0, rho: float,
                     step: float = 1e-4):
    """Flow the contact geodesic gamma with gamma(0) = p, gamma'(0) = v0
    (horizontal, unit) for parameter length rho; returns the endpoint.

    Classical 4th-order Runge-Kutta with fixed step.  Writing
    gamma' = c1 e1* + c2 e2*, parallelism gives
    c1' = c2 omega_ref(gamma'), c2' = -c1 omega_ref(gamma').  On H1 the
    coefficients are constant and the integration is exact for any
    step; on S3 the fixed step is capped at 1e-3 * rho.
    """
    if step <= 0.0:
        raise StepSizeError(f"step must be positive, got {step}")
    if rho < 0.0:
        raise ValueError("rho must be nonnegative")
    c = check_chart(model, p.coords if isinstance(p, AmbientPoint) else p)
    v = np.asarray(v0, dtype=float)
    c1, c2 = horizontal_coefficients(model, c, v)
    state = np.array([c[0], c[1], c[2], c1, c2])
    if rho == 0.0:
        return state[:3]

    def rhs(s):
        q = s[:3]
        f1, f2 = frame_vectors(model, q)
        vel = s[3] * f1 + s[4] * f2
        om = float(omega_ref_covector(model, q) @ vel)
        return np.array([vel[0], vel[1], vel[2], s[4] * om, -s[3] * om])

    h_cap = step if model.kind is ModelKind.Heisenberg else min(step, 1e-3 * rho)
    n = max(1, int(np.ceil(rho / h_cap)))
    h_eff = rho / n
    for _ in range(n):
        k1 = rhs(state)
        k2 = rhs(state + 0.5 * h_eff * k1)
        k3 = rhs(state + 0.5 * h_eff * k2)
        k4 = rhs(state + h_eff * k3)
        state = state + (h_eff / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    check_chart(model, state[:3])
    return state[:3]


def geodesic_speed(model: AmbientModel, p, v0, rho: float, step: float = 1e-4):
    """Levi speed |gamma'(rho)| of the contact geodesic (should be the
    initial speed exactly, up to integrator error)."""
    if step <= 0.0:
        raise StepSizeError(f"step must be positive, got {step}")
    c = check_chart(model, p.coords if isinstance(p, AmbientPoint) else p)
    v = np.asarray(v0, dtype=float)
    c1, c2 = horizontal_coefficients(model, c, v)
    state = np.array([c[0], c[1], c[2], c1, c2])

    def rhs(s):
        q = s[:3]
        f1, f2 = frame_vectors(model, q)
        vel = s[3] * f1 + s[4] * f2
        om = float(omega_ref_covector(model, q) @ vel)
        return np.array([vel[0], vel[1], vel[2], s[4] * om, -s[3] * om])

    h_cap = step if model.kind is ModelKind.Heisenberg else min(step, 1e-3 * max(rho, step))
    n = max(1, int(np.ceil(rho / h_cap))) if rho > 0 else 0
    h_eff = rho / n if n else 0.0
    for _ in range(n):
        k1 = rhs(state)
        k2 = rhs(state + 0.5 * h_eff * k1)
        k3 = rhs(state + 0.5 * h_eff * k2)
        k4 = rhs(state + h_eff * k3)
        state = state + (h_eff / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return float(np.hypot(state[3], state[4]))
