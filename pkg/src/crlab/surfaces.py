"""Surface families in the model ambients.

Every family supplies two closed-form ingredients:

* a chart map  (u, v) -> ambient coordinates, and
* an ambient defining function u_def whose zero level is the surface
  and whose level sets foliate a neighbourhood of it.

The adapted frame follows the convention e2 = grad_b(u_def)/|grad_b(u_def)|,
e1 = -J e2 (so each family fixes its orientation by declaring u_def),
alpha = -T(u_def)/|grad_b(u_def)|, H = omega(e1).  Rotational surfaces
t^2 = f(r^2) use u_def = f(x^2 + y^2) - t^2, which reproduces the
closed forms

    alpha = t / (r D),  D = sqrt(f'^2 + f),
    e1 = [(y f' + t x) e1* - (x f' - t y) e2*] / (r D),

with the chart (theta_angle, r) on the branch t = branch * sqrt(f).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import jax
import jax.numpy as jnp
import numpy as np

from .ambient import HEISENBERG, SPHERE3, AmbientModel, ModelKind
from .engine import FieldEngine, model_funcs
from .errors import DegenerateChartError, SingularPointError

TOL_SING = 1e-8


@dataclass(frozen=True)
class SurfacePoint:
    params: tuple[float, float]
    ambient: np.ndarray


@dataclass(frozen=True)
class AdaptedFrameData:
    e1: np.ndarray
    e2: np.ndarray
    T: np.ndarray
    alpha: float
    H: float
    area_density: float


@dataclass(frozen=True)
class SingularSetInfo:
    empty: bool
    description: str
    # singular loci in chart parameters: list of ("point"|"curve", data)
    items: tuple = ()


@dataclass(frozen=True)
class ChartAxis:
    lo: float
    hi: float
    periodic: bool


# ---------------------------------------------------------------------------
# Named profile catalog: f(s), s = r^2, for rotational surfaces, and
# graph heights u(x, y).
# ---------------------------------------------------------------------------

def profile_shifted_sphere(rho0: float, lam: float):
    """f(s) = (rho0^4 - (s + lam)^2)/4, the shifted Heisenberg sphere."""
    def f(s):
        return 0.25 * (rho0 ** 4 - (s + lam) ** 2)
    return f


def profile_dilation_cone(c: float):
    """f(s) = c^2 s^2, the dilation-invariant cone t = c r^2."""
    def f(s):
        return c * c * s * s
    return f


PROFILE_CATALOG = {
    "shifted_sphere": (profile_shifted_sphere, ("rho0", "lam")),
    "heis_sphere": (lambda rho0: profile_shifted_sphere(rho0, 0.0), ("rho0",)),
    "dilation_cone": (profile_dilation_cone, ("c",)),
}


class SurfaceFamily:
    """Base class; subclasses provide chart, u_def and chart metadata."""

    model: AmbientModel

    def __init__(self) -> None:
        self._engine: FieldEngine | None = None
        self._area_fn = None
        self._area_batch = None

    # -- closed-form ingredients -------------------------------------------
    def chart(self, uv):
        raise NotImplementedError

    def u_def(self, p):
        raise NotImplementedError

    def chart_axes(self) -> tuple[ChartAxis, ChartAxis]:
        raise NotImplementedError

    def singular_set(self) -> SingularSetInfo:
        return SingularSetInfo(True, "no singular points")

    def quad_axes(self, cutoff: float = 0.0) -> tuple[ChartAxis, ChartAxis]:
        """Chart axes with a parameter-radius excision of the singular set."""
        return self.chart_axes()

    # reference chart point for scans/pointwise residuals
    reference_params: tuple[float, float] = (0.0, 0.0)
    # default collar depth for the geodesic rho-foliation
    collar_rho_max: float = 0.05

    # -- derived machinery ---------------------------------------------------
    @property
    def engine(self) -> FieldEngine:
        if self._engine is None:
            self._engine = FieldEngine(self.model.kind, self.model.webster_W,
                                       self.u_def)
        return self._engine

    def area_density_fn(self):
        """theta ^ e1 density against the chart coordinate measure."""
        if self._area_fn is None:
            m = model_funcs(self.model.kind)
            theta = m["theta"]
            horiz = m["horiz"]
            e1c = self.engine.fields["_e1_coeffs"]
            chart = self.chart

            def dens(uv):
                p = chart(uv)
                tan = jax.jacfwd(chart)(uv)
                a = e1c(p)

                def e1_form(x):
                    c1, c2 = horiz(p, x)
                    return a[0] * c1 + a[1] * c2

                t1, t2 = tan[:, 0], tan[:, 1]
                th = theta(p)
                return jnp.abs((th @ t1) * e1_form(t2) - (th @ t2) * e1_form(t1))

            self._area_fn = dens
        return self._area_fn

    def area_density_batch(self, uvs: np.ndarray) -> np.ndarray:
        if self._area_batch is None:
            self._area_batch = jax.jit(jax.vmap(self.area_density_fn()))
        return np.asarray(self._area_batch(jnp.asarray(uvs, dtype=jnp.float64)))

    def point(self, u: float, v: float) -> SurfacePoint:
        amb = np.asarray(self.chart(jnp.array([u, v], dtype=jnp.float64)))
        return SurfacePoint((float(u), float(v)), amb)

    def json_spec(self) -> dict:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# Heisenberg families
# ---------------------------------------------------------------------------

class RotationalHeis(SurfaceFamily):
    """Rotationally invariant surface t^2 = f(r^2) in H1.

    Chart (theta_angle, r) on the branch t = branch * sqrt(f(r^2)).
    The profile f comes from the named catalog and is differentiated
    exactly, so third- and fourth-order closed-form data is available
    wherever f is.
    """

    model = HEISENBERG

    def __init__(self, profile: str, branch: int = 1, r_max: float | None = None,
                 **params: float):
        super().__init__()
        if profile not in PROFILE_CATALOG:
            raise ValueError(f"unknown profile {profile!r}")
        ctor, names = PROFILE_CATALOG[profile]
        if set(params) != set(names):
            raise ValueError(f"profile {profile!r} needs parameters {names}")
        self.profile = profile
        self.params = dict(params)
        self.branch = int(branch)
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        self.f = ctor(**params)
        if r_max is not None:
            self._r_max = float(r_max)
        elif profile in ("shifted_sphere", "heis_sphere"):
            rho0 = params["rho0"]
            lam = params.get("lam", 0.0)
            self._r_max = math.sqrt(rho0 ** 2 - lam)
        else:
            self._r_max = 2.0
        self.reference_params = (0.3, 0.6 * self._r_max)

    def chart(self, uv):
        th, r = uv[0], uv[1]
        s = r * r
        t = self.branch * jnp.sqrt(self.f(s))
        return jnp.array([r * jnp.cos(th), r * jnp.sin(th), t])

    def u_def(self, p):
        return self.f(p[0] * p[0] + p[1] * p[1]) - p[2] * p[2]

    def chart_axes(self):
        return (ChartAxis(0.0, 2.0 * math.pi, True),
                ChartAxis(0.0, self._r_max, False))

    def quad_axes(self, cutoff: float = 0.0):
        ax_th, ax_r = self.chart_axes()
        return ax_th, ChartAxis(max(ax_r.lo, cutoff), ax_r.hi, False)

    def singular_set(self):
        # grad_b(u_def) = 0 exactly where r = 0 on the surface (the poles).
        f0 = float(self.f(0.0))
        if f0 >= 0.0:
            return SingularSetInfo(False, "pole(s) at r = 0",
                                   (("point", (0.0, 0.0)),))
        return SingularSetInfo(True, "surface does not reach r = 0")

    def json_spec(self):
        return {"schema": 1, "variant": "rotational", "profile": self.profile,
                "branch": self.branch, **self.params}


class GraphHeis(SurfaceFamily):
    """Graph t = u(x, y) over a box in H1, u from the named catalog.

    u_def = u(x, y) - t, so e2 points toward increasing u - t; this
    matches the rotational family's orientation on shared surfaces.
    """

    model = HEISENBERG

    def __init__(self, profile: str, xy_box: float = 1.5, **params: float):
        super().__init__()
        self.profile = profile
        self.params = dict(params)
        self.xy_box = float(xy_box)
        if profile == "dilation_cone":
            c = params["c"]
            self.height = lambda x, y: c * (x * x + y * y)
        elif profile in ("shifted_sphere", "heis_sphere"):
            ctor, _ = PROFILE_CATALOG[profile]
            f = ctor(**params)
            self.height = lambda x, y: jnp.sqrt(f(x * x + y * y))
        elif profile == "flat":
            level = params.get("level", 0.0)
            self.height = lambda x, y: level + 0.0 * x
        else:
            raise ValueError(f"unknown graph profile {profile!r}")
        self.reference_params = (0.5, 0.3)

    def chart(self, uv):
        x, y = uv[0], uv[1]
        return jnp.array([x, y, self.height(x, y)])

    def u_def(self, p):
        return self.height(p[0], p[1]) - p[2]

    def chart_axes(self):
        b = self.xy_box
        return ChartAxis(-b, b, False), ChartAxis(-b, b, False)

    def singular_set(self):
        if self.profile in ("dilation_cone", "shifted_sphere", "heis_sphere"):
            return SingularSetInfo(False, "singular where grad_b(u - t) = 0",
                                   (("point", (0.0, 0.0)),))
        return SingularSetInfo(True, "no singular points in chart")

    def json_spec(self):
        return {"schema": 1, "variant": "graph", "profile": self.profile,
                "xy_box": self.xy_box, **self.params}


class VerticalPlane(SurfaceFamily):
    """Vertical plane a x + b y = c in H1 (contains the Reeb direction)."""

    model = HEISENBERG

    def __init__(self, a: float, b: float, c: float, extent: float = 1.5):
        super().__init__()
        if a * a + b * b <= 0.0:
            raise ValueError("need a^2 + b^2 > 0")
        self.a, self.b, self.c = float(a), float(b), float(c)
        self.extent = float(extent)
        self.reference_params = (0.2, 0.1)

    def chart(self, uv):
        s, t = uv[0], uv[1]
        n2 = self.a ** 2 + self.b ** 2
        x0, y0 = self.a * self.c / n2, self.b * self.c / n2
        inv = 1.0 / math.sqrt(n2)
        return jnp.array([x0 - self.b * inv * s, y0 + self.a * inv * s, t])

    def u_def(self, p):
        return self.a * p[0] + self.b * p[1] - self.c

    def chart_axes(self):
        e = self.extent
        return ChartAxis(-e, e, False), ChartAxis(-e, e, False)

    def json_spec(self):
        return {"schema": 1, "variant": "vertical_plane",
                "a": self.a, "b": self.b, "c": self.c}


class FoliatedGraph(SurfaceFamily):
    """The graph t = sign * x y + c, foliated by left-invariant
    horizontal lines; a zero of the second-energy residual."""

    model = HEISENBERG

    def __init__(self, sign: int, c: float, xy_box: float = 1.5):
        super().__init__()
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        self.sign = int(sign)
        self.c = float(c)
        self.xy_box = float(xy_box)
        self.reference_params = (0.4, -0.3)

    def chart(self, uv):
        x, y = uv[0], uv[1]
        return jnp.array([x, y, self.sign * x * y + self.c])

    def u_def(self, p):
        return self.sign * p[0] * p[1] + self.c - p[2]

    def chart_axes(self):
        b = self.xy_box
        return ChartAxis(-b, b, False), ChartAxis(-b, b, False)

    def singular_set(self):
        # |grad_b(u_def)|^2 = (sign*y - y)^2 + (sign*x + x)^2: vanishes on a
        # coordinate axis depending on sign.
        axis = "y-axis (x=0)" if self.sign == 1 else "x-axis (y=0)"
        return SingularSetInfo(False, f"singular along the {axis}",
                               (("curve", axis),))

    def json_spec(self):
        return {"schema": 1, "variant": "foliated_graph",
                "sign": self.sign, "c": self.c}


class CylinderHeis(SurfaceFamily):
    """Cylinder r = radius in H1; chart (theta_angle, t), periodic in t
    with period 1 for per-period renormalized-volume bookkeeping.

    u_def = radius^2 - r^2, so e2 is the inward horizontal normal and
    the geodesic collar parameter is rho = radius - r.
    """

    model = HEISENBERG

    def __init__(self, radius: float = 1.0, t_period: float = 1.0):
        super().__init__()
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        self.t_period = float(t_period)
        self.reference_params = (0.7, 0.1)
        self.collar_rho_max = 0.3 * self.radius

    def chart(self, uv):
        th, t = uv[0], uv[1]
        return jnp.array([self.radius * jnp.cos(th),
                          self.radius * jnp.sin(th), t])

    def u_def(self, p):
        return self.radius ** 2 - (p[0] * p[0] + p[1] * p[1])

    def chart_axes(self):
        return (ChartAxis(0.0, 2.0 * math.pi, True),
                ChartAxis(0.0, self.t_period, True))

    def json_spec(self):
        return {"schema": 1, "variant": "cylinder", "radius": self.radius}


# ---------------------------------------------------------------------------
# Sphere families
# ---------------------------------------------------------------------------

class TorusS3(SurfaceFamily):
    """The torus rho1 = const in S3, chart (phi1, phi2)."""

    model = SPHERE3

    def __init__(self, rho1: float):
        super().__init__()
        if not 0.0 < rho1 < 1.0:
            raise ValueError("need 0 < rho1 < 1")
        self.rho1 = float(rho1)
        self.reference_params = (0.3, 1.1)
        self.collar_rho_max = min(0.05, 0.5 * min(self.rho1, 1.0 - self.rho1))

    def chart(self, uv):
        return jnp.array([uv[0], uv[1], self.rho1])

    def u_def(self, p):
        return p[2] - self.rho1

    def chart_axes(self):
        two_pi = 2.0 * math.pi
        return ChartAxis(0.0, two_pi, True), ChartAxis(0.0, two_pi, True)

    def json_spec(self):
        return {"schema": 1, "variant": "torus_s3", "rho1": self.rho1}


class TorusGraphS3(SurfaceFamily):
    """Graph torus rho1 = psi(phi1, phi2) in S3 (perturbation carrier
    for variation checks); psi is a jax-traceable callable."""

    model = SPHERE3

    def __init__(self, psi):
        super().__init__()
        self.psi = psi
        self.reference_params = (0.3, 1.1)

    def chart(self, uv):
        return jnp.array([uv[0], uv[1], self.psi(uv[0], uv[1])])

    def u_def(self, p):
        return p[2] - self.psi(p[0], p[1])

    def chart_axes(self):
        two_pi = 2.0 * math.pi
        return ChartAxis(0.0, two_pi, True), ChartAxis(0.0, two_pi, True)

    def json_spec(self):
        return {"schema": 1, "variant": "torus_graph_s3"}


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def adapted_frame(family: SurfaceFamily, p: SurfacePoint,
                  tol_sing: float = TOL_SING) -> AdaptedFrameData:
    """Adapted frame (e1, e2, T), deviation alpha, p-mean curvature H and
    the area density of theta ^ e1 at a surface point."""
    eng = family.engine
    amb = np.asarray(p.ambient, dtype=float)
    n = eng.value("norm_b", amb)
    if not np.isfinite(n) or n < tol_sing:
        raise SingularPointError(f"|grad_b u| = {n} at {tuple(amb)}")
    e1 = np.asarray(eng.fields["_e1_vec"](jnp.asarray(amb)))
    e2 = np.asarray(eng.fields["_e2_vec"](jnp.asarray(amb)))
    m = model_funcs(family.model.kind)
    t_vec = np.asarray(m["reeb"](jnp.asarray(amb)))
    dens = float(family.area_density_fn()(jnp.asarray(p.params, dtype=jnp.float64)))
    return AdaptedFrameData(e1=e1, e2=e2, T=t_vec,
                            alpha=eng.value("alpha", amb),
                            H=eng.value("H", amb),
                            area_density=dens)


def area_form(family: SurfaceFamily, p: SurfacePoint,
              tol_sing: float = TOL_SING) -> float:
    eng = family.engine
    n = eng.value("norm_b", p.ambient)
    if not np.isfinite(n) or n < tol_sing:
        raise SingularPointError(f"|grad_b u| = {n} at {tuple(p.ambient)}")
    return float(family.area_density_fn()(jnp.asarray(p.params, dtype=jnp.float64)))


def singular_set(family: SurfaceFamily) -> SingularSetInfo:
    return family.singular_set()


def tangent_coeffs(family: SurfaceFamily, params, ambient_vec,
                   cond_max: float = 1e8) -> tuple[float, float]:
    """Express a tangent ambient vector in the chart coordinate basis
    (solve the 2x2 pushforward system in the least-squares sense)."""
    uv = jnp.asarray(params, dtype=jnp.float64)
    tan = np.asarray(jax.jacfwd(family.chart)(uv))  # (3, 2)
    gram = tan.T @ tan
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > cond_max ** 2:
        raise DegenerateChartError(f"pushforward condition {np.sqrt(cond):.3e}")
    sol = np.linalg.solve(gram, tan.T @ np.asarray(ambient_vec, dtype=float))
    return float(sol[0]), float(sol[1])


def riemannian_area_density(family: SurfaceFamily, params) -> float:
    """Area density of the adapted metric g_theta = theta (x) theta + Levi,
    against the chart coordinate measure (property-test helper)."""
    m = model_funcs(family.model.kind)
    uv = jnp.asarray(params, dtype=jnp.float64)
    p = family.chart(uv)
    tan = jax.jacfwd(family.chart)(uv)

    def g(xv, yv):
        x1, x2 = m["horiz"](p, xv)
        y1, y2 = m["horiz"](p, yv)
        return x1 * y1 + x2 * y2 + (m["theta"](p) @ xv) * (m["theta"](p) @ yv)

    t1, t2 = tan[:, 0], tan[:, 1]
    det = g(t1, t1) * g(t2, t2) - g(t1, t2) ** 2
    return float(jnp.sqrt(det))


# ---------------------------------------------------------------------------
# JSON construction
# ---------------------------------------------------------------------------

def family_from_json(doc: dict) -> SurfaceFamily:
    """Build a family from a schema-1 JSON document; unknown keys rejected."""
    if not isinstance(doc, dict):
        raise ValueError("surface spec must be a JSON object")
    if doc.get("schema") != 1:
        raise ValueError('surface spec must declare "schema": 1')
    body = {k: v for k, v in doc.items() if k != "schema"}
    variant = body.pop("variant", None)

    def take(allowed, required):
        unknown = set(body) - set(allowed)
        if unknown:
            raise ValueError(f"unknown keys for variant {variant!r}: {sorted(unknown)}")
        missing = set(required) - set(body)
        if missing:
            raise ValueError(f"missing keys for variant {variant!r}: {sorted(missing)}")

    if variant == "rotational":
        profile = body.get("profile")
        if profile not in PROFILE_CATALOG:
            raise ValueError(f"unknown profile {profile!r}")
        _, names = PROFILE_CATALOG[profile]
        take(("profile", "branch", "r_max") + names, ("profile",) + names)
        kwargs = {k: float(body[k]) for k in names}
        return RotationalHeis(profile, branch=int(body.get("branch", 1)),
                              r_max=body.get("r_max"), **kwargs)
    if variant == "graph":
        profile = body.get("profile")
        names = {"dilation_cone": ("c",), "shifted_sphere": ("rho0", "lam"),
                 "heis_sphere": ("rho0",), "flat": ()}.get(profile)
        if names is None:
            raise ValueError(f"unknown graph profile {profile!r}")
        take(("profile", "xy_box") + names, ("profile",) + names)
        kwargs = {k: float(body[k]) for k in names}
        return GraphHeis(profile, xy_box=float(body.get("xy_box", 1.5)), **kwargs)
    if variant == "vertical_plane":
        take(("a", "b", "c", "extent"), ("a", "b", "c"))
        return VerticalPlane(float(body["a"]), float(body["b"]), float(body["c"]),
                             extent=float(body.get("extent", 1.5)))
    if variant == "foliated_graph":
        take(("sign", "c", "xy_box"), ("sign", "c"))
        return FoliatedGraph(int(body["sign"]), float(body["c"]),
                             xy_box=float(body.get("xy_box", 1.5)))
    if variant == "torus_s3":
        take(("rho1", "rho1_sq"), ())
        if ("rho1" in body) == ("rho1_sq" in body):
            raise ValueError("give exactly one of rho1, rho1_sq")
        rho1 = float(body["rho1"]) if "rho1" in body else math.sqrt(float(body["rho1_sq"]))
        return TorusS3(rho1)
    if variant == "cylinder":
        take(("radius", "t_period"), ())
        return CylinderHeis(radius=float(body.get("radius", 1.0)),
                            t_period=float(body.get("t_period", 1.0)))
    raise ValueError(f"unknown variant {variant!r}")
