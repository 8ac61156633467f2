"""One-parameter family scans and finite-difference first-variation
checks of the two energy functionals.

The first variation of either energy along a variation field
X = f e2 + g T is the pairing of its Euler-Lagrange residual with
h = f - alpha g against theta ^ e1.  The checks here realize X to
first order by explicit chart displacements:

* tori rho1 = const in the sphere model: rho1 -> rho1 + s f rho2
  realizes f e2 exactly at s = 0 (g T is tangential there);
* Heisenberg graphs t = u(x, y): u -> u + s d with
  d = -f |grad_b(u - t)| + g gives path velocity d T, whose normal
  content is h = f - alpha g exactly (alpha |grad_b(u - t)| = 1);
* the cylinder r = R: radius graph r = R - s f realizes f e2 exactly,
  and g T is tangential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .ambient import HEISENBERG
from .energy import QuadratureSpec, integrate
from .errors import HcrZeroError, SupportError
from .invariants import TOL_HCR
from .surfaces import (ChartAxis, CylinderHeis, FoliatedGraph, GraphHeis,
                       SurfaceFamily, TorusGraphS3, TorusS3)

TOL_VAR = 1e-3

SCAN_TARGETS = ("E1", "E2", "ResidualE1", "ResidualE2", "Hcr", "SupHcr")


@dataclass(frozen=True)
class FamilyScan:
    parameter_grid: tuple
    values: tuple
    critical_params: tuple
    minima: tuple = ()       # (param, value) pairs of refined local minima
    errors: tuple = ()       # (param, message) for failed evaluations


@dataclass(frozen=True)
class VariationCheck:
    fd_derivative: float
    formula_derivative: float
    perturbation: str
    step: float
    steps: tuple = ()
    mismatches: tuple = ()

    @property
    def mismatch(self) -> float:
        return abs(self.fd_derivative - self.formula_derivative)


# ---------------------------------------------------------------------------
# Family scans
# ---------------------------------------------------------------------------

def _target_fn(generator, target: str, spec: QuadratureSpec):
    if target not in SCAN_TARGETS:
        raise ValueError(f"target must be one of {SCAN_TARGETS}")

    def value(c: float) -> float:
        fam = generator(c)
        if target in ("E1", "E2"):
            dens = "da1" if target == "E1" else "da2"
            return integrate(fam, dens, spec, quiet=True).value
        u0, v0 = fam.reference_params
        p = fam.point(u0, v0)
        amb = np.asarray(p.ambient, dtype=float)
        if target == "ResidualE1":
            return fam.engine.value("e1_resid_main", amb)
        if target == "ResidualE2":
            return fam.engine.value("e2_resid", amb)
        if target == "Hcr":
            return fam.engine.value("hcr", amb)
        # SupHcr: sup |Hcr| over a parameter sample
        ax1, ax2 = fam.quad_axes(1e-3)
        u = np.linspace(ax1.lo, ax1.hi, 12, endpoint=not ax1.periodic)
        v = np.linspace(ax2.lo + 0.05 * (ax2.hi - ax2.lo), ax2.hi
                        - 0.05 * (ax2.hi - ax2.lo), 12)
        uu, vv = np.meshgrid(u, v, indexing="ij")
        uvs = np.column_stack([uu.ravel(), vv.ravel()])
        import jax
        import jax.numpy as jnp
        pts = jax.vmap(fam.chart)(jnp.asarray(uvs, dtype=jnp.float64))
        return float(np.max(np.abs(fam.engine.batch_fn("hcr")(pts))))

    return value


def scan_family(generator, grid, target: str,
                spec: QuadratureSpec | None = None,
                root_tol: float = 1e-13, fd_step: float = 1e-5,
                zero_tol: float = 1e-7) -> FamilyScan:
    """Evaluate target over the parameter grid and refine critical
    parameters: sign-change brackets by root bisection, smooth local
    minima by bisecting on a central finite-difference derivative.  A
    refined minimum counts as critical when its value is zero within
    zero_tol relative to the grid's value scale.
    """
    if spec is None:
        spec = QuadratureSpec(n1=32, n2=32)
    grid = [float(c) for c in grid]
    if len(grid) < 3 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be increasing with at least 3 points")
    value = _target_fn(generator, target, spec)

    vals: list[float] = []
    errors: list[tuple] = []
    for c in grid:
        try:
            vals.append(value(c))
        except Exception as exc:  # recorded, not fatal
            vals.append(math.nan)
            errors.append((c, f"{type(exc).__name__}: {exc}"))

    scale = max((abs(v) for v in vals if math.isfinite(v)), default=1.0)
    critical: list[float] = []
    minima: list[tuple] = []

    for i in range(len(grid) - 1):
        a, b = grid[i], grid[i + 1]
        va, vb = vals[i], vals[i + 1]
        if not (math.isfinite(va) and math.isfinite(vb)):
            continue
        if va == 0.0:
            critical.append(a)
        elif va * vb < 0.0:
            critical.append(float(brentq(value, a, b, xtol=root_tol)))
    if math.isfinite(vals[-1]) and vals[-1] == 0.0:
        critical.append(grid[-1])

    def dvalue(c: float) -> float:
        h = fd_step * max(1.0, abs(c))
        return (value(c + h) - value(c - h)) / (2.0 * h)

    for i in range(1, len(grid) - 1):
        trip = vals[i - 1: i + 2]
        if not all(map(math.isfinite, trip)):
            continue
        if trip[1] < trip[0] and trip[1] < trip[2] and \
                trip[0] * trip[1] > 0.0 and trip[1] * trip[2] > 0.0:
            da, db = dvalue(grid[i - 1]), dvalue(grid[i + 1])
            if da * db < 0.0:
                c_min = float(brentq(dvalue, grid[i - 1], grid[i + 1],
                                     xtol=root_tol))
                v_min = value(c_min)
                minima.append((c_min, v_min))
                if abs(v_min) <= zero_tol * max(1.0, scale):
                    critical.append(c_min)

    return FamilyScan(tuple(grid), tuple(vals), tuple(sorted(critical)),
                      tuple(minima), tuple(errors))


# ---------------------------------------------------------------------------
# First-variation checks
# ---------------------------------------------------------------------------

def bump(center, radius: float, periods=(None, None), height: float = 1.0):
    """Smooth compactly supported bump on the chart: exp(1 - 1/(1 - q^2))
    inside the parameter ball of the given radius, zero outside.  A
    period per axis wraps the distance on periodic charts."""
    import jax.numpy as jnp
    c0, c1 = float(center[0]), float(center[1])

    def dist(x, c, period):
        d = x - c
        if period is None:
            return d
        return (d + 0.5 * period) % period - 0.5 * period

    def f(uv):
        d0 = dist(uv[0], c0, periods[0])
        d1 = dist(uv[1], c1, periods[1])
        q2 = (d0 * d0 + d1 * d1) / (radius * radius)
        arg = 1.0 - q2
        safe = jnp.where(arg > 1e-12, arg, 1.0)
        return jnp.where(arg > 1e-12,
                         height * jnp.exp(1.0 - 1.0 / safe), 0.0)

    return f


def zero_fn(uv):
    """The zero test function (jax-traceable)."""
    return 0.0 * uv[0]

class _HeightGraph(SurfaceFamily):
    """Heisenberg graph t = height(x, y) with a callable height."""

    model = HEISENBERG

    def __init__(self, height, xy_box: float):
        super().__init__()
        self.height = height
        self.xy_box = float(xy_box)

    def chart(self, uv):
        import jax.numpy as jnp
        return jnp.array([uv[0], uv[1], self.height(uv[0], uv[1])])

    def u_def(self, p):
        return self.height(p[0], p[1]) - p[2]

    def chart_axes(self):
        b = self.xy_box
        return ChartAxis(-b, b, False), ChartAxis(-b, b, False)


class _RadialCylinderGraph(SurfaceFamily):
    """Cylinder-like surface r = radius(theta, t), chart (theta, t)."""

    model = HEISENBERG

    def __init__(self, radius_fn, t_period: float):
        super().__init__()
        self.radius_fn = radius_fn
        self.t_period = float(t_period)

    def chart(self, uv):
        import jax.numpy as jnp
        r = self.radius_fn(uv[0], uv[1])
        return jnp.array([r * jnp.cos(uv[0]), r * jnp.sin(uv[0]), uv[1]])

    def u_def(self, p):
        import jax.numpy as jnp
        th = jnp.arctan2(p[1], p[0])
        return self.radius_fn(th, p[2]) ** 2 - (p[0] ** 2 + p[1] ** 2)

    def chart_axes(self):
        return (ChartAxis(0.0, 2.0 * math.pi, True),
                ChartAxis(0.0, self.t_period, True))


def _perturbed_family(base: SurfaceFamily, f, g, s: float) -> SurfaceFamily:
    """Surface displaced along X = f e2 + g T to first order in s."""
    import jax.numpy as jnp

    if isinstance(base, (TorusS3, TorusGraphS3)):
        # e2 = rho2 d/drho1; g T is tangential (T lies in the surface).
        if isinstance(base, TorusS3):
            rho1 = base.rho1
            base_psi = lambda u, v: rho1 + 0.0 * u
        else:
            base_psi = base.psi

        def psi(u, v):
            r1 = base_psi(u, v)
            return r1 + s * f(jnp.array([u, v])) * jnp.sqrt(1.0 - r1 * r1)

        return TorusGraphS3(psi)

    if isinstance(base, (GraphHeis, FoliatedGraph)):
        # path velocity d T with d = -f |grad_b(u - t)| + g; its normal
        # content is h = f - alpha g since alpha |grad_b(u - t)| = 1.
        height0 = base.height if isinstance(base, GraphHeis) else (
            lambda x, y: base.sign * x * y + base.c)
        norm_b = base.engine.fields["norm_b"]

        def height(x, y):
            uv = jnp.array([x, y])
            p = jnp.array([x, y, height0(x, y)])
            d = -f(uv) * norm_b(p) + g(uv)
            return height0(x, y) + s * d

        return _HeightGraph(height, base.xy_box)

    if isinstance(base, CylinderHeis):
        # e2 is the inward horizontal normal: r -> r - s f; g T tangential.
        R = base.radius

        def radius_fn(th, t):
            return R - s * f(jnp.array([th, t]))

        return _RadialCylinderGraph(radius_fn, base.t_period)

    raise TypeError(f"no perturbation realization for {type(base).__name__}")


def _support_ok(base: SurfaceFamily, fn, tol: float = 1e-12) -> bool:
    import jax.numpy as jnp
    ax1, ax2 = base.chart_axes()
    for i, ax in enumerate((ax1, ax2)):
        if ax.periodic:
            continue
        other = (ax1, ax2)[1 - i]
        for edge in (ax.lo, ax.hi):
            for t in np.linspace(other.lo, other.hi, 17):
                uv = jnp.asarray([edge, t] if i == 0 else [t, edge])
                if abs(float(fn(uv))) > tol:
                    return False
    return True


def first_variation_check(base: SurfaceFamily, f, g, steps,
                          target: str = "E2",
                          spec: QuadratureSpec | None = None,
                          tol_hcr: float = TOL_HCR) -> VariationCheck:
    """Compare the central finite-difference derivative of the energy
    along the family realizing X = f e2 + g T with the residual pairing
    int E . (f - alpha g) theta ^ e1.

    f and g are jax-traceable functions of the chart parameter pair.
    """
    if target not in ("E1", "E2"):
        raise ValueError("target must be E1 or E2")
    if spec is None:
        spec = QuadratureSpec(n1=48, n2=48)
    steps = sorted(float(s) for s in steps)
    if not steps or steps[0] <= 0.0:
        raise ValueError("steps must be positive")
    for fn in (f, g):
        if not _support_ok(base, fn):
            raise SupportError("test function support touches the chart edge")

    import jax
    import jax.numpy as jnp

    dens = "da1" if target == "E1" else "da2"
    resid = "e1_resid_main" if target == "E1" else "e2_resid"
    eng = base.engine
    chart = base.chart

    if target == "E1":
        # the residual needs |Hcr| bounded away from zero on the support
        ax1, ax2 = base.chart_axes()
        u = np.linspace(ax1.lo, ax1.hi, 24)
        v = np.linspace(ax2.lo, ax2.hi, 24)
        uu, vv = np.meshgrid(u, v, indexing="ij")
        uvs = np.column_stack([uu.ravel(), vv.ravel()])
        pts = jax.vmap(chart)(jnp.asarray(uvs))
        hc = np.asarray(eng.batch_fn("hcr")(pts))
        supp = np.abs(np.asarray(jax.vmap(f)(jnp.asarray(uvs)))) + \
            np.abs(np.asarray(jax.vmap(g)(jnp.asarray(uvs))))
        if np.any((supp > 1e-12) & (np.abs(hc) <= tol_hcr)):
            raise HcrZeroError("|Hcr| below tolerance on the support")

    resid_fld = eng.fields[resid]
    alpha_fld = eng.fields["alpha"]

    def pairing(uv):
        p = chart(uv)
        h = f(uv) - alpha_fld(p) * g(uv)
        return resid_fld(p) * h

    pairing_b = jax.jit(jax.vmap(pairing))
    formula = integrate(
        base, lambda uvs: np.asarray(pairing_b(jnp.asarray(uvs))),
        spec, quiet=True).value

    fds = []
    for s in steps:
        e_plus = integrate(_perturbed_family(base, f, g, s), dens, spec,
                           quiet=True).value
        e_minus = integrate(_perturbed_family(base, f, g, -s), dens, spec,
                            quiet=True).value
        fds.append((e_plus - e_minus) / (2.0 * s))

    mism = tuple(abs(fd - formula) for fd in fds)
    return VariationCheck(fd_derivative=fds[0], formula_derivative=formula,
                          perturbation=f"X = f e2 + g T on {type(base).__name__}",
                          step=steps[0], steps=tuple(steps), mismatches=mism)
