"""Formal-solution expansion of the singular CR Yamabe problem and
volume renormalization.

For a conformal factor u with u^{-2} theta of constant Webster
curvature -4 and u = 0 on the surface, written in the geodesic collar
parameter rho along the inner horizontal normal e2,

    u(x, rho) = rho + v rho^2 + w rho^3 + z rho^4 + l rho^5 log rho + O(rho^5),

the coefficients v, w, z are locally determined, the rho^5 coefficient
is a free function (set to zero here), and l obstructs smoothness and
equals one fifth of the second-energy Euler-Lagrange residual.  The
volume element of the rescaled structure expands as

    u^{-4} <e2, nu> dmu_{Sigma_rho}
        = rho^{-4} [1 + v1 rho + v2 rho^2 + v3 rho^3 + o(rho^3)] theta ^ e1,

giving Vol({rho > eps}) = c0 eps^-3 + c1 eps^-2 + c2 eps^-1
+ L log(1/eps) + V0 + o(1), with c0, c1, c2, L surface integrals of
local invariants.  This module evaluates the coefficients pointwise,
integrates them, and cross-checks the expansion by integrating the
truncated volume element over a collar and least-squares fitting the
eps-asymptotics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energy import EnergyReport, QuadratureSpec, _axis_nodes, integrate
from .errors import FitIllConditionedError, SingularPointError
from .surfaces import TOL_SING, SurfaceFamily, SurfacePoint

FIT_BASIS = ("eps^-3", "eps^-2", "eps^-1", "log(1/eps)", "1")


@dataclass(frozen=True)
class YamabeExpansion:
    """Pointwise expansion data at one boundary point."""
    v: float
    w: float
    z: float
    l: float
    v1: float
    v2: float
    v3: float


@dataclass(frozen=True)
class RenormCoefficients:
    c0: float
    c1: float
    c2: float
    L: float
    converged: bool


@dataclass(frozen=True)
class RenormFit:
    c0_fit: float
    c1_fit: float
    c2_fit: float
    L_fit: float
    V0_fit: float
    residual_norm: float
    eps_range: tuple[float, float]


def _check_point(family: SurfaceFamily, p: SurfacePoint, tol_sing: float):
    amb = np.asarray(p.ambient, dtype=float)
    n = family.engine.value("norm_b", amb)
    if not np.isfinite(n) or n < tol_sing:
        raise SingularPointError(f"|grad_b u| = {n} at {tuple(amb)}")
    return amb


def expansion_coeffs(family: SurfaceFamily, p: SurfacePoint,
                     tol_sing: float = TOL_SING) -> tuple[float, float, float, float]:
    """Locally determined expansion coefficients (v, w, z, l)."""
    amb = _check_point(family, p, tol_sing)
    eng = family.engine
    return (eng.value("v", amb), eng.value("w", amb),
            eng.value("z", amb), eng.value("l", amb))


def volume_densities(family: SurfaceFamily, p: SurfacePoint,
                     tol_sing: float = TOL_SING) -> tuple[float, float, float]:
    """Volume-element expansion densities (v1, v2, v3)."""
    amb = _check_point(family, p, tol_sing)
    eng = family.engine
    return (eng.value("v1", amb), eng.value("v2", amb), eng.value("v3", amb))


def expansion_at(family: SurfaceFamily, p: SurfacePoint,
                 tol_sing: float = TOL_SING) -> YamabeExpansion:
    return YamabeExpansion(*expansion_coeffs(family, p, tol_sing),
                           *volume_densities(family, p, tol_sing))


def renorm_coefficients(family: SurfaceFamily,
                        spec: QuadratureSpec) -> RenormCoefficients:
    """Closed-form renormalized-volume coefficients
    c0 = (1/3) Area, c1 = -(1/6) int H, c2 = (1/3) int (5 e1(alpha)
    + 10 alpha^2 + H^2/6), L = int v3, all against theta ^ e1."""
    r0 = integrate(family, "one", spec, quiet=True)
    r1 = integrate(family, "H", spec, quiet=True)
    r2 = integrate(family, "c2_density", spec, quiet=True)
    r3 = integrate(family, "v3", spec, quiet=True)
    ok = all(r.converged for r in (r0, r1, r2, r3))
    return RenormCoefficients(r0.value / 3.0, -r1.value / 6.0,
                              r2.value / 3.0, r3.value, ok)


def exact_form_check(family: SurfaceFamily, spec: QuadratureSpec) -> EnergyReport:
    """Integral of (dA2 density - v3/2) over a closed surface; the
    integrand is an exact form, so the value contracts to zero."""
    return integrate(family, "exact_diff", spec, quiet=True)


# ---------------------------------------------------------------------------
# Direct volume integration and asymptotic fit
# ---------------------------------------------------------------------------

def _boundary_samples(family: SurfaceFamily, spec: QuadratureSpec):
    """Quadrature nodes/weights on the boundary surface and the field
    values entering the collar integrand."""
    import jax
    import jax.numpy as jnp

    axes = family.quad_axes(spec.cutoff_radius)
    x1, w1 = _axis_nodes(axes[0], spec.n1)
    x2, w2 = _axis_nodes(axes[1], spec.n2)
    uu, vv = np.meshgrid(x1, x2, indexing="ij")
    uvs = np.column_stack([uu.ravel(), vv.ravel()])
    weights = np.outer(w1, w2).ravel() * family.area_density_batch(uvs)

    chart_batch = jax.jit(jax.vmap(family.chart))
    pts = chart_batch(jnp.asarray(uvs, dtype=jnp.float64))
    eng = family.engine
    fields = {name: eng.batch_fn(name)(pts)
              for name in ("v", "w", "z", "l", "b1", "b2", "b3")}
    return weights, {k: np.asarray(vals) for k, vals in fields.items()}


def _collar_volume(weights, f, eps: float, rho_max: float, n_gl: int = 160) -> float:
    """Vol({eps < rho < rho_max}) for the truncated formal solution:
    per boundary point, integrate u^-4 B over rho with Gauss-Legendre
    in log rho (the integrand is rho^-4-singular but smooth in log)."""
    s_nodes, s_wts = np.polynomial.legendre.leggauss(n_gl)
    lo, hi = math.log(eps), math.log(rho_max)
    s = 0.5 * (hi - lo) * s_nodes + 0.5 * (hi + lo)
    rho = np.exp(s)
    jac = 0.5 * (hi - lo) * rho * s_wts  # d rho = rho d s

    rho_ = rho[None, :]
    v, w, z, l = (f[k][:, None] for k in ("v", "w", "z", "l"))
    b1, b2, b3 = (f[k][:, None] for k in ("b1", "b2", "b3"))
    u = rho_ * (1.0 + v * rho_ + w * rho_ ** 2 + z * rho_ ** 3
                + l * rho_ ** 4 * np.log(rho_))
    B = 1.0 + b1 * rho_ + b2 * rho_ ** 2 + b3 * rho_ ** 3
    per_point = np.sum(u ** -4 * B * jac[None, :], axis=1)
    return float(np.sum(per_point * weights))


def _tail_correction(weights, f, eps_values) -> np.ndarray:
    """Integral over (0, eps) of the regular part of the collar
    integrand, for each eps.

    The integrand g = u^-4 B has Laurent expansion
    a rho^-4 + b rho^-3 + c rho^-2 + d rho^-1 + r(rho) with r bounded
    up to logs, so Vol(eps) + int_0^eps r follows the five-term fit
    ansatz exactly.  r is evaluated without cancellation by expanding
    the numerator N = B - T3 (1 + Q)^4 (T3 the degree-3 Taylor
    polynomial of rho^4 g, Q = v rho + w rho^2 + z rho^3
    + l rho^4 log rho) in exact polynomial arithmetic: its rho^0..rho^3
    coefficients vanish identically and are dropped, leaving
    r = rho^-4 N / (1 + Q)^4 stable down to rho = 0.
    """
    v, w, z, l = (f[k] for k in ("v", "w", "z", "l"))
    b1, b2, b3 = (f[k] for k in ("b1", "b2", "b3"))
    npts = v.shape[0]

    def conv(a, b):
        out = np.zeros((npts, a.shape[1] + b.shape[1] - 1))
        for i in range(a.shape[1]):
            for j in range(b.shape[1]):
                out[:, i + j] += a[:, i] * b[:, j]
        return out

    one = np.ones(npts)
    zero = np.zeros(npts)
    one_q = np.stack([one, v, w, z], axis=1)          # 1 + q
    B = np.stack([one, b1, b2, b3], axis=1)
    A2 = conv(one_q, one_q)                           # (1+q)^2
    A3 = conv(A2, one_q)
    A4 = conv(A2, A2)
    # (1+q)^{-4} mod rho^4 and T3 = trunc_3(B (1+q)^{-4})
    i1 = -4.0 * v
    i2 = -4.0 * w + 10.0 * v * v
    i3 = -4.0 * z + 20.0 * v * w - 20.0 * v ** 3
    T = np.stack([one, b1 + i1, b2 + b1 * i1 + i2,
                  b3 + b2 * i1 + b1 * i2 + i3], axis=1)
    # N = B - T (1+Q)^4; pure-power part has exact zeros below rho^4
    n_poly = -conv(T, A4)
    n_poly[:, :4] += B
    n_poly[:, :4] = 0.0
    tail = n_poly[:, 4:]                              # coeffs of rho^{k}, k>=0
    # log parts: -(T) * [4 l (1+q)^3 rho^4 L + 6 l^2 (1+q)^2 rho^8 L^2
    #                    + 4 l^3 (1+q) rho^12 L^3 + l^4 rho^16 L^4]
    nl1 = -conv(T, 4.0 * l[:, None] * A3)             # x rho^4 log
    nl2 = -conv(T, 6.0 * (l ** 2)[:, None] * A2)      # x rho^8 log^2
    nl3 = -conv(T, 4.0 * (l ** 3)[:, None] * one_q)   # x rho^12 log^3
    nl4 = -T * (l ** 4)[:, None]                      # x rho^16 log^4

    def polyval(coeffs, rho):
        acc = np.zeros((npts, rho.size))
        for k in range(coeffs.shape[1] - 1, -1, -1):
            acc = acc * rho[None, :] + coeffs[:, k:k + 1]
        return acc

    out = np.empty(len(eps_values))
    s_nodes, s_wts = np.polynomial.legendre.leggauss(120)
    for idx, eps in enumerate(eps_values):
        hi = math.log(eps)
        lo = hi - 36.0
        s = 0.5 * (hi - lo) * s_nodes + 0.5 * (hi + lo)
        rho = np.exp(s)
        jac = 0.5 * (hi - lo) * rho * s_wts
        lg = s[None, :]
        num = (polyval(tail, rho)
               + lg * polyval(nl1, rho)
               + lg ** 2 * rho[None, :] ** 4 * polyval(nl2, rho)
               + lg ** 3 * rho[None, :] ** 8 * polyval(nl3, rho)
               + lg ** 4 * rho[None, :] ** 12 * polyval(nl4, rho))
        den = (polyval(one_q, rho)
               + l[:, None] * rho[None, :] ** 4 * lg) ** 4
        r = num / den
        per_point = np.sum(r * jac[None, :], axis=1)
        out[idx] = float(np.sum(per_point * weights))
    return out


def _collar_valid(f, rho_max: float) -> bool:
    """Positivity of the truncated flow-map density B and of u on the
    collar, at every sampled boundary point (operational check that the
    geodesic foliation has not focally degenerated)."""
    rho = np.linspace(1e-6, rho_max, 64)[None, :]
    v, w, z, l = (f[k][:, None] for k in ("v", "w", "z", "l"))
    b1, b2, b3 = (f[k][:, None] for k in ("b1", "b2", "b3"))
    B = 1.0 + b1 * rho + b2 * rho ** 2 + b3 * rho ** 3
    u = rho * (1.0 + v * rho + w * rho ** 2 + z * rho ** 3
               + l * rho ** 4 * np.log(rho))
    return bool(np.all(B > 0.0) and np.all(u > 0.0))


def direct_volume_fit(family: SurfaceFamily, eps_list, spec: QuadratureSpec,
                      rho_max: float | None = None,
                      cond_max: float = 1e12) -> RenormFit:
    """Integrate the truncated rescaled volume element over the collar
    {eps < rho < rho_max} for each eps and least-squares fit

        Vol(eps) ~ c0 eps^-3 + c1 eps^-2 + c2 eps^-1 + L log(1/eps) + V0.

    The design matrix is column-normalized before solving; an
    underdetermined or too-narrow eps_list raises
    FitIllConditionedError.
    """
    eps = np.sort(np.asarray(list(eps_list), dtype=float))[::-1]
    if len(eps) < len(FIT_BASIS):
        raise FitIllConditionedError(
            f"need at least {len(FIT_BASIS)} eps values, got {len(eps)}")
    if np.any(eps <= 0.0) or len(np.unique(eps)) != len(eps):
        raise ValueError("eps_list must be positive and distinct")
    if eps[0] / eps[-1] < 16.0:
        raise FitIllConditionedError(
            f"eps_list span {eps[0] / eps[-1]:.2f} < 16; widen the range")
    if rho_max is None:
        rho_max = family.collar_rho_max
    if eps[0] >= rho_max:
        raise ValueError(f"largest eps {eps[0]} must be < rho_max {rho_max}")

    weights, f = _boundary_samples(family, spec)
    if not _collar_valid(f, rho_max):
        raise ValueError(
            f"collar depth rho_max={rho_max} too deep: flow-map density "
            "loses positivity")

    vols = np.array([_collar_volume(weights, f, e, rho_max) for e in eps])
    # Adding back the (0, eps) integral of the integrand's regular part
    # removes every o(1) term, so the data follow the five-term ansatz
    # to roundoff and a plain unweighted fit recovers the coefficients.
    vols = vols + _tail_correction(weights, f, eps)
    design = np.column_stack([eps ** -3, eps ** -2, eps ** -1,
                              np.log(1.0 / eps), np.ones_like(eps)])
    scale = np.linalg.norm(design, axis=0)
    scaled = design / scale
    cond = np.linalg.cond(scaled)
    if not np.isfinite(cond) or cond > cond_max:
        raise FitIllConditionedError(
            f"fit condition number {cond:.3e} > {cond_max:.1e}")
    coef, *_ = np.linalg.lstsq(scaled, vols, rcond=None)
    coef = coef / scale
    resid = float(np.linalg.norm(design @ coef - vols))
    return RenormFit(c0_fit=float(coef[0]), c1_fit=float(coef[1]),
                     c2_fit=float(coef[2]), L_fit=float(coef[3]),
                     V0_fit=float(coef[4]), residual_norm=resid,
                     eps_range=(float(eps[-1]), float(eps[0])))


def default_eps_list(n: int = 10, lo: float = 3e-4, hi: float = 2e-2):
    """Geometric eps ladder inside the supported fitting window."""
    return list(np.geomspace(hi, lo, n))


# ---------------------------------------------------------------------------
# Conformal-factor PDE residual on the cylinder
# ---------------------------------------------------------------------------

def pde_residual_cylinder(rho_values, radius: float = 1.0) -> list[float]:
    """Residual of |d_P u|^2 - (1/2) u lap_P u - (1/8) R u^2 against 1
    for the truncated formal solution on the cylinder r = radius.

    The collar parameter is rho = radius - r, so u is radial and the
    sub-Laplacian reduces in closed form: lap_P F(r) = F'' + F'/r and
    |d_P F|^2 = F'^2 (the left-invariant frame is parallel and R = 0).
    The truncation satisfies the equation to O(rho^4 log rho).
    """
    from .surfaces import CylinderHeis

    fam = CylinderHeis(radius=radius)
    p = fam.point(0.0, 0.0)
    v, w, z, l = expansion_coeffs(fam, p)

    import jax
    import jax.numpy as jnp

    def u_of_r(r):
        rho = radius - r
        return rho * (1.0 + v * rho + w * rho ** 2 + z * rho ** 3
                      + l * rho ** 4 * jnp.log(rho))

    du = jax.grad(u_of_r)
    d2u = jax.grad(du)

    out = []
    for rho in rho_values:
        r = radius - float(rho)
        up, upp, uu = float(du(r)), float(d2u(r)), float(u_of_r(r))
        lap = upp + up / r
        out.append(up * up - 0.5 * uu * lap)
    return out
