"""Numerical checks of the conformal (contact-form) transformation laws.

Under a rescaling theta~ = lambda^2 theta the contact plane and CR
rotation are unchanged, the Levi metric scales by lambda^2, and the
surface invariants transform as

    alpha~ = lambda^-1 alpha + lambda^-2 e1(lambda),
    H~     = lambda^-1 H     - 3 lambda^-2 e2(lambda),
    W~     = 2 lambda^-1 lap_b(lambda^-1)
             - 4 lambda^-4 |grad_b lambda|^2 + lambda^-2 W.

This module recomputes alpha~ and H~ from scratch in the rescaled
structure -- the Reeb field as the numerical kernel of d(theta~), the
mean curvature from the 3-form identity d(theta ^ e^1) =
H theta ^ e^1 ^ e^2 -- and compares against the laws.  It also checks
pointwise conformal invariance of the first energy density
|Hcr|^{3/2} theta ^ e1, i.e. lambda^2 Hcr~ = Hcr.

Everything is evaluated on Heisenberg-model surfaces with a generic
smooth factor; all derivatives are exact forward-mode ones.
"""

from __future__ import annotations

import jax
import jax.numpy as jnp
import numpy as np

from .engine import model_funcs
from .surfaces import SurfaceFamily

DEFAULT_LAMBDA_AMPL = 0.1


def default_lambda(ampl: float = DEFAULT_LAMBDA_AMPL):
    """The generic positive conformal factor lambda = 1 + ampl sin x."""
    def lam(p):
        return 1.0 + ampl * jnp.sin(p[0])
    return lam


def _rescaled_fields(family: SurfaceFamily, lam):
    """Scalar fields of the rescaled structure, built from scratch."""
    kind = family.model.kind
    W = family.model.webster_W
    m = model_funcs(kind)
    f1, f2, theta = m["f1"], m["f2"], m["theta"]
    fields = family.engine.fields
    e1_vec, e2_vec = fields["_e1_vec"], fields["_e2_vec"]
    u_def = family.u_def
    grad_u = jax.grad(u_def)

    def theta_t(p):
        return lam(p) ** 2 * theta(p)

    def reeb_t(p):
        # numerical kernel of d(theta~): for the antisymmetrization
        # M_ij = d_i theta~_j - d_j theta~_i, the kernel direction is
        # (M_23, -M_13, M_12); normalize theta~(T~) = 1.
        jac = jax.jacfwd(theta_t)(p)  # jac[i, j] = d_j theta~_i
        M = jac.T - jac
        k = jnp.array([M[1, 2], -M[0, 2], M[0, 1]])
        return k / (theta_t(p) @ k)

    def levi(p, x, y):
        x1, x2 = m["horiz"](p, x)
        y1, y2 = m["horiz"](p, y)
        return x1 * y1 + x2 * y2

    def e1_cov_t(p):
        # Levi-dual covector of e1~ in the rescaled metric: lambda e^1.
        # Expressed on coordinate vectors via the horizontal projection.
        def form(x):
            return lam(p) * levi(p, x, e1_vec(p))
        return jnp.array(
            [form(jnp.array([1.0, 0.0, 0.0])),
             form(jnp.array([0.0, 1.0, 0.0])),
             form(jnp.array([0.0, 0.0, 1.0]))])

    def e2_cov_t(p):
        def form(x):
            return lam(p) * levi(p, x, e2_vec(p))
        return jnp.array(
            [form(jnp.array([1.0, 0.0, 0.0])),
             form(jnp.array([0.0, 1.0, 0.0])),
             form(jnp.array([0.0, 0.0, 1.0]))])

    def e1_t(p):
        return e1_vec(p) / lam(p)

    def e2_t(p):
        return e2_vec(p) / lam(p)

    def alpha_t(p):
        # T~ + alpha~ e2~ tangent to the level set of u_def
        n_t = jnp.sqrt(levi(p, grad_coords(p), grad_coords(p))) / lam(p)
        return -(grad_u(p) @ reeb_t(p)) / n_t

    def grad_coords(p):
        # coordinate vector whose horizontal pairing reproduces du
        g = grad_u(p)
        g1 = g @ f1(p)
        g2 = g @ f2(p)
        return g1 * f1(p) + g2 * f2(p)

    def wedge3(c1, c2, c3, v1, v2, v3):
        Mm = jnp.stack([jnp.array([c1 @ v1, c1 @ v2, c1 @ v3]),
                        jnp.array([c2 @ v1, c2 @ v2, c2 @ v3]),
                        jnp.array([c3 @ v1, c3 @ v2, c3 @ v3])])
        return jnp.linalg.det(Mm)

    def H_t(p):
        # d(theta~ ^ e1~) = H~ theta~ ^ e1~ ^ e2~, evaluated on the
        # rescaled frame (e1~, e2~, T~).
        def two_form(q):
            # components of theta~ ^ e1~ as an antisymmetric matrix
            th = theta_t(q)
            e1c = e1_cov_t(q)
            return jnp.outer(th, e1c) - jnp.outer(e1c, th)

        jac = jax.jacfwd(two_form)(p)  # jac[i, j, k] = d_k (th^e1)_ij
        v1, v2, v3 = e1_t(p), e2_t(p), reeb_t(p)

        def d_on(a, b, c):
            # d(omega)(a,b,c) for a 2-form with matrix components:
            # sum over cyclic (a,b,c) of c-directional derivative paired
            # with (a, b)
            def term(x, y, z):
                dmat = jnp.tensordot(jac, z, axes=([2], [0]))
                return x @ (dmat @ y)
            return term(v2, v3, v1) - term(v1, v3, v2) + term(v1, v2, v3)

        num = d_on(v1, v2, v3)
        den = wedge3(theta_t(p), e1_cov_t(p), e2_cov_t(p), v1, v2, v3)
        return -num / den

    return {"alpha_t": alpha_t, "H_t": H_t, "reeb_t": reeb_t,
            "e1_t": e1_t, "e2_t": e2_t}


def _frame_derivatives(family: SurfaceFamily, lam, p):
    fields = family.engine.fields
    e1l = jax.jvp(lam, (p,), (fields["_e1_vec"](p),))[1]
    e2l = jax.jvp(lam, (p,), (fields["_e2_vec"](p),))[1]
    return float(e1l), float(e2l)


def transformation_law_check(family: SurfaceFamily, points,
                             lam=None) -> dict:
    """Max deviation of the recomputed (alpha~, H~) from the laws
    alpha~ = lambda^-1 alpha + lambda^-2 e1(lambda) and
    H~ = lambda^-1 H - 3 lambda^-2 e2(lambda) over the sample points
    (ambient coordinate triples)."""
    if lam is None:
        lam = default_lambda()
    re = _rescaled_fields(family, lam)
    fields = family.engine.fields
    worst_a = worst_h = 0.0
    for p in points:
        p = jnp.asarray(p, dtype=jnp.float64)
        lv = float(lam(p))
        e1l, e2l = _frame_derivatives(family, lam, p)
        a_law = float(fields["alpha"](p)) / lv + e1l / lv ** 2
        h_law = float(fields["H"](p)) / lv - 3.0 * e2l / lv ** 2
        worst_a = max(worst_a, abs(float(re["alpha_t"](p)) - a_law))
        worst_h = max(worst_h, abs(float(re["H_t"](p)) - h_law))
    return {"alpha_dev": worst_a, "H_dev": worst_h}


def da1_invariance_check(family: SurfaceFamily, points, lam=None) -> float:
    """Max pointwise deviation of lambda^2 Hcr~ from Hcr (equivalent to
    invariance of |Hcr|^{3/2} theta ^ e1, since theta~ ^ e1~ =
    lambda^3 theta ^ e1).

    The rescaled structure acquires torsion, so
    Hcr~ = e1~(alpha~) + alpha~^2/2 - Im A11~ + W~/4 + H~^2/6 with
    Im A11~ and W~ from the transformation laws; the covariant Hessian
    components (lambda^-1)_11, (lambda^-1)_22 are taken in the adapted
    frame of the original structure.
    """
    if lam is None:
        lam = default_lambda()
    kind = family.model.kind
    W = family.model.webster_W
    m = model_funcs(kind)
    f1, f2, omega_ref = m["f1"], m["f2"], m["omega_ref"]
    re = _rescaled_fields(family, lam)
    fields = family.engine.fields
    alpha_t, e1_t = re["alpha_t"], re["e1_t"]
    e1_vec, e2_vec = fields["_e1_vec"], fields["_e2_vec"]
    e1_coeffs, e2_coeffs = fields["_e1_coeffs"], fields["_e2_coeffs"]

    def lam_inv(p):
        return 1.0 / lam(p)

    def cov_hess(vec, coeffs):
        # covariant Hessian (fn)_{XX} = X(X fn) - (nabla_X X) fn for the
        # adapted-frame field X, using the parallel reference frame:
        # nabla_X X = [X(x1) - omega_ref(X) x2] f1 + [X(x2) + ...] f2.
        def out(fn):
            def d(p):
                return jax.jvp(fn, (p,), (vec(p),))[1]

            def hess(p):
                xx = jax.jvp(d, (p,), (vec(p),))[1]
                x1, x2 = coeffs(p)
                dx1, dx2 = jax.jvp(coeffs, (p,), (vec(p),))[1]
                wr = omega_ref(p) @ vec(p)
                c1 = dx1 - wr * x2
                c2 = dx2 + wr * x1
                nxx_f = (c1 * jax.jvp(fn, (p,), (f1(p),))[1]
                         + c2 * jax.jvp(fn, (p,), (f2(p),))[1])
                return xx - nxx_f
            return hess
        return out

    li_11 = cov_hess(e1_vec, e1_coeffs)(lam_inv)
    li_22 = cov_hess(e2_vec, e2_coeffs)(lam_inv)

    def frame_grads(p):
        g1 = jax.jvp(lam, (p,), (e1_vec(p),))[1]
        g2 = jax.jvp(lam, (p,), (e2_vec(p),))[1]
        return g1, g2

    def e1_alpha_t(p):
        return jax.jvp(alpha_t, (p,), (e1_t(p),))[1]

    worst = 0.0
    for p in points:
        p = jnp.asarray(p, dtype=jnp.float64)
        lv = float(lam(p))
        g1, g2 = (float(g) for g in frame_grads(p))
        h11, h22 = float(li_11(p)), float(li_22(p))
        im_a11_t = 0.5 * ((g2 * g2 - g1 * g1) / lv ** 4
                          + (h22 - h11) / lv)
        w_t = (2.0 / lv * (h11 + h22)
               - 4.0 / lv ** 4 * (g1 * g1 + g2 * g2) + W / lv ** 2)
        hcr_t = (float(e1_alpha_t(p)) + 0.5 * float(alpha_t(p)) ** 2
                 - im_a11_t + 0.25 * w_t + float(re["H_t"](p)) ** 2 / 6.0)
        hcr = float(fields["hcr"](p))
        worst = max(worst, abs(lv ** 2 * hcr_t - hcr))
    return worst


def surface_points(family: SurfaceFamily, n: int, seed: int = 0) -> np.ndarray:
    """Random nonsingular chart samples, as ambient coordinate triples."""
    rng = np.random.default_rng(seed)
    ax1, ax2 = family.quad_axes(0.05)
    out = []
    while len(out) < n:
        u = rng.uniform(ax1.lo + 0.05, ax1.hi - 0.05)
        v = rng.uniform(ax2.lo + 0.1 * (ax2.hi - ax2.lo),
                        ax2.hi - 0.1 * (ax2.hi - ax2.lo))
        p = family.point(u, v)
        if family.engine.value("norm_b", p.ambient) > 1e-6:
            out.append(np.asarray(p.ambient))
    return np.stack(out)
