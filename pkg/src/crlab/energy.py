"""Surface quadrature of invariant densities against theta ^ e1.

Tensor-product rules over the chart: trapezoid (spectrally accurate)
on periodic axes, midpoint on open axes, Richardson extrapolation
across grid doublings.  Integrals near a singular set are taken at a
sequence of shrinking excision radii and extrapolated; a diverging
sequence is reported with converged=False instead of a value being
trusted.

Grid-cell evaluation is embarrassingly parallel: rows are dispatched
to a worker pool capped by the CRLAB_THREADS environment variable and
the reduction is pairwise summation in fixed order, so results are
bit-stable across thread counts.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import NonconvergenceWarning, SupportError
from .surfaces import ChartAxis, SurfaceFamily

REL_TOL = 1e-8
ABS_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureSpec:
    n1: int = 64
    n2: int = 64
    cutoff_radius: float = 0.0
    extrapolation_levels: int = 2

    def __post_init__(self) -> None:
        if self.n1 < 8 or self.n2 < 8:
            raise ValueError("grid sizes must be at least 8")
        if self.cutoff_radius < 0.0:
            raise ValueError("cutoff_radius must be nonnegative")
        if self.extrapolation_levels not in (1, 2, 3):
            raise ValueError("extrapolation_levels must be 1, 2 or 3")


@dataclass(frozen=True)
class EnergyReport:
    value: float
    est_error: float
    cutoff_radius: float
    converged: bool


def _worker_count() -> int:
    raw = os.environ.get("CRLAB_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return max(1, n) if n > 0 else 1


def _axis_nodes(ax: ChartAxis, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights: uniform trapezoid without the duplicate
    endpoint on periodic axes, midpoint rule on open axes."""
    length = ax.hi - ax.lo
    if ax.periodic:
        x = ax.lo + length * np.arange(n) / n
        w = np.full(n, length / n)
    else:
        x = ax.lo + length * (np.arange(n) + 0.5) / n
        w = np.full(n, length / n)
    return x, w


def _resolve_density(family: SurfaceFamily, density):
    """Accept an engine field name or a callable of (N,2) param arrays."""
    if isinstance(density, str):
        batch = family.engine.batch_fn(density)
        # density fields live on ambient points; map the chart first
        import jax
        import jax.numpy as jnp
        chart_batch = jax.jit(jax.vmap(family.chart))

        def fn(uvs: np.ndarray) -> np.ndarray:
            pts = chart_batch(jnp.asarray(uvs, dtype=jnp.float64))
            return np.asarray(batch(pts))
        return fn
    if callable(density):
        return lambda uvs: np.asarray(density(uvs), dtype=float)
    raise TypeError("density must be a field name or a callable")


def _grid_value(family: SurfaceFamily, dens_fn, axes, n1: int, n2: int) -> float:
    x1, w1 = _axis_nodes(axes[0], n1)
    x2, w2 = _axis_nodes(axes[1], n2)
    uu, vv = np.meshgrid(x1, x2, indexing="ij")
    uvs = np.column_stack([uu.ravel(), vv.ravel()])
    weights = np.outer(w1, w2).ravel()

    workers = _worker_count()
    if workers == 1 or len(uvs) < 4 * workers:
        vals = dens_fn(uvs) * family.area_density_batch(uvs)
    else:
        chunks = np.array_split(np.arange(len(uvs)), workers)
        out = [None] * len(chunks)

        def run(i):
            idx = chunks[i]
            out[i] = dens_fn(uvs[idx]) * family.area_density_batch(uvs[idx])

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, range(len(chunks))))
        vals = np.concatenate(out)
    # np.sum uses pairwise summation: deterministic for a fixed ordering
    return float(np.sum(vals * weights))


def _refine(family: SurfaceFamily, dens_fn, axes, spec: QuadratureSpec):
    """Grid-doubling sequence with Richardson extrapolation.

    The lowest-order component is the midpoint rule (order 2), so the
    first elimination uses order 2 and subsequent ones order 4, 6.
    """
    levels = spec.extrapolation_levels
    vals = [_grid_value(family, dens_fn, axes, spec.n1 * 2 ** k, spec.n2 * 2 ** k)
            for k in range(levels + 1)]
    table = [vals]
    for j in range(1, levels + 1):
        fac = 4.0 ** j
        prev = table[-1]
        table.append([(fac * prev[i + 1] - prev[i]) / (fac - 1.0)
                      for i in range(len(prev) - 1)])
    best = table[-1][0]
    second = table[-2][-1] if len(table) >= 2 else vals[-1]
    err = abs(best - second)
    converged = err < REL_TOL * abs(best) + ABS_TOL
    return best, err, converged


def integrate(family: SurfaceFamily, density, spec: QuadratureSpec,
              quiet: bool = False) -> EnergyReport:
    """Integrate density * (theta ^ e1) over the family's chart.

    density is an engine field name (e.g. "da1", "da2", "v3", "one")
    or a callable mapping an (N, 2) array of chart parameters to N
    values.  With a positive cutoff_radius and a nonempty singular
    set, the integral is evaluated at excision radii {c, c/4, c/16}
    and Aitken-extrapolated; a non-shrinking difference sequence is
    reported as converged=False.
    """
    dens_fn = _resolve_density(family, density)
    sing = family.singular_set()

    if spec.cutoff_radius <= 0.0 or sing.empty:
        axes = family.quad_axes(spec.cutoff_radius)
        value, err, converged = _refine(family, dens_fn, axes, spec)
        if not converged and not quiet:
            warnings.warn(f"quadrature not converged (est_error {err:.3e})",
                          NonconvergenceWarning, stacklevel=2)
        return EnergyReport(value, err, spec.cutoff_radius, converged)

    cuts = [spec.cutoff_radius, spec.cutoff_radius / 4.0,
            spec.cutoff_radius / 16.0]
    seq = []
    errs = []
    for c in cuts:
        axes = family.quad_axes(c)
        v, e, _ = _refine(family, dens_fn, axes, spec)
        seq.append(v)
        errs.append(e)
    d1, d2 = seq[1] - seq[0], seq[2] - seq[1]
    shrinking = abs(d2) < 0.75 * abs(d1) or abs(d2) < ABS_TOL + REL_TOL * abs(seq[2])
    if not shrinking:
        if not quiet:
            warnings.warn(
                "cutoff sequence not converging "
                f"(values {seq[0]:.6e}, {seq[1]:.6e}, {seq[2]:.6e})",
                NonconvergenceWarning, stacklevel=2)
        return EnergyReport(seq[2], abs(d2), cuts[2], False)
    if abs(d1 - d2) > 0.0:
        value = seq[2] + d2 * d2 / (d1 - d2)
    else:
        value = seq[2]
    err = max(abs(value - seq[2]), max(errs))
    converged = abs(d2) < REL_TOL * max(1.0, abs(value)) * 1e4 or \
        err < REL_TOL * abs(value) + ABS_TOL
    return EnergyReport(value, err, cuts[2], converged)


# ---------------------------------------------------------------------------
# Integration-by-parts identities for tangential derivatives
# ---------------------------------------------------------------------------

def _tangential_derivative_fns(family: SurfaceFamily, which: str):
    """e1 or V as a derivation on chart-parameter functions, obtained by
    solving the 2x2 pushforward system at each point (exact via AD)."""
    import jax
    import jax.numpy as jnp
    vec_name = "_e1_vec" if which == "e1" else "_v_vec"
    vec = family.engine.fields[vec_name]
    chart = family.chart

    def coeffs(uv):
        p = chart(uv)
        tan = jax.jacfwd(chart)(uv)  # (3, 2)
        gram = tan.T @ tan
        rhs = tan.T @ vec(p)
        return jnp.linalg.solve(gram, rhs)

    def derive(f):
        def df(uv):
            return jax.jvp(f, (uv,), (coeffs(uv),))[1]
        return df

    return derive


def ibp_check(family: SurfaceFamily, f1, f2, spec: QuadratureSpec,
              support_tol: float = 1e-12):
    """Both sides of the tangential integration-by-parts identities

        int f1 e1(f2)  = -int [e1(f1) + 2 alpha f1] f2
        int f1 V(f2)   = -int [V(f1) - alpha H f1] f2

    against theta ^ e1.  f1, f2 are jax-traceable functions of the
    chart parameter pair and must be supported away from the chart
    boundary and any excised region.
    """
    import jax
    import jax.numpy as jnp

    axes = family.quad_axes(spec.cutoff_radius)
    # support check: product must vanish on the non-periodic boundary
    # and on the excision ring
    for i, ax in enumerate(axes):
        for edge in (ax.lo, ax.hi):
            if ax.periodic:
                continue
            other = axes[1 - i]
            ts = np.linspace(other.lo, other.hi, 33)
            for t in ts:
                uv = jnp.asarray([edge, t] if i == 0 else [t, edge])
                if abs(float(f1(uv))) > support_tol or \
                        abs(float(f2(uv))) > support_tol:
                    raise SupportError(
                        f"test function support touches chart edge at {uv}")

    d_e1 = _tangential_derivative_fns(family, "e1")
    d_v = _tangential_derivative_fns(family, "V")
    alpha = family.engine.fields["alpha"]
    h_fld = family.engine.fields["H"]
    chart = family.chart

    e1_f1, e1_f2 = d_e1(f1), d_e1(f2)
    v_f1, v_f2 = d_v(f1), d_v(f2)

    def make(fn):
        b = jax.jit(jax.vmap(fn))
        return lambda uvs: np.asarray(b(jnp.asarray(uvs, dtype=jnp.float64)))

    pair_e1 = (
        make(lambda uv: f1(uv) * e1_f2(uv)),
        make(lambda uv: -(e1_f1(uv) + 2.0 * alpha(chart(uv)) * f1(uv)) * f2(uv)),
    )
    pair_v = (
        make(lambda uv: f1(uv) * v_f2(uv)),
        make(lambda uv: -(v_f1(uv) - alpha(chart(uv)) * h_fld(chart(uv)) * f1(uv)) * f2(uv)),
    )

    out = []
    for lhs_fn, rhs_fn in (pair_e1, pair_v):
        lhs = integrate(family, lhs_fn, spec, quiet=True).value
        rhs = integrate(family, rhs_fn, spec, quiet=True).value
        out.append((lhs, rhs))
    return tuple(out)
