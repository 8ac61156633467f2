"""Command-line front end.

Subcommands
    invariants SURFACE --at u,v          pointwise jet and densities
    energy SURFACE --which e1|e2         surface energy by quadrature
    residual SURFACE --which e1|e2 --at u,v
    yamabe SURFACE                       expansion table + renorm summary
    renorm SURFACE --eps-list ...        direct volume fit
    scan --family ... --target ...       one-parameter critical scan
    variation-check SURFACE --target ... finite-difference first variation
    verify [--filter NAME]               replay the closed-form oracles

SURFACE is a path to a JSON document or an inline JSON string with
"schema": 1 (see surfaces.family_from_json).  Exit codes: 0 success,
1 input error, 2 numerical failure under --strict (and any oracle
failure for verify).  JSON numbers are emitted with 17 significant
digits and sorted keys, so repeated runs are byte-identical;
numerical warnings go to stderr as structured JSON lines.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings

import numpy as np

from . import energy as energy_mod
from . import invariants as inv_mod
from . import surfaces as surf_mod
from . import varcheck as var_mod
from . import yamabe as yam_mod
from .errors import CrlabError, HcrZeroError
from .oracles import run_oracles


# ---------------------------------------------------------------------------
# Deterministic serialization
# ---------------------------------------------------------------------------

def format_float(x: float) -> str:
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    if x == 0.0:
        return "0"
    return format(float(x), ".17g")


def dumps(obj, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits and sorted keys."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for k in sorted(obj):
            items.append(f'{pad}  {json.dumps(str(k))}: {dumps(obj[k], indent + 1)}')
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {dumps(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    return json.dumps(str(obj))


def emit_json(obj, stream=None) -> None:
    print(dumps(obj), file=stream or sys.stdout)


def emit_csv(header, rows, stream=None) -> None:
    out = stream or sys.stdout
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL)
    writer.writerow(header)
    for row in rows:
        writer.writerow([format(v, ".17g") if isinstance(v, float) else v
                         for v in row])
    out.write(buf.getvalue())


def _warn_to_stderr(record) -> None:
    for w in record:
        print(dumps({"warning": str(w.message),
                     "category": w.category.__name__}), file=sys.stderr)


# ---------------------------------------------------------------------------
# Argument plumbing
# ---------------------------------------------------------------------------

def _load_surface(text: str) -> surf_mod.SurfaceFamily:
    raw = text.strip()
    if not raw.startswith("{"):
        if not os.path.exists(raw):
            raise ValueError(f"surface spec file not found: {raw}")
        with open(raw, encoding="utf-8") as fh:
            raw = fh.read()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValueError(f"surface spec is not valid JSON: {exc}") from exc
    return surf_mod.family_from_json(doc)


def _parse_at(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError("--at expects 'u,v'")
    return float(parts[0]), float(parts[1])


def _quad_spec(args) -> energy_mod.QuadratureSpec:
    n1, n2 = args.grid
    return energy_mod.QuadratureSpec(n1=n1, n2=n2,
                                     cutoff_radius=args.cutoff,
                                     extrapolation_levels=args.levels)


def _grid_arg(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ValueError("--grid expects 'N1xN2'")
    return int(parts[0]), int(parts[1])


def _scan_grid(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("--grid expects 'lo:hi:n'")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    return np.linspace(lo, hi, n)


SCAN_FAMILIES = {
    "dilation_cone": lambda c: surf_mod.RotationalHeis("dilation_cone", c=c),
    "shifted_sphere": lambda lam: surf_mod.RotationalHeis(
        "shifted_sphere", rho0=1.0, lam=lam),
    "torus_s3": lambda rho1: surf_mod.TorusS3(rho1),
}


# ---------------------------------------------------------------------------
# Subcommand handlers (return exit code)
# ---------------------------------------------------------------------------

def _cmd_invariants(args) -> int:
    family = _load_surface(args.surface)
    u, v = _parse_at(args.at)
    p = family.point(u, v)
    jet = inv_mod.jet_at(family, p)
    res = inv_mod.el_residuals(family, p)
    out = {
        "surface": family.json_spec() if _has_spec(family) else None,
        "at": [u, v],
        "jet": {name: getattr(jet, name) for name in inv_mod.JET_FIELDS},
        "hcr": res.hcr,
        "da1": inv_mod.da1_density(jet),
        "da2": inv_mod.da2_density(jet),
        "epsilon1": res.epsilon1,
        "epsilon2": res.epsilon2,
    }
    if args.output == "csv":
        keys = sorted(k for k in out if k not in ("surface", "at", "jet"))
        jet_keys = list(inv_mod.JET_FIELDS)
        header = ["u", "v"] + jet_keys + keys
        row = [u, v] + [getattr(jet, k) for k in jet_keys] + \
            [math.nan if out[k] is None else out[k] for k in keys]
        emit_csv(header, [row])
    else:
        emit_json(out)
    return 0


def _has_spec(family) -> bool:
    try:
        family.json_spec()
        return True
    except NotImplementedError:
        return False


def _cmd_energy(args) -> int:
    family = _load_surface(args.surface)
    spec = _quad_spec(args)
    dens = "da1" if args.which == "e1" else "da2"
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        report = energy_mod.integrate(family, dens, spec)
    _warn_to_stderr(rec)
    emit_json({
        "which": args.which,
        "value": report.value,
        "est_error": report.est_error,
        "cutoff_radius": report.cutoff_radius,
        "converged": report.converged,
    })
    if args.strict and not report.converged:
        return 2
    return 0


def _cmd_residual(args) -> int:
    family = _load_surface(args.surface)
    u, v = _parse_at(args.at)
    p = family.point(u, v)
    if args.which == "e1":
        try:
            value = inv_mod.el_residual_e1(family, p)
        except HcrZeroError as exc:
            emit_json({"which": "e1", "at": [u, v], "value": None,
                       "reason": str(exc)})
            return 2 if args.strict else 0
    else:
        value = inv_mod.el_residual_e2(family, p)
    emit_json({"which": args.which, "at": [u, v], "value": value})
    return 0


def _cmd_yamabe(args) -> int:
    family = _load_surface(args.surface)
    spec = _quad_spec(args)
    ax1, ax2 = family.quad_axes(max(args.cutoff, 1e-3))
    n1, n2 = args.table_grid
    us = np.linspace(ax1.lo, ax1.hi, n1, endpoint=not ax1.periodic)
    lo2 = ax2.lo if ax2.periodic else ax2.lo + (ax2.hi - ax2.lo) / (2 * n2)
    hi2 = ax2.hi if ax2.periodic else ax2.hi - (ax2.hi - ax2.lo) / (2 * n2)
    vs = np.linspace(lo2, hi2, n2, endpoint=not ax2.periodic)
    rows = []
    for u in us:
        for v in vs:
            p = family.point(float(u), float(v))
            cv, cw, cz, cl = yam_mod.expansion_coeffs(family, p)
            v1, v2, v3 = yam_mod.volume_densities(family, p)
            rows.append([float(u), float(v), cv, cw, cz, cl, v1, v2, v3])
    header = ["u", "v", "v_coeff", "w", "z", "l", "v1", "v2", "v3"]
    if args.output == "csv":
        emit_csv(header, rows)
        return 0
    coeffs = yam_mod.renorm_coefficients(family, spec)
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        e2 = energy_mod.integrate(family, "da2", spec).value
    _warn_to_stderr(rec)
    emit_json({
        "table": {"header": header,
                  "rows": [[float(x) for x in r] for r in rows]},
        "c0": coeffs.c0, "c1": coeffs.c1, "c2": coeffs.c2, "L": coeffs.L,
        "E2": e2,
        "fit": None,
    })
    return 0


def _cmd_renorm(args) -> int:
    family = _load_surface(args.surface)
    spec = _quad_spec(args)
    eps_list = ([float(x) for x in args.eps_list.split(",")]
                if args.eps_list else yam_mod.default_eps_list())
    fit = yam_mod.direct_volume_fit(family, eps_list, spec,
                                    rho_max=args.rho_max)
    coeffs = yam_mod.renorm_coefficients(family, spec)
    emit_json({
        "fit": {"c0": fit.c0_fit, "c1": fit.c1_fit, "c2": fit.c2_fit,
                "L": fit.L_fit, "V0": fit.V0_fit,
                "residual_norm": fit.residual_norm,
                "eps_range": list(fit.eps_range)},
        "closed_form": {"c0": coeffs.c0, "c1": coeffs.c1,
                        "c2": coeffs.c2, "L": coeffs.L},
    })
    return 0


def _cmd_scan(args) -> int:
    if args.family not in SCAN_FAMILIES:
        raise ValueError(f"--family must be one of {sorted(SCAN_FAMILIES)}")
    gen = SCAN_FAMILIES[args.family]
    grid = _scan_grid(args.grid)
    n1, n2 = args.grid_quad
    spec = energy_mod.QuadratureSpec(n1=n1, n2=n2)
    scan = var_mod.scan_family(gen, grid, args.target, spec)
    if args.output == "csv":
        emit_csv(["param", "value"],
                 [[float(c), float(v)] for c, v in zip(scan.parameter_grid,
                                                       scan.values)])
        return 0
    emit_json({
        "family": args.family,
        "target": args.target,
        "parameter_grid": [float(c) for c in scan.parameter_grid],
        "values": [float(v) for v in scan.values],
        "critical_params": [float(c) for c in scan.critical_params],
        "minima": [[float(c), float(v)] for c, v in scan.minima],
        "errors": [[float(c), msg] for c, msg in scan.errors],
    })
    return 0


def _cmd_variation_check(args) -> int:
    family = _load_surface(args.surface)
    ax1, ax2 = family.chart_axes()
    center = (args.bump_center if args.bump_center is not None
              else (0.5 * (ax1.lo + ax1.hi), 0.5 * (ax2.lo + ax2.hi)))
    periods = (ax1.hi - ax1.lo if ax1.periodic else None,
               ax2.hi - ax2.lo if ax2.periodic else None)
    radius = args.bump_radius
    f = var_mod.bump(center, radius, periods)
    g = var_mod.zero_fn
    steps = [float(s) for s in args.steps.split(",")]
    n1, n2 = args.grid
    spec = energy_mod.QuadratureSpec(n1=n1, n2=n2)
    check = var_mod.first_variation_check(family, f, g, steps,
                                          target=args.target, spec=spec)
    rel = check.mismatch / max(1.0, abs(check.formula_derivative))
    emit_json({
        "target": args.target,
        "fd_derivative": check.fd_derivative,
        "formula_derivative": check.formula_derivative,
        "mismatch": check.mismatch,
        "relative_mismatch": rel,
        "step": check.step,
        "steps": list(check.steps),
        "mismatches": list(check.mismatches),
        "pass": bool(rel <= var_mod.TOL_VAR),
    })
    return 0 if rel <= var_mod.TOL_VAR or not args.strict else 2


def _cmd_verify(args) -> int:
    records = run_oracles(args.filter)
    n_fail = 0
    for rec in records:
        status = "PASS" if rec["pass"] else "FAIL"
        n_fail += 0 if rec["pass"] else 1
        emit_json(rec)
        print(f"{status} {rec['name']}: computed {format_float(rec['computed'])}, "
              f"expected {format_float(rec['expected'])} ({rec['where']})")
    print(f"{len(records) - n_fail}/{len(records)} oracles passed")
    return 0 if records and n_fail == 0 else 1


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crlab",
        description="Invariant surface energies, Euler-Lagrange residuals "
                    "and singular Yamabe expansions on model "
                    "pseudohermitian 3-manifolds.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_quad(p, default_grid="64x64"):
        p.add_argument("--grid", type=_grid_arg, default=_grid_arg(default_grid),
                       help="quadrature grid N1xN2 (default %(default)s)")
        p.add_argument("--cutoff", type=float, default=0.0,
                       help="singular-set excision radius")
        p.add_argument("--levels", type=int, default=2,
                       help="Richardson extrapolation levels (1-3)")

    p = sub.add_parser("invariants", help="pointwise jet and densities")
    p.add_argument("surface")
    p.add_argument("--at", required=True, help="chart point 'u,v'")
    p.add_argument("--output", choices=("json", "csv"), default="json")
    p.set_defaults(fn=_cmd_invariants)

    p = sub.add_parser("energy", help="surface energy by quadrature")
    p.add_argument("surface")
    p.add_argument("--which", choices=("e1", "e2"), required=True)
    p.add_argument("--strict", action="store_true",
                   help="exit 2 if the quadrature did not converge")
    add_quad(p)
    p.set_defaults(fn=_cmd_energy)

    p = sub.add_parser("residual", help="Euler-Lagrange residual at a point")
    p.add_argument("surface")
    p.add_argument("--which", choices=("e1", "e2"), required=True)
    p.add_argument("--at", required=True)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(fn=_cmd_residual)

    p = sub.add_parser("yamabe", help="expansion coefficients and renorm summary")
    p.add_argument("surface")
    p.add_argument("--output", choices=("json", "csv"), default="json")
    p.add_argument("--table-grid", type=_grid_arg, default=(8, 8),
                   help="points in the per-point coefficient table")
    add_quad(p)
    p.set_defaults(fn=_cmd_yamabe)

    p = sub.add_parser("renorm", help="direct volume integration and fit")
    p.add_argument("surface")
    p.add_argument("--eps-list", default=None,
                   help="comma-separated decreasing eps values")
    p.add_argument("--rho-max", type=float, default=None)
    add_quad(p, default_grid="32x32")
    p.set_defaults(fn=_cmd_renorm)

    p = sub.add_parser("scan", help="one-parameter family scan")
    p.add_argument("--family", required=True,
                   choices=sorted(SCAN_FAMILIES))
    p.add_argument("--target", required=True, choices=var_mod.SCAN_TARGETS)
    p.add_argument("--grid", required=True, help="'lo:hi:n'")
    p.add_argument("--grid-quad", type=_grid_arg, default=(16, 16))
    p.add_argument("--output", choices=("json", "csv"), default="json")
    p.set_defaults(fn=_cmd_scan)

    p = sub.add_parser("variation-check",
                       help="finite-difference first-variation check")
    p.add_argument("surface")
    p.add_argument("--target", choices=("E1", "E2"), default="E2")
    p.add_argument("--steps", default="1e-2,5e-3,2.5e-3")
    p.add_argument("--bump-center", type=_parse_at, default=None)
    p.add_argument("--bump-radius", type=float, default=1.0)
    p.add_argument("--grid", type=_grid_arg, default=(48, 48))
    p.add_argument("--strict", action="store_true")
    p.set_defaults(fn=_cmd_variation_check)

    p = sub.add_parser("verify", help="replay the closed-form oracles")
    p.add_argument("--filter", default=None)
    p.set_defaults(fn=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the contract is 1
        return 0 if exc.code in (0, None) else 1
    try:
        return args.fn(args)
    except (ValueError, OSError, CrlabError) as exc:
        print(dumps({"error": f"{type(exc).__name__}: {exc}"}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
