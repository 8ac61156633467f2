#!/usr/bin/env python3
"""Scan the dilation-invariant cones t = c r^2 in the Heisenberg group
for the parameter where the CR-invariant curvature Hcr vanishes and,
optionally, where the second-energy residual crosses zero.  Both roots
sit at c = sqrt(3)/2.

Usage: python3 scripts/cone_critical_scan.py [--target Hcr|ResidualE2]
"""

import argparse
import math

import numpy as np

from crlab import QuadratureSpec, RotationalHeis, scan_family


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--target", choices=("Hcr", "ResidualE2"), default="Hcr")
    ap.add_argument("--lo", type=float, default=0.5)
    ap.add_argument("--hi", type=float, default=1.2)
    ap.add_argument("--n", type=int, default=15)
    args = ap.parse_args()

    gen = lambda c: RotationalHeis("dilation_cone", c=c)
    scan = scan_family(gen, np.linspace(args.lo, args.hi, args.n),
                       args.target, QuadratureSpec(n1=16, n2=16))

    print(f"{'c':>10} {args.target:>16}")
    for c, v in zip(scan.parameter_grid, scan.values):
        print(f"{c:10.5f} {v:16.8e}")
    target = math.sqrt(3.0) / 2.0
    for c in scan.critical_params:
        print(f"critical c = {c:.15f}  (sqrt(3)/2 deviation {c - target:+.2e})")
    if not scan.critical_params:
        print("no critical parameter found in the scanned range")


if __name__ == "__main__":
    main()
