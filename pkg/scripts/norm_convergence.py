#!/usr/bin/env python3
"""Convergence table for the coefficient-only norm estimate.

Takes g = U + U* on a unit-weight shift and prints, for each recorded
doubling step k, the lower bound s_k, the theoretical upper envelope
(4kn+1)^{1/4k} s_k, and the gap to the dense operator norm.  The dim-4
case converges toward 2 cos(pi/5).
"""

import argparse

import numpy as np

import polarkit as pk


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=4)
    ap.add_argument("--kmax", type=int, default=64)
    args = ap.parse_args()

    a = pk.build(pk.weighted_shift((1.0,) * (args.dim - 1)))
    model = pk.graded_model_for(a)
    p1 = model.range_projection(1)
    g = model.element({-1: p1, 1: p1}, enforce_support=True)
    dense = pk.operator_norm(pk.realize(g))
    est = pk.norm_estimate(g, kmax=args.kmax)

    print(f"g = U + U* on the dim-{args.dim} unit-weight shift")
    print(f"dense operator norm: {dense:.12f}")
    if args.dim == 4:
        print(f"2 cos(pi/5)        : {2.0 * np.cos(np.pi / 5.0):.12f}")
    print()
    print(f"{'k':>5} {'s_k (lower)':>16} {'upper':>16} {'dense - s_k':>14}")
    for k, s_k in est.estimates:
        upper = est.upper_bound(k, s_k)
        print(f"{k:>5} {s_k:>16.12f} {upper:>16.12f} {dense - s_k:>14.3e}")
    print()
    rel = abs(est.final - dense) / dense
    print(f"final estimate {est.final:.12f} (relative gap {rel:.3e})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
