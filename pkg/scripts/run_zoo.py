#!/usr/bin/env python3
"""Run every verification suite over the standard model zoo.

Writes the canonical JSON report next to this script (or to --out) and
prints the text summary.  The zoo includes two negative controls (the
unit-weight shift and a Jordan block), so the run exits 1 by design;
pass --positive-only for a green run.
"""

import argparse
import sys

import polarkit as pk

ZOO = [
    {"kind": "weighted_shift", "weights": [1.0, 1.4142135623730951, 1.7320508075688772]},
    {"kind": "q_oscillator", "dim": 4, "q": 1.0, "h": 1.0},
    {"kind": "q_oscillator", "dim": 8, "q": 0.5, "h": 1.0},
    {"kind": "q_oscillator", "dim": 16, "q": 0.5, "h": 1.0},
    {"kind": "normal", "diag": [[1.0, 0.0], [2.0, 0.0], [0.0, 3.0]]},
]

NEGATIVE = [
    {"kind": "weighted_shift", "weights": [1.0, 1.0, 1.0]},
    {"kind": "jordan_block", "dim": 3},
]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="zoo_report.json")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--kmax", type=int, default=64)
    ap.add_argument("--positive-only", action="store_true")
    args = ap.parse_args()

    models = ZOO if args.positive_only else ZOO + NEGATIVE
    config = pk.config_from_json(
        {
            "models": models,
            "suites": ["polar", "isometry", "tower", "theorem22", "graded", "norm_formula", "words"],
            "seed": args.seed,
            "kmax": args.kmax,
        }
    )
    report = pk.run_suite(config)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(pk.report_to_json(report))
    sys.stdout.write(pk.report_to_text(report))
    print(f"\nreport written to {args.out}")
    return 0 if report["all_pass"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
