"""Command-line front end.

Subcommands: polar-decompose, verify-relation, verify-theorems, tower,
norm-estimate, normal-order, algebra-info, run-suite.  Every command
prints a text summary by default (--report json switches stdout to the
canonical JSON form) and can additionally write the JSON to --out.

Exit status: 0 when every reported check passed, 1 when a mathematical
check failed, 2 for configuration or parse problems.  The default
tolerance is 1e-9, overridable by the POLARKIT_TOL environment variable
and per call by --tol.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

import numpy as np

from .errors import (
    ConfigError,
    DimensionTooSmall,
    InvalidSpec,
    ParseError,
    PolarkitError,
    UnsupportedPhi,
)
from .graded import norm_estimate, realize
from .isometry import partial_isometry_report
from .linalg import DEFAULT_TOL, operator_norm, polar_decompose
from .models import build
from .relation import (
    build_calB,
    coefficient_algebra,
    graded_model_for,
    theorem22_report,
    verify_I1,
)
from .report import config_from_json, report_to_text, run_suite
from .serialize import (
    dumps_canonical,
    load_json,
    matrix_from_json,
    matrix_to_json,
    model_spec_from_json,
    normal_form_to_json,
    read_matrix,
)
from .words import PhiMap, deg, normal_order, parse_word

CONFIG_ERRORS = (ConfigError, ParseError, InvalidSpec, UnsupportedPhi, DimensionTooSmall)


def _default_tol() -> float:
    raw = os.environ.get("POLARKIT_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError as exc:
        raise ConfigError(f"POLARKIT_TOL is not a number: {raw!r}") from exc
    if tol <= 0:
        raise ConfigError(f"POLARKIT_TOL must be positive, got {raw!r}")
    return tol


def _add_common(p: argparse.ArgumentParser, with_input: bool = True) -> None:
    p.add_argument("--tol", type=float, default=None, help="tolerance (default 1e-9)")
    p.add_argument("--kmax", type=int, default=64, help="norm-estimate exponent bound")
    p.add_argument("--seed", type=int, default=0, help="seed for random sampling")
    p.add_argument(
        "--report", choices=("json", "text"), default="text", help="stdout format"
    )
    p.add_argument("--out", default=None, help="also write the JSON report here")
    if with_input:
        p.add_argument("--in", dest="infile", default=None, help="matrix JSON file")
        p.add_argument(
            "--model",
            default=None,
            help="model spec: a JSON file path, or an inline JSON object",
        )


def _resolve_tol(args) -> float:
    return args.tol if args.tol is not None else _default_tol()


def _load_model_obj(text: str):
    if text.lstrip().startswith("{"):
        import json

        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"inline model spec is not valid JSON: {exc.msg}") from exc
    return load_json(text)


def _load_operator(args) -> np.ndarray:
    if getattr(args, "model", None):
        spec = model_spec_from_json(_load_model_obj(args.model))
        return build(spec)
    if getattr(args, "infile", None):
        return read_matrix(args.infile)
    raise ConfigError("need --in MATRIX.json or --model SPEC")


def _emit(args, payload: dict, text: str) -> None:
    if args.report == "json":
        sys.stdout.write(dumps_canonical(payload))
    else:
        sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dumps_canonical(payload))


def _cmd_polar_decompose(args) -> int:
    tol = _resolve_tol(args)
    a = _load_operator(args)
    pd = polar_decompose(a, tol=tol)
    rep = partial_isometry_report(pd.u, tol=tol)
    ok = pd.residual <= tol * (1.0 + operator_norm(a)) and rep.passed and rep.consistent
    payload = {
        "u": matrix_to_json(pd.u),
        "pos": matrix_to_json(pd.pos),
        "rank": pd.rank,
        "residual": pd.residual,
        "conditions": [
            {"name": c.name, "residual": c.residual, "pass": c.passed}
            for c in rep.conditions
        ],
        "pass": bool(ok),
    }
    lines = [
        f"factorization residual {pd.residual:.3e} (rank {pd.rank})",
    ]
    for c in rep.conditions:
        lines.append(
            f"[{'PASS' if c.passed else 'FAIL'}] {c.name} (residual {c.residual:.3e})"
        )
    lines.append("polar decomposition verified" if ok else "POLAR CHECK FAILED")
    _emit(args, payload, "\n".join(lines) + "\n")
    return 0 if ok else 1


def _cmd_verify_relation(args) -> int:
    tol = _resolve_tol(args)
    a = _load_operator(args)
    cert = verify_I1(a, tol=tol)
    payload = {
        "holds": cert.holds,
        "membership_residual": cert.membership_residual,
        "conjugate_holds": cert.conjugate_holds,
        "conjugate_residual": cert.conjugate_residual,
        "gamma_table": [[ev, val] for ev, val in cert.gamma_table],
        "offending_eigenvalue": cert.offending_eigenvalue,
    }
    lines = [
        f"aa* in C*(1, a*a): {'yes' if cert.holds else 'NO'}"
        f" (residual {cert.membership_residual:.3e})",
        f"U|a|U* in C*(1, |a|): {'yes' if cert.conjugate_holds else 'NO'}"
        f" (residual {cert.conjugate_residual:.3e})",
    ]
    if cert.holds:
        pairs = ", ".join(f"{ev:.6g} -> {val:.6g}" for ev, val in cert.gamma_table)
        lines.append(f"spectral map: {pairs}")
    elif cert.offending_eigenvalue is not None:
        lines.append(
            f"eigenspace of a*a at {cert.offending_eigenvalue:.6g} carries "
            "inconsistent aa* values"
        )
    _emit(args, payload, "\n".join(lines) + "\n")
    return 0 if cert.holds else 1


def _cmd_verify_theorems(args) -> int:
    tol = _resolve_tol(args)
    a = _load_operator(args)
    cert = verify_I1(a, tol=tol)
    if not cert.holds:
        payload = {
            "pass": False,
            "error": "defining relation fails",
            "membership_residual": cert.membership_residual,
        }
        _emit(
            args,
            payload,
            f"defining relation fails (residual {cert.membership_residual:.3e})\n",
        )
        return 1
    rep = theorem22_report(a, tol=tol)
    payload = {
        "kmax": rep.kmax,
        "checks": [
            {"name": c.name, "residual": c.residual, "pass": c.passed}
            for c in rep.checks
        ],
        "pass": rep.passed,
    }
    lines = [
        f"[{'PASS' if c.passed else 'FAIL'}] {c.name} (residual {c.residual:.3e})"
        for c in rep.checks
    ]
    lines.append("all structure checks passed" if rep.passed else "SOME CHECKS FAILED")
    _emit(args, payload, "\n".join(lines) + "\n")
    return 0 if rep.passed else 1


def _cmd_tower(args) -> int:
    tol = _resolve_tol(args)
    a = _load_operator(args)
    rep = coefficient_algebra(a, tol=tol)
    t = rep.tower
    checks = {}
    checks.update({f"tower.{k}": v for k, v in sorted(t.checks.items())})
    checks.update({f"theorem.{k}": v for k, v in sorted(rep.theorems.checks.items())})
    checks.update({f"structure.{k}": v for k, v in sorted(rep.structure.items())})
    payload = {
        "seed_dimension": t.a0.dimension,
        "forward_limit_dimension": t.a_inf.dimension,
        "star_limit_dimension": t.inf_a.dimension,
        "double_closure_dimension": t.inf_a_inf.dimension,
        "stabilization": dict(sorted(t.stabilization.items())),
        "weak_hypotheses": t.hypotheses.weak_holds,
        "strong_hypotheses": t.hypotheses.strong_holds,
        "checks": [
            {"name": k, "pass": ok, "residual": res} for k, (ok, res) in checks.items()
        ],
        "pass": rep.passed,
    }
    lines = [
        f"seed algebra dimension {t.a0.dimension}",
        f"forward limit dimension {t.a_inf.dimension}"
        f" (stabilizes at {t.stabilization.get('forward')})",
        f"star limit dimension {t.inf_a.dimension}"
        f" (stabilizes at {t.stabilization.get('star')})",
        f"double closure dimension {t.inf_a_inf.dimension}",
        f"hypotheses: weak={'yes' if t.hypotheses.weak_holds else 'no'}"
        f" strong={'yes' if t.hypotheses.strong_holds else 'no'}",
    ]
    for k, (ok, res) in checks.items():
        lines.append(f"[{'PASS' if ok else 'FAIL'}] {k} (residual {res:.3e})")
    lines.append("tower verified" if rep.passed else "SOME CHECKS FAILED")
    _emit(args, payload, "\n".join(lines) + "\n")
    return 0 if rep.passed else 1


def _cmd_norm_estimate(args) -> int:
    tol = _resolve_tol(args)
    a = _load_operator(args)
    model = graded_model_for(a, tol=tol)
    if args.element:
        obj = load_json(args.element)
        if not isinstance(obj, dict) or "coefficients" not in obj:
            raise ParseError("element file must be {'coefficients': {degree: matrix}}")
        coeffs = {
            int(d): matrix_from_json(m) for d, m in obj["coefficients"].items()
        }
        g = model.element(coeffs, enforce_support=True)
    else:
        p1 = model.range_projection(1)
        g = model.element({-1: p1, 1: p1}, enforce_support=True)
    est = norm_estimate(g, kmax=args.kmax)
    dense = operator_norm(realize(g))
    gap = abs(est.final - dense) / max(dense, 1e-300)
    env_ok = all(
        s_k <= dense + tol * (1.0 + dense)
        and dense <= est.upper_bound(k, s_k) + tol * (1.0 + dense)
        for k, s_k in est.estimates
    )
    payload = {
        "bandwidth": est.bandwidth,
        "prescale": est.prescale,
        "estimates": [
            {"k": k, "s_k": s_k, "upper": est.upper_bound(k, s_k)}
            for k, s_k in est.estimates
        ],
        "final": est.final,
        "dense_norm": dense,
        "relative_gap": gap,
        "pass": bool(env_ok),
    }
    lines = [f"bandwidth {est.bandwidth}, prescale {est.prescale:.6g}"]
    for k, s_k in est.estimates:
        lines.append(
            f"  k={k:<4d} s_k={s_k:.12g}  upper={est.upper_bound(k, s_k):.12g}"
        )
    lines.append(f"final estimate {est.final:.12g}")
    lines.append(f"dense norm     {dense:.12g}  (relative gap {gap:.3e})")
    lines.append("envelope holds" if env_ok else "ENVELOPE VIOLATED")
    _emit(args, payload, "\n".join(lines) + "\n")
    return 0 if env_ok else 1


def _cmd_normal_order(args) -> int:
    if args.exact:
        phi = PhiMap.affine(Fraction(args.q), Fraction(args.h))
    else:
        phi = PhiMap.affine(float(args.q), float(args.h))
    word = parse_word(args.word)
    nf = normal_order(word, phi)
    payload = normal_form_to_json(nf)
    text = (
        f"l={nf.l} m={nf.m} p={payload['p']}\n"
        f"deg {deg(word)} (normal form degree {nf.degree})\n"
    )
    _emit(args, payload, text)
    return 0


def _cmd_algebra_info(args) -> int:
    tol = _resolve_tol(args)
    a = _load_operator(args)
    rep = coefficient_algebra(a, tol=tol)
    algebra_b, graded_basis = build_calB(a, tol=tol)
    bandwidth = max((g.bandwidth for g in graded_basis), default=0)
    payload = {
        "dim": int(a.shape[0]),
        "seed_dimension": rep.tower.a0.dimension,
        "coefficient_dimension": rep.algebra.dimension,
        "full_algebra_dimension": algebra_b.dimension,
        "graded_bandwidth": bandwidth,
        "stabilization": dict(sorted(rep.tower.stabilization.items())),
    }
    text = (
        f"ambient dimension {payload['dim']}\n"
        f"seed algebra C*(1,|a|) dimension {payload['seed_dimension']}\n"
        f"coefficient algebra dimension {payload['coefficient_dimension']}\n"
        f"full algebra C*(1,|a|,U) dimension {payload['full_algebra_dimension']}\n"
        f"graded bandwidth {payload['graded_bandwidth']}\n"
    )
    _emit(args, payload, text)
    return 0


def _cmd_run_suite(args) -> int:
    obj = load_json(args.config)
    config = config_from_json(obj)
    if args.tol is not None or os.environ.get("POLARKIT_TOL"):
        config = type(config)(
            models=config.models,
            suites=config.suites,
            tol=_resolve_tol(args),
            kmax=config.kmax,
            seed=config.seed,
            output=config.output,
        )
    report = run_suite(config)
    out_path = args.out or config.output
    if args.report == "json":
        sys.stdout.write(dumps_canonical(report))
    else:
        sys.stdout.write(report_to_text(report))
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(dumps_canonical(report))
    return 0 if report["all_pass"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarkit",
        description="verification toolkit for operators with aa* a function of a*a",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("polar-decompose", help="factor a = U|a| and check U")
    _add_common(p)
    p.set_defaults(func=_cmd_polar_decompose)

    p = sub.add_parser("verify-relation", help="test aa* in C*(1, a*a)")
    _add_common(p)
    p.set_defaults(func=_cmd_verify_relation)

    p = sub.add_parser("verify-theorems", help="ten structural checks for U")
    _add_common(p)
    p.set_defaults(func=_cmd_verify_theorems)

    p = sub.add_parser("tower", help="build and certify the coefficient algebra")
    _add_common(p)
    p.set_defaults(func=_cmd_tower)

    p = sub.add_parser("norm-estimate", help="coefficient-only norm estimate")
    _add_common(p)
    p.add_argument(
        "--element",
        default=None,
        help="JSON file {'coefficients': {degree: matrix}}; default is U + U*",
    )
    p.set_defaults(func=_cmd_norm_estimate)

    p = sub.add_parser("normal-order", help="rewrite a word over {a, a*}")
    _add_common(p, with_input=False)
    p.add_argument("word", help="space-separated word, e.g. 'a a a*'")
    p.add_argument("--q", required=True, help="relation coefficient q")
    p.add_argument("--h", required=True, help="relation coefficient h")
    p.add_argument(
        "--exact", action="store_true", help="exact rational arithmetic for q, h"
    )
    p.set_defaults(func=_cmd_normal_order)

    p = sub.add_parser("algebra-info", help="dimensions of the generated algebras")
    _add_common(p)
    p.set_defaults(func=_cmd_algebra_info)

    p = sub.add_parser("run-suite", help="run verification suites from a config")
    _add_common(p, with_input=False)
    p.add_argument("--config", required=True, help="suite config JSON file")
    p.set_defaults(func=_cmd_run_suite)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CONFIG_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except PolarkitError as exc:
        sys.stderr.write(f"check failed: {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
