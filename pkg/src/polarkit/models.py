"""Concrete matrix models for operators with aa* a function of a*a.

The zoo covers the cases the rest of the package is exercised on:

* weighted_shift: a e_n = w_n e_{n+1}, zero on the top vector.  With
  strictly distinct positive weights the defining relation holds exactly
  in finite dimension.
* q_oscillator: the deformed oscillator a a* = q a*a + h, built so that
  a*a = diag(lambda_0, ..., lambda_{N-1}) with lambda_n = q lambda_{n-1} + h
  and lambda_0 = 0.  The truncation breaks the relation only at the top
  diagonal entry of a a*; the interior is exact.
* normal: a diagonal (hence normal) operator, the commuting base case.
* jordan_block: the unit-weight shift, a deliberate negative control
  whose a*a has a repeated eigenvalue carrying two different aa* values.
* custom: any explicit square matrix.

Shift models raise the index.  The q_oscillator lowers it instead (it
is the adjoint of the raising shift with weights sqrt(lambda_{n+1})):
that orientation is what makes a a* - q a*a - h vanish away from the
top index, with the single defective entry sitting at the top where
interior restrictions can excise it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpec
from .linalg import DEFAULT_TOL, as_matrix, dagger, hermitian_eig, operator_norm
from .words import PhiMap

KINDS = ("weighted_shift", "q_oscillator", "normal", "jordan_block", "custom")


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Declarative description of one zoo model."""

    kind: str
    dim: int
    weights: tuple = field(default=())
    q: float = 0.0
    h: float = 0.0
    diag: tuple = field(default=())
    matrix: object = None

    def label(self) -> str:
        if self.kind == "weighted_shift":
            return f"weighted_shift(dim={self.dim})"
        if self.kind == "q_oscillator":
            return f"q_oscillator(dim={self.dim}, q={self.q}, h={self.h})"
        if self.kind == "normal":
            return f"normal(dim={self.dim})"
        if self.kind == "jordan_block":
            return f"jordan_block(dim={self.dim})"
        return f"custom(dim={self.dim})"


def weighted_shift(weights) -> ModelSpec:
    w = tuple(float(x) for x in weights)
    return ModelSpec(kind="weighted_shift", dim=len(w) + 1, weights=w)


def q_oscillator(dim: int, q: float, h: float) -> ModelSpec:
    return ModelSpec(kind="q_oscillator", dim=int(dim), q=float(q), h=float(h))


def normal(diag) -> ModelSpec:
    d = tuple(complex(z) for z in diag)
    return ModelSpec(kind="normal", dim=len(d), diag=d)


def jordan_block(dim: int) -> ModelSpec:
    return ModelSpec(kind="jordan_block", dim=int(dim))


def custom(matrix) -> ModelSpec:
    m = as_matrix(matrix)
    return ModelSpec(kind="custom", dim=m.shape[0], matrix=m)


def q_lambda(dim: int, q: float, h: float) -> np.ndarray:
    """The sequence lambda_0 = 0, lambda_n = q lambda_{n-1} + h."""
    lam = np.zeros(dim)
    for n in range(1, dim):
        lam[n] = q * lam[n - 1] + h
    return lam


def _raising_shift(weights) -> np.ndarray:
    n = len(weights) + 1
    a = np.zeros((n, n), dtype=np.complex128)
    for i, w in enumerate(weights):
        a[i + 1, i] = w
    return a


def build(spec: ModelSpec) -> np.ndarray:
    """Materialize the model's matrix a."""
    if spec.kind == "weighted_shift" or spec.kind == "jordan_block":
        weights = spec.weights if spec.kind == "weighted_shift" else (1.0,) * (spec.dim - 1)
        if len(weights) == 0:
            raise InvalidSpec("shift needs at least one weight")
        if any(w <= 0 for w in weights):
            raise InvalidSpec("shift weights must be positive")
        return _raising_shift(weights)
    if spec.kind == "q_oscillator":
        if spec.dim < 2:
            raise InvalidSpec("q_oscillator needs dim >= 2")
        if spec.h <= 0:
            raise InvalidSpec("q_oscillator needs h > 0")
        lam = q_lambda(spec.dim, spec.q, spec.h)
        diffs = np.abs(lam[:, None] - lam[None, :])
        np.fill_diagonal(diffs, np.inf)
        if diffs.min() <= 1e-12:
            i, j = np.unravel_index(int(diffs.argmin()), diffs.shape)
            raise InvalidSpec(
                f"q_oscillator level values collide: lambda_{i} == lambda_{j} "
                f"= {lam[i]:.6g} (q={spec.q}, h={spec.h})"
            )
        return dagger(_raising_shift(np.sqrt(lam[1:])))
    if spec.kind == "normal":
        if spec.dim == 0:
            raise InvalidSpec("normal model needs at least one diagonal entry")
        return np.diag(np.asarray(spec.diag, dtype=np.complex128))
    if spec.kind == "custom":
        m = as_matrix(spec.matrix)
        if m.shape[0] != spec.dim:
            raise InvalidSpec(f"custom matrix is {m.shape[0]}x{m.shape[0]}, spec says dim {spec.dim}")
        return m
    raise InvalidSpec(f"unknown model kind {spec.kind!r}")


def phi_for(spec: ModelSpec) -> PhiMap:
    """The substitution map of the model's defining relation."""
    if spec.kind == "q_oscillator":
        return PhiMap.affine(spec.q, spec.h)
    from .errors import UnsupportedPhi

    raise UnsupportedPhi(f"model kind {spec.kind!r} has no affine relation")


def hamiltonian(spec: ModelSpec, d=()) -> tuple[np.ndarray, list[float]]:
    """H = a + a* + d(a*a) for a real-coefficient polynomial d.

    Returns the Hermitian matrix and its ascending spectrum.
    """
    a = build(spec)
    coeffs = tuple(d)
    if any(abs(complex(c).imag) > 0 for c in coeffs):
        raise InvalidSpec("hamiltonian polynomial must have real coefficients")
    n = a.shape[0]
    h = a + dagger(a)
    if coeffs:
        x = dagger(a) @ a
        acc = float(coeffs[-1]) * np.eye(n, dtype=np.complex128)
        for c in reversed(coeffs[:-1]):
            acc = acc @ x + float(c) * np.eye(n, dtype=np.complex128)
        h = h + acc
    defect = operator_norm(h - dagger(h))
    if defect > 1e-12 * (1.0 + operator_norm(h)):
        raise InvalidSpec(f"hamiltonian is not Hermitian (defect {defect:.3e})")
    w, _ = hermitian_eig(h)
    return h, [float(x) for x in w]


@dataclass(frozen=True)
class ModelValidation:
    """validate_model output.

    ``interior_residual`` and ``boundary_defect`` are only set for the
    q_oscillator kind: the first is the worst entry of aa* - q a*a - h
    away from the top index (must vanish), the second is the magnitude
    of the top diagonal entry, the truncation artifact (reported, not
    judged; it equals q lambda_{N-1} + h).
    """

    label: str
    certificate: object
    interior_residual: float | None = None
    boundary_defect: float | None = None

    @property
    def passed(self) -> bool:
        ok = bool(self.certificate.holds)
        if self.interior_residual is not None:
            ok = ok and self.interior_residual <= 1e-9
        return ok


def validate_model(spec: ModelSpec, tol: float = DEFAULT_TOL) -> ModelValidation:
    """Run the defining-relation check, plus the affine check for q models."""
    from .relation import verify_I1

    a = build(spec)
    cert = verify_I1(a, tol=tol)
    interior = None
    boundary = None
    if spec.kind == "q_oscillator":
        n = spec.dim
        r = a @ dagger(a) - spec.q * (dagger(a) @ a) - spec.h * np.eye(n)
        boundary = float(abs(r[n - 1, n - 1]))
        r = r.copy()
        r[n - 1, :] = 0.0
        r[:, n - 1] = 0.0
        interior = operator_norm(r)
    return ModelValidation(
        label=spec.label(),
        certificate=cert,
        interior_residual=interior,
        boundary_defect=boundary,
    )
