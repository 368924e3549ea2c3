"""Numeric core: dense complex matrices, spectral helpers, polar decomposition.

Matrices are plain ``numpy.ndarray`` objects of dtype complex128, shape
(n, n).  Nothing here mutates its arguments; every function returns fresh
arrays.  The rank decisions (what counts as "zero") are always made relative
to the largest singular value, with the cutoff factor exposed as ``tol``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian

DEFAULT_TOL = 1e-9


def as_matrix(m) -> np.ndarray:
    """Coerce input to a square complex128 matrix (no copy when possible)."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(m).conj().T


def frob(m: np.ndarray) -> float:
    """Frobenius norm (cheap; used for drop decisions, not for certificates)."""
    return float(np.linalg.norm(m))


def operator_norm(m) -> float:
    """Largest singular value.

    This is the reference norm for every certificate in the package: slower
    than a Frobenius bound but it is the quantity the inequalities are
    actually about.
    """
    a = np.asarray(m, dtype=np.complex128)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


def hermiticity_defect(m: np.ndarray) -> float:
    return operator_norm(m - dagger(m))


def hermitian_eig(m, tol: float = DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` ascending and ``v`` unitary,
    columns being eigenvectors.  Raises :class:`NotHermitian` when the
    Hermiticity defect exceeds ``tol * (1 + ||m||)``.  The input is
    symmetrized before calling LAPACK so the defect cannot leak into the
    eigenvectors.
    """
    a = as_matrix(m)
    defect = hermiticity_defect(a)
    scale = 1.0 + operator_norm(a)
    if defect > tol * scale:
        raise NotHermitian(f"hermiticity defect {defect:.3e} exceeds {tol:.1e} * {scale:.3e}")
    w, v = np.linalg.eigh((a + dagger(a)) / 2.0)
    return w, v


def hermitian_sqrt(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Positive square root of a positive semidefinite Hermitian matrix.

    Eigenvalues below ``-tol * (1 + ||m||)`` raise ``ValueError``; small
    negative round-off is clipped to zero.
    """
    w, v = hermitian_eig(m, tol=tol)
    scale = 1.0 + (abs(float(w[-1])) if w.size else 0.0)
    if w.size and float(w[0]) < -tol * scale:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ dagger(v)


def eig_groups(w: np.ndarray, gap_tol: float) -> list[np.ndarray]:
    """Partition ascending eigenvalues into clusters separated by > gap_tol.

    Returns index arrays.  Transitive grouping: a chain of sub-tolerance
    gaps ends up in one cluster, which is the behaviour we want when
    deciding whether an operator can tell two eigenvalues apart.
    """
    groups: list[np.ndarray] = []
    if w.size == 0:
        return groups
    start = 0
    for i in range(1, w.size):
        if w[i] - w[i - 1] > gap_tol:
            groups.append(np.arange(start, i))
            start = i
    groups.append(np.arange(start, w.size))
    return groups


@dataclass(frozen=True)
class PolarDecomposition:
    """Result of ``polar_decompose``: a = u @ pos with u a partial isometry.

    ``pos`` is the positive factor (a*a)^(1/2); ``u`` is isometric on the
    closure of the range of ``pos`` and zero on its kernel.  ``rank`` is the
    number of singular values kept, ``cutoff`` the threshold they were
    compared against, ``residual`` the operator norm of a - u @ pos.
    """

    u: np.ndarray
    pos: np.ndarray
    rank: int
    cutoff: float
    residual: float


def polar_decompose(a, tol: float = DEFAULT_TOL) -> PolarDecomposition:
    """Polar decomposition a = U |a| with the partial-isometry convention.

    Computed via SVD: a = W diag(s) V*.  Singular values at or below
    ``tol * max(s)`` are treated as exactly zero, so U annihilates the
    corresponding right singular vectors instead of acting unitarily there.
    ``|a| = V diag(s) V*`` keeps the small singular values (the positive
    factor does not need a rank decision).
    """
    m = as_matrix(a)
    w, s, vh = np.linalg.svd(m)
    smax = float(s[0]) if s.size else 0.0
    cutoff = tol * smax
    keep = s > cutoff
    rank = int(np.count_nonzero(keep))
    u = (w[:, keep]) @ vh[keep, :]
    pos = dagger(vh) @ (s[:, None] * vh)
    pos = (pos + dagger(pos)) / 2.0
    residual = operator_norm(m - u @ pos)
    return PolarDecomposition(u=u, pos=pos, rank=rank, cutoff=cutoff, residual=residual)


def rough_norm(m, iters: int = 50) -> float:
    """Power-iteration estimate of the operator norm.

    Deterministic: the start vector is a fixed pseudorandom draw (PCG64,
    seed 0) so repeated runs agree to the bit.  Used where a cheap scale
    guess is wanted without consulting the SVD oracle; accuracy of a few
    percent is enough for its callers.
    """
    a = as_matrix(m)
    n = a.shape[0]
    if n == 0:
        return 0.0
    rng = np.random.Generator(np.random.PCG64(0))
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    ah = dagger(a)
    est = 0.0
    for _ in range(iters):
        w = ah @ (a @ v)
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        est = nw
        v = w / nw
    return float(np.sqrt(est))
