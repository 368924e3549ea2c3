"""Graded (banded) elements over a partial isometry and their norm calculus.

An element of the algebra generated by a commutative coefficient algebra A
and a partial isometry U is stored as a finite sum

    b  =  U*^n beta_{-n} + ... + U* beta_{-1} + beta_0 + beta_1 U + ... + beta_n U^n

with every beta_d in A and beta_{+-d} supported under the range projection
P_d = U^d U*^d (P_d beta = beta P_d = beta).  Degree bookkeeping makes the
product of two such elements again graded, with the degree-d coefficient
assembled from the push-through identities U alpha = delta(alpha) U and
alpha U* = U* delta(alpha); those identities are exact precisely when the
coefficients commute with the power projections of U, which is the model
hypothesis the ring-homomorphism tests exercise.

The degree-0 coefficient functional N_0 is the whole point: the norm of b
is recovered from coefficients alone through

    ||b|| = lim_k || N_0[ (b b*)^{2k} ] ||^{1/4k}

with the bracketing s_k <= ||b|| <= (4kn+1)^{1/4k} s_k for bandwidth n.
``norm_estimate`` implements this with repeated graded squaring and
pre-scaling; ``gauge_average_N0`` is the independent averaging oracle for
N_0 on shift models.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import MatrixAlgebra, contains
from .errors import (
    BandwidthOverflow,
    ModelMismatch,
    ModelNotGraded,
    SupportViolation,
    ZeroElement,
)
from .linalg import (
    DEFAULT_TOL,
    as_matrix,
    dagger,
    hermitian_sqrt,
    operator_norm,
    rough_norm,
)
from .tower import EndoPair, endo_pair

# Coefficients with norm at or below this (relative to the element's scale)
# are dropped during multiplication; keeps nilpotent truncation exact
# without carrying exact-zero bands around.
COEFF_DROP = 1e-14

# Default cap on coefficient slots a norm estimate may touch:
# 4 * kmax * bandwidth must stay at or under this.
BANDWIDTH_CAP = 4096


class GradedModel:
    """A partial isometry with a coefficient algebra, plus power caches.

    ``algebra`` is the commutative algebra the coefficients live in
    (typically the double-closure coefficient algebra of a seed, or simply
    the diagonal algebra for shift models).
    """

    def __init__(self, u, algebra: MatrixAlgebra, tol: float = DEFAULT_TOL):
        self.pair: EndoPair = u if isinstance(u, EndoPair) else endo_pair(u, tol=tol)
        if algebra.dim != self.pair.ambient_dim:
            raise ModelMismatch("coefficient algebra dimension does not match u")
        self.algebra = algebra
        self.tol = tol
        self.dim = self.pair.ambient_dim
        self._pow: dict[int, np.ndarray] = {0: np.eye(self.dim, dtype=np.complex128)}

    def power(self, k: int) -> np.ndarray:
        """u^k with memoization (k >= 0)."""
        if k not in self._pow:
            self._pow[k] = self.power(k - 1) @ self.pair.u
        return self._pow[k]

    def range_projection(self, k: int) -> np.ndarray:
        """P_k = u^k u*^k."""
        uk = self.power(k)
        return uk @ dagger(uk)

    def initial_projection(self, k: int) -> np.ndarray:
        """Q_k = u*^k u^k."""
        uk = self.power(k)
        return dagger(uk) @ uk

    def delta_k(self, m, k: int) -> np.ndarray:
        """u^k m u*^k, the k-fold forward conjugation in one product."""
        uk = self.power(k)
        return uk @ as_matrix(m) @ dagger(uk)

    def delta_star_k(self, m, k: int) -> np.ndarray:
        uk = self.power(k)
        return dagger(uk) @ as_matrix(m) @ uk

    @property
    def band_orientation(self) -> int | None:
        """+1 when u lives on the first subdiagonal (then a degree-d term
        occupies the band row - col = d), -1 when u lives on the first
        superdiagonal (degree d occupies row - col = -d), None otherwise."""
        u = self.pair.u
        idx = np.arange(self.dim - 1)
        for sign in (1, -1):
            mask = np.ones_like(u, dtype=bool)
            if sign > 0:
                mask[idx + 1, idx] = False
            else:
                mask[idx, idx + 1] = False
            if np.max(np.abs(u[mask]), initial=0.0) <= self.tol:
                return sign
        return None

    @property
    def is_shift_banded(self) -> bool:
        """True when u is a standard-basis shift in either orientation."""
        return self.band_orientation is not None

    def element(self, coefficients: dict, enforce_support: bool = False) -> "GradedElement":
        """Build a graded element, validating the invariants.

        Coefficients must belong to the coefficient algebra
        (:class:`ModelMismatch` otherwise) and be supported under the
        matching range projection (:class:`SupportViolation`), unless
        ``enforce_support`` projects them onto that support first.
        """
        coeffs = {}
        for d, c in coefficients.items():
            cm = as_matrix(c)
            if cm.shape[0] != self.dim:
                raise ModelMismatch("coefficient dimension does not match the model")
            if d != 0 and enforce_support:
                p = self.range_projection(abs(int(d)))
                cm = p @ cm @ p
            if operator_norm(cm) <= COEFF_DROP:
                continue
            member, res = contains(self.algebra, cm, tol=self.tol)
            if not member:
                raise ModelMismatch(
                    f"degree-{d} coefficient is not in the coefficient algebra "
                    f"(residual {res:.3e})"
                )
            coeffs[int(d)] = cm
        g = GradedElement(self, coeffs)
        _check_support(g, self.tol)
        return g

    def element_from_right_coefficients(self, coefficients: dict) -> "GradedElement":
        """Convert the alternate orientation (coefficients right of u^d for
        d > 0, left of u*^d for d < 0) into the canonical one via the
        push-through identities: beta_d = delta^{|d|}(alpha_d)."""
        conv = {}
        for d, c in coefficients.items():
            k = abs(int(d))
            conv[int(d)] = self.delta_k(c, k) if k else as_matrix(c)
        return self.element(conv, enforce_support=True)


@dataclass(frozen=True, eq=False)
class GradedElement:
    """Immutable degree -> coefficient map over a GradedModel."""

    model: GradedModel
    coefficients: dict[int, np.ndarray]

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted(self.coefficients))

    @property
    def bandwidth(self) -> int:
        return max((abs(d) for d in self.coefficients), default=0)

    def coefficient(self, n: int) -> np.ndarray:
        c = self.coefficients.get(int(n))
        if c is None:
            return np.zeros((self.model.dim, self.model.dim), dtype=np.complex128)
        return c

    def scaled(self, factor: complex) -> "GradedElement":
        return GradedElement(
            self.model, {d: factor * c for d, c in self.coefficients.items()}
        )


def _check_support(g: GradedElement, tol: float):
    for d, c in g.coefficients.items():
        if d == 0:
            continue
        p = g.model.range_projection(abs(d))
        defect = max(operator_norm(p @ c - c), operator_norm(c @ p - c))
        if defect > tol * (1.0 + operator_norm(c)):
            raise SupportViolation(
                f"degree-{d} coefficient leaks outside its range projection "
                f"(defect {defect:.3e})"
            )


def realize(g: GradedElement) -> np.ndarray:
    """Assemble the dense matrix Sum u*^|d| beta_d + beta_0 + beta_d u^d."""
    _check_support(g, g.model.tol)
    out = np.zeros((g.model.dim, g.model.dim), dtype=np.complex128)
    for d, c in g.coefficients.items():
        if d == 0:
            out += c
        elif d > 0:
            out += c @ g.model.power(d)
        else:
            out += dagger(g.model.power(-d)) @ c
    return out


def graded_adjoint(g: GradedElement) -> GradedElement:
    """Adjoint: the degree-d coefficient becomes the adjoint of the
    degree-(-d) one; realize(graded_adjoint(g)) = realize(g)* exactly."""
    return GradedElement(
        g.model, {-d: dagger(c) for d, c in g.coefficients.items()}
    )


def _term_product(model: GradedModel, m: int, beta: np.ndarray, n: int, gamma: np.ndarray):
    """Degree and raw coefficient of (term at degree m) * (term at degree n).

    Derived by moving coefficients through powers of u with the
    push-through identities and absorbing u^k u*^k into range projections;
    each case is an identity of matrices once the coefficients commute
    with the power projections.
    """
    if m >= 0 and n >= 0:
        return m + n, beta @ model.delta_k(gamma, m)
    if m <= 0 and n <= 0:
        return m + n, model.delta_k(beta, -n) @ gamma
    if m > 0 and n < 0:
        r = -n
        if m >= r:
            return m - r, beta @ model.delta_k(model.range_projection(r) @ gamma, m - r)
        return -(r - m), model.delta_k(beta @ model.range_projection(m), r - m) @ gamma
    # m < 0 < n: exact in all cases by associativity alone
    s = -m
    if n >= s:
        return n - s, model.delta_star_k(beta @ gamma, s)
    return -(s - n), model.delta_star_k(beta @ gamma, n)


def graded_mul(g1: GradedElement, g2: GradedElement) -> GradedElement:
    """Product in graded form, degree by degree.

    The result's degree-d coefficient is projected onto its canonical
    support; degrees whose u-power vanishes (nilpotent truncation) and
    coefficients that come out at round-off scale are dropped.
    """
    if g1.model is not g2.model:
        raise ModelMismatch("graded elements belong to different models")
    model = g1.model
    scale = 1.0
    for g in (g1, g2):
        for c in g.coefficients.values():
            scale = max(scale, operator_norm(c))
    acc: dict[int, np.ndarray] = {}
    for m, beta in g1.coefficients.items():
        for n, gamma in g2.coefficients.items():
            d, raw = _term_product(model, m, beta, n, gamma)
            if abs(d) >= model.dim:
                continue
            if d != 0:
                p = model.range_projection(abs(d))
                raw = p @ raw @ p
            if d in acc:
                acc[d] = acc[d] + raw
            else:
                acc[d] = raw
    out = {
        d: c for d, c in acc.items() if operator_norm(c) > COEFF_DROP * scale * scale
    }
    return GradedElement(model, out)


def extract_N(g: GradedElement, n: int) -> np.ndarray:
    """The coefficient functional N_n: return beta_n (zero if absent)."""
    return g.coefficient(n)


def regrade(model: GradedModel, m) -> GradedElement:
    """Decompose a dense matrix into graded form by band extraction.

    Only valid for shift-banded models, where the degree-d part occupies
    one diagonal band (which one depends on the shift orientation);
    raises :class:`ModelNotGraded` otherwise.  The round trip
    realize(regrade(m)) = m holds exactly when m lies in the graded
    algebra of the model.
    """
    sign = model.band_orientation
    if sign is None:
        raise ModelNotGraded("u is not a standard-basis shift; bands are undefined")
    mm = as_matrix(m)
    n = model.dim
    rows, cols = np.indices((n, n))
    coeffs = {}
    for b in range(-(n - 1), n):
        band = np.where(rows - cols == b, mm, 0.0)
        d = sign * b
        if d == 0:
            c = band
        elif d > 0:
            c = band @ dagger(model.power(d))
        else:
            c = model.power(-d) @ band
        if operator_norm(c) > COEFF_DROP * (1.0 + operator_norm(mm)):
            coeffs[d] = c
    return GradedElement(model, coeffs)


def gauge_average_N0(m, bandwidth: int, model: GradedModel) -> np.ndarray:
    """Average V_j m V_j* over the diagonal phase unitaries
    V_j = diag(w^(j n)), w = exp(2 pi i / M), M = 2 bandwidth + 2.

    For band-limited m this kills every off-diagonal band exactly and
    returns the degree-0 part; it never increases the operator norm, which
    is the oracle property behind the coefficient bound.
    """
    if not model.is_shift_banded:
        raise ModelNotGraded("gauge averaging needs a standard-basis shift model")
    mm = as_matrix(m)
    n = model.dim
    big_m = 2 * bandwidth + 2
    omega = np.exp(2j * np.pi / big_m)
    acc = np.zeros_like(mm)
    idx = np.arange(n)
    for j in range(big_m):
        phases = omega ** (j * idx)
        v = np.diag(phases)
        acc += v @ mm @ dagger(v)
    return acc / big_m


@dataclass(frozen=True)
class PropertyStarReport:
    samples: int
    worst_margin_center: float
    worst_margin_any: float
    violations: int
    passed: bool


def random_element(
    model: GradedModel, rng: np.random.Generator, bandwidth: int = 3
) -> GradedElement:
    """Random graded element: each coefficient is a random combination of
    the coefficient-algebra basis, projected onto its canonical support."""
    b = min(bandwidth, model.dim - 1)
    k = model.algebra.dimension
    coeffs = {}
    for d in range(-b, b + 1):
        w = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        c = np.tensordot(w, model.algebra.basis, axes=(0, 0))
        coeffs[d] = c
    return model.element(coeffs, enforce_support=True)


def check_property_star(
    model: GradedModel,
    samples: int,
    tol: float = DEFAULT_TOL,
    bandwidth: int = 3,
    rng: np.random.Generator | None = None,
) -> PropertyStarReport:
    """Sample random graded elements and test the coefficient bounds
    ||b|| >= ||beta_0|| and ||b|| >= max_d ||beta_d||, within tol."""
    if rng is None:
        rng = np.random.default_rng(0)
    worst_center = np.inf
    worst_any = np.inf
    violations = 0
    for _ in range(samples):
        g = random_element(model, rng, bandwidth=bandwidth)
        nb = operator_norm(realize(g))
        center = nb - operator_norm(g.coefficient(0))
        biggest = max(
            (operator_norm(c) for c in g.coefficients.values()), default=0.0
        )
        any_margin = nb - biggest
        worst_center = min(worst_center, center)
        worst_any = min(worst_any, any_margin)
        if center < -tol * (1.0 + nb) or any_margin < -tol * (1.0 + nb):
            violations += 1
    if samples == 0:
        worst_center = worst_any = 0.0
    return PropertyStarReport(
        samples=samples,
        worst_margin_center=float(worst_center),
        worst_margin_any=float(worst_any),
        violations=violations,
        passed=violations == 0,
    )


@dataclass(frozen=True)
class SumNormReport:
    count: int
    margins: dict[str, float]
    passed: bool


def sum_norm_inequalities(ds, tol: float = DEFAULT_TOL) -> SumNormReport:
    """The four sum estimates for a tuple d_1..d_m of same-size matrices:

        ||Sum d_i||^2          <= m ||Sum d_i d_i*||
        ||Sum d_i||^2          <= m ||Sum d_i* d_i||
        ||Sum |d_i|||^2        >= (1/m) ||Sum d_i* d_i||      (|d| = sqrt(d*d))
        ||Sum sqrt(d_i d_i*)||^2 >= (1/m) ||Sum d_i d_i*||

    Margins are reported as (bound side) - (bounded side), so all four
    should come out nonnegative up to round-off.
    """
    mats = [as_matrix(d) for d in ds]
    if not mats:
        raise ValueError("need at least one matrix")
    m = len(mats)
    total = sum(mats)
    gram_right = sum(d @ dagger(d) for d in mats)
    gram_left = sum(dagger(d) @ d for d in mats)
    abs_left = sum(hermitian_sqrt(dagger(d) @ d) for d in mats)
    abs_right = sum(hermitian_sqrt(d @ dagger(d)) for d in mats)
    ns = operator_norm(total) ** 2
    margins = {
        "square_vs_right_gram": m * operator_norm(gram_right) - ns,
        "square_vs_left_gram": m * operator_norm(gram_left) - ns,
        "abs_sum_vs_left_gram": operator_norm(abs_left) ** 2
        - operator_norm(gram_left) / m,
        "abs_sum_vs_right_gram": operator_norm(abs_right) ** 2
        - operator_norm(gram_right) / m,
    }
    scale = 1.0 + max(operator_norm(d) for d in mats) ** 2
    passed = all(v >= -tol * m * scale for v in margins.values())
    return SumNormReport(count=m, margins=margins, passed=passed)


@dataclass(frozen=True)
class NormEstimate:
    """Norm estimates s_k = ||N_0[(b b*)^{2k}]||^{1/4k} at k = 1, 2, 4, ...

    Each recorded k brackets the true norm:
    s_k <= ||b|| <= (4 k n + 1)^{1/4k} s_k with n the bandwidth.
    """

    estimates: tuple[tuple[int, float], ...]
    final: float
    bandwidth: int
    prescale: float

    def upper_bound(self, k: int, s_k: float) -> float:
        return float((4 * k * self.bandwidth + 1) ** (1.0 / (4 * k)) * s_k)


def norm_estimate(
    g: GradedElement, kmax: int = 64, cap: int = BANDWIDTH_CAP
) -> NormEstimate:
    """Estimate ||realize(g)|| from coefficients alone.

    Forms c = g g* in graded form, squares it repeatedly (so the available
    exponents are powers of two), and records s_k at k = 1, 2, 4, ... up
    to kmax.  The element is pre-scaled by a power-iteration norm guess so
    the squared coefficients stay O(1); the 1/4k-th root restores the
    scale exactly.  Raises :class:`ZeroElement` for the zero element and
    :class:`BandwidthOverflow` when 4 * kmax * bandwidth exceeds ``cap``.
    """
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    band = g.bandwidth
    if 4 * kmax * band > cap:
        raise BandwidthOverflow(
            f"4*kmax*bandwidth = {4 * kmax * band} exceeds the cap {cap}"
        )
    dense = realize(g)
    coeff_scale = max(
        (operator_norm(c) for c in g.coefficients.values()), default=0.0
    )
    if operator_norm(dense) <= 1e-14 * coeff_scale or coeff_scale == 0.0:
        raise ZeroElement("norm estimate of the zero element is undefined")
    t = rough_norm(dense)
    if t <= 0.0:
        t = coeff_scale
    h = g.scaled(1.0 / t)
    c = graded_mul(h, graded_adjoint(h))
    estimates = []
    k = 1
    power = graded_mul(c, c)  # (h h*)^2, exponent 2k with k = 1
    while True:
        s = t * operator_norm(extract_N(power, 0)) ** (1.0 / (4 * k))
        estimates.append((k, float(s)))
        if 2 * k > kmax:
            break
        power = graded_mul(power, power)
        k *= 2
    return NormEstimate(
        estimates=tuple(estimates),
        final=estimates[-1][1],
        bandwidth=band,
        prescale=float(t),
    )


@dataclass(frozen=True)
class TransportReport:
    final_a: float
    final_b: float
    final_gap: float
    dense_a: float
    dense_b: float
    dense_gap: float
    passed: bool


def transport_compare(
    g: GradedElement,
    model_a: GradedModel,
    model_b: GradedModel,
    perm,
    kmax: int = 64,
    final_tol: float = 1e-6,
    dense_tol: float = 1e-9,
) -> TransportReport:
    """Unitary-transport consistency between a model and a relabeled copy.

    ``perm`` maps basis index i of model_a to perm[i] of model_b; model_b's
    isometry must equal the conjugated one (:class:`ModelMismatch`
    otherwise).  The graded element is transported coefficientwise and the
    norm estimates and dense norms of the two realizations are compared.
    """
    if g.model is not model_a:
        raise ModelMismatch("graded element does not belong to model_a")
    n = model_a.dim
    if model_b.dim != n or len(perm) != n:
        raise ModelMismatch("permutation or model dimensions do not match")
    w = np.zeros((n, n), dtype=np.complex128)
    for i, target in enumerate(perm):
        w[int(target), i] = 1.0
    conj = w @ model_a.pair.u @ dagger(w)
    mismatch = operator_norm(conj - model_b.pair.u)
    if mismatch > model_a.tol * (1.0 + operator_norm(model_a.pair.u)):
        raise ModelMismatch(
            f"model_b is not the permutation-conjugated copy (gap {mismatch:.3e})"
        )
    g2 = model_b.element(
        {d: w @ c @ dagger(w) for d, c in g.coefficients.items()},
        enforce_support=True,
    )
    est_a = norm_estimate(g, kmax=kmax)
    est_b = norm_estimate(g2, kmax=kmax)
    dense_a = operator_norm(realize(g))
    dense_b = operator_norm(realize(g2))
    final_gap = abs(est_a.final - est_b.final)
    dense_gap = abs(dense_a - dense_b)
    return TransportReport(
        final_a=est_a.final,
        final_b=est_b.final,
        final_gap=final_gap,
        dense_a=dense_a,
        dense_b=dense_b,
        dense_gap=dense_gap,
        passed=final_gap <= final_tol and dense_gap <= dense_tol,
    )
