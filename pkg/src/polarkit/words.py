"""Free *-word calculus for the algebra generated by 1 and a.

Words over the letters a and a* carry an integer degree (letter count,
signed).  When the defining relation is the affine one

    a a* = q a*a + h

every word collapses to a normal form a^{*l} p(a*a) a^m with p a
polynomial, by pushing a* to the left and a to the right through the
substitution x -> q x + h.  The degree m - l of the normal form equals
the degree of the original word, and products of normal forms stay in
normal form with degrees adding exactly.

Everything symbolic here is representation independent.  ``evaluate``
maps a word or normal form into a concrete matrix model; for truncated
models the relation fails at the top basis vector, so symbolic and
numeric agree only on the interior columns (see interior_projection).

The rewriting keeps whatever scalar type it is fed.  Passing Fraction
values for q and h (and integer polynomial inputs) makes every identity
exact; floats give the usual double-precision arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DimensionTooSmall, ParseError, UnsupportedPhi
from .linalg import as_matrix, dagger

GEN = "a"
GEN_STAR = "a*"


def parse_word(text: str) -> tuple:
    """Split a whitespace-separated string over {"a", "a*"} into a word."""
    letters = []
    for token in text.split():
        if token not in (GEN, GEN_STAR):
            raise ParseError(f"unknown letter {token!r}; expected 'a' or 'a*'")
        letters.append(token)
    return tuple(letters)


def deg(word) -> int:
    """Signed letter count: each a contributes +1, each a* contributes -1.

    Defined on the free semigroup of words, not on operators; two words
    representing the same matrix may have different degrees.
    """
    if isinstance(word, str):
        word = parse_word(word)
    return sum(1 if w == GEN else -1 for w in word)


@dataclass(frozen=True)
class PhiMap:
    """The conjugation action of a on polynomials in x = a*a.

    The affine kind encodes a a* = q a*a + h, so pushing a polynomial p
    leftward through a substitutes x -> q x + h.  The spectral kind is a
    bare eigenvalue table for models without an affine relation; it
    supports matrix evaluation only, never symbolic rewriting.
    """

    kind: str
    q: object = 0
    h: object = 0
    table: tuple = field(default=())

    @classmethod
    def affine(cls, q, h) -> "PhiMap":
        return cls(kind="affine", q=q, h=h)

    @classmethod
    def affine_exact(cls, q, h) -> "PhiMap":
        """Affine map with q, h coerced to Fraction for exact rewriting."""
        return cls(kind="affine", q=Fraction(str(q)), h=Fraction(str(h)))

    @classmethod
    def spectral(cls, table) -> "PhiMap":
        return cls(kind="spectral", table=tuple(table))

    def require_affine(self) -> None:
        if self.kind != "affine":
            raise UnsupportedPhi(
                "symbolic rewriting needs the affine relation; "
                f"got kind {self.kind!r}"
            )


def _trim(p: tuple) -> tuple:
    """Drop exactly-zero trailing coefficients (keep at least one)."""
    end = len(p)
    while end > 1 and p[end - 1] == 0:
        end -= 1
    return tuple(p[:end])


def poly_add(p: tuple, r: tuple) -> tuple:
    n = max(len(p), len(r))
    return _trim(tuple(
        (p[i] if i < len(p) else 0) + (r[i] if i < len(r) else 0)
        for i in range(n)
    ))


def poly_mul(p: tuple, r: tuple) -> tuple:
    out = [0] * (len(p) + len(r) - 1)
    for i, ci in enumerate(p):
        if ci == 0:
            continue
        for j, cj in enumerate(r):
            out[i + j] = out[i + j] + ci * cj
    return _trim(tuple(out))


def poly_scale(p: tuple, c) -> tuple:
    return _trim(tuple(c * ci for ci in p))


def poly_compose_affine(p: tuple, q, h) -> tuple:
    """p(q x + h) by Horner's scheme in polynomial arithmetic."""
    acc = (p[-1],)
    for c in reversed(p[:-1]):
        acc = poly_add(poly_mul(acc, (h, q)), (c,))
    return _trim(acc)


def _ell_power(phi: PhiMap, m: int):
    """Coefficients (qm, hm) of the m-fold iterate x -> qm x + hm."""
    qm, hm = 1, 0
    for _ in range(m):
        qm = phi.q * qm
        hm = phi.q * hm + phi.h
    return qm, hm


@dataclass(frozen=True)
class NormalForm:
    """The canonical shape a^{*l} p(a*a) a^m of a word.

    ``p`` is a coefficient tuple in ascending powers of x = a*a.  The
    degree m - l matches the degree of every word that normalizes to
    this form; that identity is exact by construction.
    """

    l: int
    m: int
    p: tuple

    def __post_init__(self):
        object.__setattr__(self, "p", _trim(tuple(self.p)))

    @property
    def degree(self) -> int:
        return self.m - self.l

    @property
    def word_length(self) -> int:
        """Letter count of the longest monomial this form expands to."""
        return self.l + self.m + 2 * (len(self.p) - 1)

    def scaled(self, c) -> "NormalForm":
        return NormalForm(self.l, self.m, poly_scale(self.p, c))


NF_ONE = NormalForm(0, 0, (1,))


def _times_a(l: int, m: int, p: tuple, phi: PhiMap):
    """Right-multiply a^{*l} p a^m by the letter a."""
    m += 1
    if l > 0 and m > 0 and phi.q != 0:
        # a* p(x) a = x * p((x - h) / q) since p(x) a = a p(inverse(x)).
        l -= 1
        m -= 1
        if isinstance(phi.q, (int, Fraction)):
            inv_q = Fraction(1) / phi.q
        else:
            inv_q = 1.0 / phi.q
        p = poly_mul((0, 1), poly_compose_affine(p, inv_q, -phi.h * inv_q))
    return l, m, p


def _times_astar(l: int, m: int, p: tuple, phi: PhiMap):
    """Right-multiply a^{*l} p a^m by the letter a*."""
    if m > 0:
        # a^m a* = ell^m(x) a^{m-1} pushed back through p.
        qm, hm = _ell_power(phi, m)
        p = poly_mul(p, (hm, qm))
        m -= 1
    else:
        # p(x) a* = a* p(q x + h).
        l += 1
        p = poly_compose_affine(p, phi.q, phi.h)
    return l, m, p


def _times_poly(l: int, m: int, p: tuple, s: tuple, phi: PhiMap):
    """Right-multiply a^{*l} p a^m by s(x): s commutes through a^m."""
    qm, hm = _ell_power(phi, m)
    return l, m, poly_mul(p, poly_compose_affine(s, qm, hm))


def normal_order(word, phi: PhiMap) -> NormalForm:
    """Rewrite a word to a^{*l} p(a*a) a^m under the affine relation.

    The fold keeps l and m minimal whenever q != 0 (adjacent a* ... a
    pairs are cancelled eagerly through the inverse substitution); for
    q = 0 the inverse does not exist and mixed forms are left as is.
    """
    phi.require_affine()
    if isinstance(word, str):
        word = parse_word(word)
    l, m, p = 0, 0, (1,)
    for letter in word:
        if letter == GEN:
            l, m, p = _times_a(l, m, p, phi)
        elif letter == GEN_STAR:
            l, m, p = _times_astar(l, m, p, phi)
        else:
            raise ParseError(f"unknown letter {letter!r}")
    return NormalForm(l, m, p)


def nf_mul(n1: NormalForm, n2: NormalForm, phi: PhiMap) -> NormalForm:
    """Product of normal forms, again in normal form.

    Folds the second factor into the first letter by letter, so the
    degree identity degree(n1) + degree(n2) = degree(product) is exact
    whatever the coefficient type.
    """
    phi.require_affine()
    l, m, p = n1.l, n1.m, n1.p
    for _ in range(n2.l):
        l, m, p = _times_astar(l, m, p, phi)
    l, m, p = _times_poly(l, m, p, n2.p, phi)
    for _ in range(n2.m):
        l, m, p = _times_a(l, m, p, phi)
    return NormalForm(l, m, p)


def _as_model_matrix(model) -> np.ndarray:
    if hasattr(model, "kind"):
        from .models import build

        return build(model)
    return as_matrix(model)


def _poly_at_matrix(p: tuple, x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    acc = complex(p[-1]) * eye
    for c in reversed(p[:-1]):
        acc = acc @ x + complex(c) * eye
    return acc


def evaluate(item, model) -> np.ndarray:
    """Realize a word or normal form in a concrete model.

    ``model`` may be a ModelSpec or a square matrix standing for a.  The
    model dimension must exceed the word length, otherwise the truncation
    boundary contaminates every column (DimensionTooSmall).
    """
    a = _as_model_matrix(model)
    n = a.shape[0]
    if isinstance(item, str):
        item = parse_word(item)
    if isinstance(item, NormalForm):
        length = item.word_length
        if n < length + 1:
            raise DimensionTooSmall(f"dim {n} < word length {length} + 1")
        x = dagger(a) @ a
        out = _poly_at_matrix(item.p, x)
        for _ in range(item.l):
            out = dagger(a) @ out
        for _ in range(item.m):
            out = out @ a
        return out
    length = len(item)
    if n < length + 1:
        raise DimensionTooSmall(f"dim {n} < word length {length} + 1")
    out = np.eye(n, dtype=np.complex128)
    for letter in item:
        out = out @ (a if letter == GEN else dagger(a))
    return out


def interior_projection(dim: int, length: int) -> np.ndarray:
    """Projection onto the columns where a truncated model is faithful.

    A word of length L applied to e_j with j <= dim - 1 - L never sees
    the defective top basis vector, so symbolic and numeric evaluation
    agree on the range of this projection.
    """
    p = np.zeros((dim, dim), dtype=np.complex128)
    keep = max(dim - length, 0)
    for i in range(keep):
        p[i, i] = 1.0
    return p


def b_graded_decompose(terms, phi: PhiMap) -> dict:
    """Group a finite sum of weighted words by degree.

    ``terms`` is an iterable of (coefficient, word).  Each bucket is a
    list of normal forms whose shared m - l equals the bucket key; forms
    with identical (l, m) are merged by polynomial addition.  The bucket
    at 0 is the degree-zero part, the one whose norm lower-bounds the
    whole sum in models with the norm-filtration property.
    """
    phi.require_affine()
    buckets: dict[int, dict[tuple, tuple]] = {}
    for coeff, word in terms:
        nf = normal_order(word, phi).scaled(coeff)
        slot = buckets.setdefault(nf.degree, {})
        key = (nf.l, nf.m)
        slot[key] = poly_add(slot[key], nf.p) if key in slot else nf.p
    out: dict[int, list[NormalForm]] = {}
    for d in sorted(buckets):
        out[d] = [NormalForm(l, m, p) for (l, m), p in sorted(buckets[d].items())]
    return out


def evaluate_terms(terms, model) -> np.ndarray:
    """Realize a finite sum of (coefficient, word) pairs in a model."""
    a = _as_model_matrix(model)
    out = np.zeros_like(a)
    for coeff, word in terms:
        out = out + complex(coeff) * evaluate(word, a)
    return out
