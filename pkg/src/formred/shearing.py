"""Shearing transformations and the monodromy bookkeeping around them.

A shearing ``S = diag(x^(a_1/q), ..., x^(a_n/q))`` acts by

    S[A]_(i,k) = x^((a_k - a_i)/q) A_(i,k),   minus diag(a_i/q).

Its monodromy matrix is ``P = diag(w^a_i)``.  A generalized shearing
``G = S C`` with constant invertible ``C`` acts by ``G[A] = C^-1 S[A] C`` and
has monodromy ``C^-1 P C``.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import ceil, gcd, lcm

import numpy as np

from .conlinalg import (
    as_matrix, char_poly, identity, is_nilpotent, mat_inverse, mat_kernel,
    matrices_equal, mat_power, zeros,
)
from .errors import ConsistencyError, PreconditionError
from .exactfield import cyclo_context, omega_power
from .pseries import PuiseuxMatrix, conjugate, is_unramified, normalize
from .splitting import check_commutative

__all__ = [
    "Shearing", "GeneralizedShearing", "apply_shearing", "apply_generalized",
    "monodromy_matrix", "shearing_from_monodromy", "unramify",
    "certify_commutative_from_shearing", "search_shearing", "in_frame",
    "NOT_FOUND", "NotFound",
]


@dataclass(frozen=True)
class Shearing:
    """``diag(x^(a_i/q))`` with integer exponents ``a_i``."""

    q: int
    exponents: tuple

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("shearing ramification must be >= 1")
        object.__setattr__(self, "exponents", tuple(int(a) for a in self.exponents))

    @property
    def n(self):
        return len(self.exponents)

    def inverse(self):
        return Shearing(self.q, tuple(-a for a in self.exponents))

    def to_document(self):
        return {"q": self.q, "exponents": list(self.exponents)}

    @classmethod
    def from_document(cls, doc):
        try:
            q, exps = doc["q"], doc["exponents"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"missing field in shearing document: {exc}") from None
        if not isinstance(q, int) or not all(isinstance(a, int) for a in exps):
            raise ValueError("shearing fields must be integers")
        return cls(q, tuple(exps))


@dataclass(frozen=True, eq=False)
class GeneralizedShearing:
    """The transformation ``S C``."""

    shear: Shearing
    basis: np.ndarray

    @property
    def n(self):
        return self.shear.n


def in_frame(a, q):
    """Normalize ``a`` but keep (a refinement to) ramification ``q``.

    Commutativity statements refer to a fixed ``w``, so the frame must not
    coarsen below the shearing's ``q``.
    """
    a = normalize(a)
    if a.q == q:
        return a
    if q % a.q:
        raise ValueError(f"series with q={a.q} has no frame with q={q}")
    return a.reframe(q)


def apply_shearing(a, s, normalized=True):
    """``S[A]`` computed by exact index shifts."""
    if s.n != a.n:
        raise ValueError("shearing dimension mismatch")
    big_q = lcm(a.q, s.q)
    m = big_q // s.q
    alpha = [x * m for x in s.exponents]
    a = a.reframe(big_q)
    spread = max(alpha) - min(alpha)
    extra = ceil(Fraction(spread, big_q))
    base = big_q * extra
    n = a.n
    coeffs = {}
    for j, mat in a.coeffs.items():
        for i in range(n):
            for k in range(n):
                v = mat[i, k]
                if v == 0:
                    continue
                nj = j + base + alpha[k] - alpha[i]
                if nj not in coeffs:
                    coeffs[nj] = zeros(n)
                coeffs[nj][i, k] += v
    pole = a.pole + extra
    drift = big_q * pole
    if any(alpha):
        if drift not in coeffs:
            coeffs[drift] = zeros(n)
        for i in range(n):
            coeffs[drift][i, i] -= Fraction(alpha[i], big_q)
    out = PuiseuxMatrix(n, big_q, pole, coeffs, a.known_through + base - spread)
    return normalize(out) if normalized else out


def apply_generalized(a, g, normalized=True):
    """``(S C)[A] = C^-1 S[A] C``."""
    out = conjugate(apply_shearing(a, g.shear, normalized=False), g.basis)
    return normalize(out) if normalized else out


def monodromy_matrix(s, ctx=None):
    """``diag(w^a_i)`` for a shearing, ``C^-1 diag(w^a_i) C`` for ``S C``."""
    shear = s.shear if isinstance(s, GeneralizedShearing) else s
    ctx = cyclo_context(shear.q) if ctx is None else ctx
    if ctx.q % shear.q:
        raise ValueError("context order must be a multiple of the shearing's q")
    m = ctx.q // shear.q
    p = zeros(shear.n)
    for i, a in enumerate(shear.exponents):
        w = omega_power(ctx, a * m)
        p[i, i] = w.to_rational() if w.is_rational() else w
    if isinstance(s, GeneralizedShearing):
        p = mat_inverse(s.basis) @ p @ s.basis
    return _simplify(p)


def _simplify(m):
    out = np.empty(m.shape, dtype=object)
    for idx, v in np.ndenumerate(m):
        if hasattr(v, "is_rational") and v.is_rational():
            v = v.to_rational()
        elif isinstance(v, int):
            v = Fraction(v)
        out[idx] = v
    return out


def shearing_from_monodromy(p_mat, ctx):
    """A generalized shearing whose monodromy matrix is ``p_mat``.

    Sign convention: with ``C^-1 P C = diag(w^a_i)`` the result is
    ``S C^-1`` with ``S = diag(x^(a_i/q))``, so that
    ``monodromy_matrix(result) == P``.  An ``(w, P)``-commutative system is
    therefore ``result[A]`` for an unramified ``A``, which :func:`unramify`
    recovers.
    """
    p_mat = as_matrix(p_mat)
    n = p_mat.shape[0]
    q = ctx.q
    if not matrices_equal(mat_power(p_mat, q), identity(n)):
        raise PreconditionError(f"not a shearing monodromy: P^{q} is not the identity")
    cols, alpha = [], []
    for a in range(q):
        w = omega_power(ctx, a)
        for v in mat_kernel(p_mat - identity(n) * w):
            cols.append(v)
            alpha.append(a)
    if len(cols) != n:
        raise PreconditionError("not a shearing monodromy: P is not diagonalizable")
    c = zeros(n)
    for j, v in enumerate(cols):
        c[:, j] = v
    c = _simplify(c)
    return GeneralizedShearing(Shearing(q, tuple(alpha)), _simplify(mat_inverse(c)))


def unramify(a_hat, g):
    """Inverse action of ``G = S C``: recover ``A`` from ``A_hat = G[A]``."""
    back = conjugate(a_hat, mat_inverse(g.basis), g.basis)
    return apply_shearing(back, g.shear.inverse())


def certify_commutative_from_shearing(a, g, ctx=None):
    """Check that ``G[A]`` is ``(w, P)``-commutative with ``P`` the monodromy of ``G``.

    Also checks the spectral symmetry of the leading matrix: the
    characteristic polynomial coefficients satisfy
    ``chi_k (1 - w^(p (n-k))) = 0``.  Returns ``(A_hat, P, True)``; a
    failed certificate raises :class:`ConsistencyError`.
    """
    if not is_unramified(a):
        raise PreconditionError("input system is ramified")
    if not isinstance(g, GeneralizedShearing):
        g = GeneralizedShearing(g, identity(g.n))
    q = g.shear.q
    ctx = cyclo_context(q) if ctx is None else ctx
    if ctx.q != q:
        raise ValueError("context order differs from the shearing's q")
    a_hat = in_frame(apply_generalized(a, g), q)
    p_mat = monodromy_matrix(g, ctx)
    if not check_commutative(a_hat, p_mat, q):
        raise ConsistencyError("sheared series is not (w, P)-commutative")
    if not a_hat.is_zero:
        p = a_hat.leading_index
        chi = char_poly(a_hat.leading_matrix)
        n = a.n
        for k, c in enumerate(chi):
            if c != 0 and omega_power(ctx, p * (n - k)) != 1:
                raise ConsistencyError("leading spectrum lacks w^p symmetry")
    return a_hat, p_mat, True


# -- search -------------------------------------------------------------------

class NotFound:
    """Result of an exhausted shearing search."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NOT_FOUND"

    def __bool__(self):
        return False


NOT_FOUND = NotFound()


def _entries(a):
    """Nonzero entries as ``(exponent, i, k, value)``."""
    out = []
    for j, m in a.coeffs.items():
        e = a.exponent(j)
        for (i, k), v in np.ndenumerate(m):
            if v != 0:
                out.append((e, i, k, v))
    return out


def _sheared_leading(entries, alpha, q, n):
    best, lead = None, None
    for e, i, k, v in entries:
        f = e + Fraction(alpha[k] - alpha[i], q)
        if best is None or f < best:
            best, lead = f, {(i, k): v}
        elif f == best:
            lead[(i, k)] = v
    if best is None:
        return None, None
    if best == 0:
        for i in range(n):
            lead[(i, i)] = lead.get((i, i), 0) - Fraction(alpha[i], q)
    elif best > 0:
        # the drift term diag(-a_i/q) is the leading term
        if not any(alpha):
            return best, None
        best, lead = Fraction(0), {(i, i): -Fraction(alpha[i], q) for i in range(n)}
    m = zeros(n)
    for (i, k), v in lead.items():
        m[i, k] = v
    return best, m


def _acceptable(a_hat):
    if a_hat.is_zero or a_hat.valuation >= 0:
        return False
    if is_nilpotent(a_hat.leading_matrix):
        return False
    return gcd(a_hat.leading_index, a_hat.q) == 1


def search_shearing(a, q_max, exponent_bound=2):
    """First shearing (in a fixed order) giving a non-nilpotent leading term.

    Candidates are enumerated by increasing ``q``, then exponent vectors in
    ``{0..exponent_bound*q}^n`` in lexicographic order with minimum 0;
    vectors sharing a factor with ``q`` are skipped as they reduce to a
    smaller ``q``.  A candidate is accepted when the normalized result has a
    pole, a non-nilpotent leading matrix and ``gcd(p, q) = 1``.  Returns
    :data:`NOT_FOUND` when nothing in the range qualifies.
    """
    a = normalize(a)
    if a.n < 2:
        raise PreconditionError("search needs dimension at least 2")
    if a.is_zero or not is_nilpotent(a.leading_matrix):
        raise PreconditionError("leading matrix is not nilpotent")
    if a.valuation >= 0:
        raise PreconditionError("series has no pole")
    entries = _entries(a)
    n = a.n
    for q in range(1, q_max + 1):
        top = exponent_bound * q
        for alpha in product(range(top + 1), repeat=n):
            if min(alpha) != 0:
                continue
            if q > 1 and gcd(q, *alpha) > 1:
                continue
            val, lead = _sheared_leading(entries, alpha, q, n)
            if lead is None or val >= 0 or is_nilpotent(lead):
                continue
            s = Shearing(q, alpha)
            if _acceptable(apply_shearing(a, s)):
                return s
    return NOT_FOUND
