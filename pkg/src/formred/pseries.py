"""Truncated Puiseux matrix series and the gauge action.

A :class:`PuiseuxMatrix` stores

    A(x) = x^(-pole) * sum_j A_j x^(j/q),     0 <= j <= known_through,

sparsely as a mapping ``j -> A_j``.  Every coefficient with index at most
``known_through`` is exact and complete; nothing beyond it is known.

Budget rules (all in a common frame, ``v`` the leading index of a factor,
or ``known_through + 1`` for a zero factor):

* sum: the smaller of the two budgets;
* product: ``min(J_A + v_B, J_B + v_A)``;
* theta derivative, scalar and constant-matrix multiples: unchanged;
* inverse of a unit series: the budget of the input (or less on request);
* refining ``q -> m q`` maps ``J -> m J + m - 1`` because the coarser
  series has no terms strictly between consecutive coarse lattice points.
"""

from fractions import Fraction
from math import ceil, floor, gcd, lcm

import numpy as np

from .conlinalg import (
    as_matrix, identity, is_zero_matrix, matrices_equal, mat_inverse, zeros,
)
from .exactfield import (
    CycloNumber, cyclo_context, omega_power, scalar_from_json, scalar_to_json,
)

__all__ = [
    "PuiseuxMatrix", "normalize", "series_add", "series_mul", "invert_unit",
    "invert", "theta_derivative", "gauge_transform", "monodromy_substitute",
    "is_unramified", "exponential_shift", "conjugate", "to_document",
    "from_document", "first_discrepancy",
]


def _freeze(m):
    m = np.array(m, dtype=object, copy=True)
    m.setflags(write=False)
    return m


def _simplify_scalar(v):
    if isinstance(v, CycloNumber) and v.is_rational():
        return v.coeffs[0]
    if isinstance(v, int):
        return Fraction(v)
    return v


class PuiseuxMatrix:
    """Immutable truncated series ``x^(-pole) sum_j A_j x^(j/q)`` of n x n matrices."""

    __slots__ = ("n", "q", "pole", "coeffs", "known_through")

    def __init__(self, n, q, pole, coeffs, known_through):
        if q < 1:
            raise ValueError("ramification index must be >= 1")
        if pole < 0:
            raise ValueError("pole order must be >= 0")
        clean = {}
        for j, m in coeffs.items():
            j = int(j)
            if j < 0:
                raise ValueError(f"negative coefficient index {j}")
            if j > known_through:
                continue
            m = np.asarray(m, dtype=object)
            if m.shape != (n, n):
                raise ValueError(f"coefficient {j} has shape {m.shape}, expected {(n, n)}")
            if is_zero_matrix(m):
                continue
            if any(isinstance(v, int) or isinstance(v, CycloNumber) and v.is_rational()
                   for v in m.flat):
                m = np.vectorize(_simplify_scalar, otypes=[object])(m)
            clean[j] = _freeze(m)
        self.n = n
        self.q = q
        self.pole = pole
        self.coeffs = dict(sorted(clean.items()))
        self.known_through = int(known_through)

    # -- constructors --------------------------------------------------
    @classmethod
    def zero(cls, n, known_through, q=1, pole=0):
        return cls(n, q, pole, {}, known_through)

    @classmethod
    def constant(cls, m, known_through):
        m = as_matrix(m)
        return cls(m.shape[0], 1, 0, {0: m}, known_through)

    @classmethod
    def identity(cls, n, known_through):
        return cls.constant(identity(n), known_through)

    @classmethod
    def from_terms(cls, terms, known_exponent, q=1):
        """Build from ``{exponent: matrix}`` with rational exponents.

        The frame is the coarsest one holding every exponent, refined to a
        multiple of ``q``; ``known_exponent`` is the largest exponent known.
        """
        terms = {Fraction(e): as_matrix(m) for e, m in terms.items()}
        known_exponent = Fraction(known_exponent)
        for e in terms:
            q = lcm(q, e.denominator)
        n = next(iter(terms.values())).shape[0] if terms else None
        if n is None:
            raise ValueError("cannot infer dimension from an empty term list")
        low = min(terms) if terms else Fraction(0)
        pole = max(0, ceil(-low))
        coeffs = {int((e + pole) * q): m for e, m in terms.items()}
        return cls(n, q, pole, coeffs, floor((known_exponent + pole) * q))

    # -- basic queries -------------------------------------------------
    def __repr__(self):
        return (f"PuiseuxMatrix(n={self.n}, q={self.q}, pole={self.pole}, "
                f"indices={list(self.coeffs)}, known_through={self.known_through})")

    def exponent(self, j):
        return Fraction(j, self.q) - self.pole

    def index(self, e):
        """Index of exponent ``e`` in this frame (must lie on the lattice)."""
        j = (Fraction(e) + self.pole) * self.q
        if j.denominator != 1:
            raise ValueError(f"exponent {e} is not on the 1/{self.q} lattice")
        return int(j)

    @property
    def known_exponent(self):
        return self.exponent(self.known_through)

    @property
    def is_zero(self):
        return not self.coeffs

    @property
    def leading_index(self):
        return next(iter(self.coeffs)) if self.coeffs else None

    @property
    def leading_matrix(self):
        return self.coeffs[self.leading_index] if self.coeffs else None

    @property
    def valuation(self):
        """Smallest exponent with a nonzero coefficient (None for zero)."""
        return None if self.is_zero else self.exponent(self.leading_index)

    def _val_index(self):
        return self.leading_index if self.coeffs else self.known_through + 1

    def coeff(self, j):
        m = self.coeffs.get(j)
        if m is None:
            if j > self.known_through:
                raise IndexError(f"coefficient {j} beyond known_through={self.known_through}")
            return zeros(self.n)
        return m

    def terms(self):
        """Iterate ``(exponent, matrix)`` pairs over the stored coefficients."""
        for j, m in self.coeffs.items():
            yield self.exponent(j), m

    def entry(self, i, k):
        """Entry ``(i, k)`` as ``{exponent: scalar}``."""
        return {self.exponent(j): m[i, k] for j, m in self.coeffs.items() if m[i, k] != 0}

    # -- frames --------------------------------------------------------
    def reframe(self, q=None, pole=None):
        """Same series in the frame ``(q, pole)``; ``q`` must be a multiple of self.q."""
        q = self.q if q is None else q
        pole = self.pole if pole is None else pole
        if q % self.q:
            raise ValueError(f"cannot reframe q={self.q} to q={q}")
        m = q // self.q
        shift = q * (pole - self.pole)
        coeffs = {}
        for j, c in self.coeffs.items():
            nj = j * m + shift
            if nj < 0:
                raise ValueError("target pole too small for the stored terms")
            coeffs[nj] = c
        return PuiseuxMatrix(self.n, q, pole, coeffs, self.known_through * m + (m - 1) + shift)

    def truncate(self, known_through):
        return PuiseuxMatrix(self.n, self.q, self.pole, self.coeffs,
                             min(known_through, self.known_through))

    def truncate_exponent(self, e):
        return self.truncate(floor((Fraction(e) + self.pole) * self.q))

    def map(self, fn):
        """Apply ``fn(matrix, index)`` to every stored coefficient."""
        return PuiseuxMatrix(self.n, self.q, self.pole,
                             {j: fn(m, j) for j, m in self.coeffs.items()},
                             self.known_through)

    def submatrix(self, rows, cols):
        """Square sub-series on the given row and column indices."""
        rows, cols = list(rows), list(cols)
        if len(rows) != len(cols):
            raise ValueError("submatrix must be square")
        return PuiseuxMatrix(len(rows), self.q, self.pole,
                             {j: m[np.ix_(rows, cols)] for j, m in self.coeffs.items()},
                             self.known_through)

    def block(self, rows, cols):
        """Rectangular block as ``{index: matrix}`` in this frame."""
        rows, cols = list(rows), list(cols)
        return {j: m[np.ix_(rows, cols)] for j, m in self.coeffs.items()
                if not is_zero_matrix(m[np.ix_(rows, cols)])}

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        return series_add(self, other)

    def __neg__(self):
        return self.map(lambda m, j: -m)

    def __sub__(self, other):
        return series_add(self, -other)

    def __matmul__(self, other):
        if isinstance(other, PuiseuxMatrix):
            return series_mul(self, other)
        other = np.asarray(other, dtype=object)
        return self.map(lambda m, j: m @ other)

    def __rmatmul__(self, other):
        other = np.asarray(other, dtype=object)
        return self.map(lambda m, j: other @ m)

    def scale(self, c):
        return self.map(lambda m, j: m * c)

    # -- comparison ----------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, PuiseuxMatrix) or other.n != self.n:
            return NotImplemented if not isinstance(other, PuiseuxMatrix) else False
        if self.known_exponent != other.known_exponent:
            return False
        a, b = _common_frame(self, other)
        if a.known_through != b.known_through or a.coeffs.keys() != b.coeffs.keys():
            return False
        return all(matrices_equal(a.coeffs[j], b.coeffs[j]) for j in a.coeffs)

    __hash__ = None


def _common_frame(a, b):
    q = lcm(a.q, b.q)
    pole = max(a.pole, b.pole)
    return a.reframe(q, pole), b.reframe(q, pole)


def first_discrepancy(a, b):
    """First exponent where ``a`` and ``b`` differ within their common budget.

    Returns ``(None, certified_exponent)`` when they agree.
    """
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    a, b = _common_frame(a, b)
    budget = min(a.known_through, b.known_through)
    for j in sorted(set(a.coeffs) | set(b.coeffs)):
        if j > budget:
            break
        if not matrices_equal(a.coeff(j), b.coeff(j)):
            return a.exponent(j), a.exponent(budget)
    return None, a.exponent(budget)


def series_add(a, b):
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    a, b = _common_frame(a, b)
    budget = min(a.known_through, b.known_through)
    coeffs = dict(a.coeffs)
    for j, m in b.coeffs.items():
        coeffs[j] = coeffs[j] + m if j in coeffs else m
    return PuiseuxMatrix(a.n, a.q, a.pole, coeffs, budget)


def series_mul(a, b):
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    q = lcm(a.q, b.q)
    a, b = a.reframe(q), b.reframe(q)
    budget = min(a.known_through + b._val_index(), b.known_through + a._val_index())
    coeffs = {}
    for i, ma in a.coeffs.items():
        for j, mb in b.coeffs.items():
            k = i + j
            if k > budget:
                break
            prod = ma @ mb
            coeffs[k] = coeffs[k] + prod if k in coeffs else prod
    return PuiseuxMatrix(a.n, q, a.pole + b.pole, coeffs, budget)


def normalize(a):
    """Canonical frame: smallest ramification, leading index in ``[0, q)``.

    The pole is never pushed below zero, so series with positive valuation
    keep ``pole = 0`` and a larger leading index.  The zero series is
    returned unchanged.
    """
    if a.is_zero:
        return a
    g = a.q
    for j in a.coeffs:
        g = gcd(g, j)
        if g == 1:
            break
    if g > 1:
        a = PuiseuxMatrix(a.n, a.q // g, a.pole, {j // g: m for j, m in a.coeffs.items()},
                          a.known_through // g)
    p = a.leading_index
    s = min(p // a.q, a.pole)
    if s:
        a = a.reframe(a.q, a.pole - s)
    return a


def shift_exponent(a, e):
    """Multiply by ``x^e``."""
    e = Fraction(e)
    q = lcm(a.q, e.denominator)
    a = a.reframe(q)
    d = int(e * q)
    low = (a.leading_index if a.coeffs else 0) + d
    extra = max(0, ceil(Fraction(-low, q))) if low < 0 else 0
    a = a.reframe(q, a.pole + extra)
    return PuiseuxMatrix(a.n, q, a.pole, {j + d: m for j, m in a.coeffs.items()},
                         a.known_through + d)


def invert_unit(t, order=None):
    """Inverse of a unit series (no negative powers, invertible constant term).

    ``(T^-1)_h = -T_0^-1 sum_{i=1..h} T_i (T^-1)_{h-i}``, computed through
    ``min(t.known_through, order)`` in the frame of ``t`` with pole 0.
    """
    if not t.is_zero and t.valuation < 0:
        raise ValueError("not a unit series: negative powers present")
    t = t.reframe(t.q, 0) if t.pole else t
    t0 = t.coeff(0) if t.known_through >= 0 else None
    if t0 is None or t.is_zero:
        raise ValueError("not a unit series")
    try:
        t0inv = mat_inverse(t0)
    except ZeroDivisionError:
        raise ValueError("not a unit series: singular constant term") from None
    last = t.known_through if order is None else min(order, t.known_through)
    inv = {0: t0inv}
    tail = [(i, m) for i, m in t.coeffs.items() if i > 0]
    for h in range(1, last + 1):
        acc = None
        for i, m in tail:
            if i > h:
                break
            s = inv.get(h - i)
            if s is None:
                continue
            prod = m @ s
            acc = prod if acc is None else acc + prod
        if acc is not None:
            inv[h] = -(t0inv @ acc)
    return PuiseuxMatrix(t.n, t.q, 0, inv, last)


def invert(t, order=None):
    """Inverse of a Laurent series whose leading coefficient is invertible.

    ``order`` caps the known exponent of the result.
    """
    if t.is_zero:
        raise ValueError("not a unit series: zero")
    v = t.valuation
    u = normalize(shift_exponent(t, -v))
    idx = None
    if order is not None:
        idx = floor((Fraction(order) + v) * u.q)
    return shift_exponent(invert_unit(u, idx), -v)


def theta_derivative(a):
    """``x d/dx`` applied coefficientwise: ``A_j -> (j/q - pole) A_j``."""
    return a.map(lambda m, j: m * a.exponent(j))


def gauge_transform(t, a, inverse=None, through=None):
    """``T[A] = T^-1 A T - T^-1 x dT/dx``.

    ``inverse`` may supply ``T^-1`` (e.g. when it is known in closed form);
    otherwise it is computed to exactly the budget the result can support.
    ``through`` optionally caps the known exponent of the result.
    """
    if t.n != a.n:
        raise ValueError("dimension mismatch")
    x = a @ t - theta_derivative(t)
    v_t = t.valuation
    v_x = x.valuation if not x.is_zero else x.known_exponent
    target = x.known_exponent - v_t
    if through is not None:
        target = min(target, Fraction(through))
    if inverse is None:
        inverse = invert(t, target - v_x)
    b = inverse @ x
    if through is not None:
        b = b.truncate_exponent(min(b.known_exponent, Fraction(through)))
    return b


def conjugate(a, c, cinv=None):
    """Constant similarity ``C^-1 A C`` (the gauge action of a constant C)."""
    cinv = mat_inverse(c) if cinv is None else cinv
    return a.map(lambda m, j: cinv @ m @ c)


def monodromy_substitute(a, ctx=None):
    """``A(e^(2 pi i) x)``: coefficient ``j`` is multiplied by ``w^j``."""
    ctx = cyclo_context(a.q) if ctx is None else ctx
    if ctx.q != a.q:
        a = a.reframe(ctx.q) if ctx.q % a.q == 0 else None
        if a is None:
            raise ValueError("context order must be a multiple of the series ramification")
    return a.map(lambda m, j: m * _simplify_scalar(omega_power(ctx, j)))


def is_unramified(a):
    return all(j % a.q == 0 for j in a.coeffs)


def exponential_shift(a, lam, k):
    """Coefficient matrix after ``y = exp(lam / x^k) z``: ``A + k lam x^-k I``."""
    k = Fraction(k)
    if k <= 0:
        raise ValueError("shift order must be positive")
    if lam == 0:
        return a
    term = PuiseuxMatrix.from_terms({-k: identity(a.n) * (k * lam)}, a.known_exponent)
    return series_add(a, term)


# -- JSON documents ---------------------------------------------------------

def to_document(a, **metadata):
    doc = {
        "n": a.n,
        "q": a.q,
        "pole": a.pole,
        "known_through": a.known_through,
        "coeffs": {str(j): [[scalar_to_json(v) for v in row] for row in m]
                   for j, m in a.coeffs.items()},
    }
    orders = {v.ctx.q for m in a.coeffs.values() for v in m.flat
              if isinstance(v, CycloNumber)}
    if orders:
        doc["field_order"] = orders.pop()
    doc.update({k: v for k, v in metadata.items() if v is not None})
    return doc


def from_document(doc):
    """Parse a system document; raises ``ValueError`` on malformed input."""
    try:
        n, q, pole, kt = doc["n"], doc["q"], doc["pole"], doc["known_through"]
        raw = doc["coeffs"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"missing field in series document: {exc}") from None
    for name, val in (("n", n), ("q", q), ("pole", pole), ("known_through", kt)):
        if not isinstance(val, int) or isinstance(val, bool):
            raise ValueError(f"field {name!r} must be an integer")
    if n < 1:
        raise ValueError("dimension must be positive")
    ctx = cyclo_context(doc["field_order"]) if "field_order" in doc else None
    coeffs = {}
    for key, rows in raw.items():
        try:
            j = int(key)
        except ValueError:
            raise ValueError(f"bad coefficient index {key!r}") from None
        if j < 0:
            raise ValueError(f"negative coefficient index {j}")
        if not isinstance(rows, list) or len(rows) != n or any(
                not isinstance(r, list) or len(r) != n for r in rows):
            raise ValueError(f"coefficient {j} is not an {n}x{n} array")
        m = np.empty((n, n), dtype=object)
        for i, r in enumerate(rows):
            for k, v in enumerate(r):
                m[i, k] = scalar_from_json(v, ctx)
        coeffs[j] = m
    return PuiseuxMatrix(n, q, pole, coeffs, kt)
