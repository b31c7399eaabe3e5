"""Exact scalars: rationals and the cyclotomic fields Q(w).

Rationals are plain :class:`fractions.Fraction` values.  An element of
``Q(w)``, ``w`` a primitive ``q``-th root of unity, is stored as its
coefficient vector in the power basis ``1, w, ..., w^(d-1)`` where ``d`` is
the degree of the ``q``-th cyclotomic polynomial.  Rationals embed into any
context automatically, so matrices may freely mix the two.
"""

from fractions import Fraction
from functools import lru_cache
import re

from .polynomials import pdivmod, pmul, psub, trim

__all__ = [
    "Rational", "CycloContext", "CycloNumber", "cyclo_context", "omega_power",
    "field_arith", "as_scalar", "parse_rational", "format_rational",
    "is_rational", "scalar_to_json", "scalar_from_json",
]

Rational = Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text):
    """Parse ``"a/b"`` or ``"a"`` (optional sign, decimal digits)."""
    if isinstance(text, bool):
        raise ValueError(f"malformed rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    m = _RATIONAL_RE.match(str(text))
    if not m:
        raise ValueError(f"malformed rational: {text!r}")
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(int(m.group(1)), den)


def format_rational(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@lru_cache(maxsize=None)
def _cyclotomic(q):
    """Integer coefficients of Phi_q, constant term first."""
    num = (-1,) + (0,) * (q - 1) + (1,)
    for d in range(1, q):
        if q % d == 0:
            num, rem = pdivmod(num, _cyclotomic(d))
            assert not rem
    return tuple(int(c) for c in num)


class CycloContext:
    """The field ``Q[t]/Phi_q(t)``; ``t`` plays the role of ``w = exp(2 pi i/q)``."""

    __slots__ = ("q", "minimal_polynomial", "degree", "_powers")

    def __init__(self, q):
        if q < 1:
            raise ValueError("order must be a positive integer")
        self.q = q
        self.minimal_polynomial = _cyclotomic(q)
        self.degree = len(self.minimal_polynomial) - 1
        # reductions of t^k mod Phi_q for k < 2*degree
        phi = self.minimal_polynomial
        powers = []
        for k in range(2 * self.degree):
            mono = (0,) * k + (1,)
            rem = pdivmod(mono, phi)[1]
            powers.append(tuple(Fraction(c) for c in rem) + (Fraction(0),) * (self.degree - len(rem)))
        self._powers = powers

    def __repr__(self):
        return f"CycloContext({self.q})"

    def __eq__(self, other):
        return isinstance(other, CycloContext) and other.q == self.q

    def __hash__(self):
        return hash(("CycloContext", self.q))

    def reduce(self, coeffs):
        d = self.degree
        out = [Fraction(0)] * d
        for k, c in enumerate(coeffs):
            if c == 0:
                continue
            if k < d:
                out[k] += c
            else:
                for i, v in enumerate(self._powers[k] if k < len(self._powers)
                                      else self._slow_power(k)):
                    if v:
                        out[i] += c * v
        return tuple(out)

    def _slow_power(self, k):
        rem = pdivmod((0,) * k + (1,), self.minimal_polynomial)[1]
        return tuple(Fraction(c) for c in rem) + (Fraction(0),) * (self.degree - len(rem))

    def element(self, coeffs):
        return CycloNumber(self, self.reduce([Fraction(c) for c in coeffs]))

    @property
    def omega(self):
        return omega_power(self, 1)


@lru_cache(maxsize=None)
def cyclo_context(q):
    """Context for ``Q(w)``, ``w`` a primitive ``q``-th root of unity.

    ``q = 1`` is allowed and degenerates to the rationals with ``w = 1``.
    """
    return CycloContext(q)


class CycloNumber:
    """Immutable element of ``Q(w)``."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx, coeffs):
        if len(coeffs) != ctx.degree:
            raise ValueError("coefficient vector has the wrong length")
        self.ctx = ctx
        self.coeffs = tuple(coeffs)

    # -- helpers -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, CycloNumber):
            if other.ctx.q != self.ctx.q:
                raise ValueError(
                    f"mixing Q(w) of orders {self.ctx.q} and {other.ctx.q}")
            return other.coeffs
        if isinstance(other, (int, Fraction)):
            return (Fraction(other),) + (Fraction(0),) * (self.ctx.degree - 1)
        return None

    def is_zero(self):
        return not any(self.coeffs)

    def is_rational(self):
        return not any(self.coeffs[1:])

    def to_rational(self):
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0]

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycloNumber(self.ctx, tuple(a + b for a, b in zip(self.coeffs, o)))

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber(self.ctx, tuple(-a for a in self.coeffs))

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycloNumber(self.ctx, tuple(a - b for a, b in zip(self.coeffs, o)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycloNumber(self.ctx, tuple(b - a for a, b in zip(self.coeffs, o)))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloNumber(self.ctx, tuple(a * other for a in self.coeffs))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self.ctx.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o):
                    if b:
                        prod[i + j] += a * b
        return CycloNumber(self.ctx, self.ctx.reduce(prod))

    __rmul__ = __mul__

    def inverse(self):
        """Inverse via the extended Euclidean algorithm against Phi_q."""
        if self.is_zero():
            raise ZeroDivisionError("division by zero in Q(w)")
        phi = tuple(Fraction(c) for c in self.ctx.minimal_polynomial)
        r0, r1 = phi, trim(self.coeffs)
        s0, s1 = (), (Fraction(1),)
        while len(r1) > 1:
            quot, rem = pdivmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, psub(s0, pmul(quot, s1))
        # r1 is a nonzero constant since Phi_q is irreducible
        c = r1[0]
        return CycloNumber(self.ctx, self.ctx.reduce([x / c for x in s1]))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(w)")
            return CycloNumber(self.ctx, tuple(a / other for a in self.coeffs))
        if isinstance(other, CycloNumber):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = CycloNumber(self.ctx, self._coerce(1))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparison ----------------------------------------------------
    def __eq__(self, other):
        o = self._coerce(other) if isinstance(other, (int, Fraction, CycloNumber)) else None
        if o is None:
            return NotImplemented
        return self.coeffs == tuple(o)

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __bool__(self):
        return not self.is_zero()

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.ctx.q, self.coeffs))

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("w" if k == 1 else f"w^{k}")
            terms.append(format_rational(c) + ("*" + mono if mono else ""))
        return f"{' + '.join(terms) or '0'} [q={self.ctx.q}]"


def omega_power(ctx, k):
    """``w**(k mod q)`` as a reduced element of ``ctx``."""
    k %= ctx.q
    return CycloNumber(ctx, ctx.reduce([Fraction(0)] * k + [Fraction(1)]))


def is_rational(x):
    return isinstance(x, (int, Fraction)) or (isinstance(x, CycloNumber) and x.is_rational())


def as_scalar(x):
    """Canonicalize ints/strings to Fraction; leave CycloNumbers alone."""
    if isinstance(x, CycloNumber):
        return x
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"not an exact scalar: {x!r}")


_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "neg": lambda a, b: -a,
    "eq": lambda a, b: a == b,
    "is_zero": lambda a, b: a == 0,
}


def field_arith(a, b, op):
    """Dispatch one exact field operation by name."""
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown field operation {op!r}") from None
    a = as_scalar(a)
    b = as_scalar(b) if b is not None else None
    if op == "div" and b == 0:
        raise ZeroDivisionError("division by zero")
    return fn(a, b)


def scalar_to_json(x):
    """Rationals as ``"a/b"``; elements of Q(w) as coefficient-string lists."""
    if isinstance(x, CycloNumber):
        return [format_rational(c) for c in x.coeffs]
    return format_rational(x)


def scalar_from_json(obj, ctx=None):
    if isinstance(obj, list):
        if ctx is None:
            raise ValueError("cyclotomic entry without a field order")
        if len(obj) != ctx.degree:
            raise ValueError("cyclotomic entry has the wrong length")
        return CycloNumber(ctx, tuple(parse_rational(c) for c in obj))
    return parse_rational(obj)
