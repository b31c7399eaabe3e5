"""Dense univariate polynomials over an exact field.

A polynomial is a tuple of coefficients ordered from the constant term
upwards, with no trailing zeros; the zero polynomial is ``()``.  The
coefficients may be :class:`fractions.Fraction` or any field element that
supports ``+ - * /`` and comparison with ``0`` (``CycloNumber`` does).
"""

from fractions import Fraction
from math import gcd, isqrt

import sympy

__all__ = [
    "trim", "degree", "padd", "psub", "pmul", "pscale", "pdivmod", "pgcd",
    "pmonic", "ppow", "pderiv", "peval", "peval_matrix", "inflate", "deflate",
    "squarefree_decomposition", "rational_roots", "factor_rational",
    "coprime_split",
    "format_poly",
]


def _field(c):
    # keep int division exact
    return Fraction(c) if isinstance(c, int) else c


def trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def degree(p):
    return len(trim(p)) - 1


def padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    return trim(tuple(x + y for x, y in zip(a, b)) + tuple(a[len(b):]))


def psub(a, b):
    return padd(a, tuple(-c for c in b))


def pscale(a, c):
    return trim(tuple(x * c for x in a))


def pmul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return trim(out)


def pdivmod(a, b):
    """Euclidean division ``a = quot*b + rem`` over a field."""
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(trim(a))
    db = len(b) - 1
    lead = _field(b[-1])
    if len(rem) - 1 < db:
        return (), tuple(rem)
    quot = [0] * (len(rem) - db)
    for k in range(len(rem) - 1 - db, -1, -1):
        c = rem[k + db] / lead
        quot[k] = c
        if c != 0:
            for i, y in enumerate(b):
                rem[k + i] -= c * y
    return trim(quot), trim(rem[:db])


def pmonic(a):
    a = trim(a)
    if not a:
        return a
    lead = _field(a[-1])
    return tuple(c / lead for c in a)


def pgcd(a, b):
    """Monic greatest common divisor."""
    a, b = trim(a), trim(b)
    while b:
        a, b = b, pdivmod(a, b)[1]
    return pmonic(a)


def ppow(a, k):
    out = (Fraction(1),)
    for _ in range(k):
        out = pmul(out, a)
    return out


def pderiv(a):
    return trim(tuple(i * c for i, c in enumerate(a))[1:])


def peval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def peval_matrix(a, m):
    """Evaluate ``a`` at a square matrix by Horner's rule."""
    import numpy as np

    n = m.shape[0]
    eye = np.zeros((n, n), dtype=object)
    for i in range(n):
        eye[i, i] = Fraction(1)
    acc = np.full((n, n), Fraction(0), dtype=object)
    for c in reversed(trim(a)):
        acc = acc @ m + eye * c
    return acc


def inflate(a, q):
    """Return ``a(t**q)``."""
    if q == 1 or not a:
        return tuple(a)
    out = [0] * ((len(a) - 1) * q + 1)
    for i, c in enumerate(a):
        out[i * q] = c
    return trim(out)


def deflate(a, q):
    """Return ``b`` with ``a(t) = t**s * b(t**q)`` where ``s = deg(a) mod q``.

    Raises ``ValueError`` when ``a`` has no such form.
    """
    a = trim(a)
    if not a:
        return (), 0
    shift = (len(a) - 1) % q
    out = []
    for i, c in enumerate(a):
        if (i - shift) % q:
            if c != 0:
                raise ValueError("polynomial is not of the form t^s b(t^q)")
            continue
        if i >= shift:
            out.append(c)
        elif c != 0:
            raise ValueError("polynomial is not of the form t^s b(t^q)")
    return trim(out), shift


def squarefree_decomposition(a):
    """Yun's algorithm: return ``[(f_1, 1), (f_2, 2), ...]`` with monic
    pairwise-coprime squarefree ``f_i`` and ``a = lc * prod f_i**i``.
    Factors equal to 1 are dropped."""
    a = pmonic(a)
    if degree(a) < 1:
        return []
    da = pderiv(a)
    g = pgcd(a, da)
    b = pdivmod(a, g)[0]
    c = pdivmod(da, g)[0]
    d = psub(c, pderiv(b))
    out = []
    i = 1
    while degree(b) > 0:
        f = pgcd(b, d)
        b = pdivmod(b, f)[0]
        c = pdivmod(d, f)[0]
        d = psub(c, pderiv(b))
        if degree(f) > 0:
            out.append((pmonic(f), i))
        i += 1
    return out


def _divisors(m):
    m = abs(m)
    small, large = [], []
    for d in range(1, isqrt(m) + 1):
        if m % d == 0:
            small.append(d)
            if d * d != m:
                large.append(m // d)
    return small + large[::-1]


def rational_roots(a):
    """Distinct rational roots of a polynomial with rational coefficients,
    in ascending order."""
    a = trim(a)
    if degree(a) < 1:
        return []
    roots = []
    # strip the zero roots first
    k = 0
    while a[k] == 0:
        k += 1
    if k:
        roots.append(Fraction(0))
        a = a[k:]
    if degree(a) < 1:
        return roots
    den = 1
    for c in a:
        den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in a]
    cands = set()
    for p in _divisors(ints[0]):
        for s in _divisors(ints[-1]):
            cands.add(Fraction(p, s))
            cands.add(Fraction(-p, s))
    roots.extend(c for c in cands if peval(a, c) == 0)
    return sorted(roots)


def _multiplicity(a, c):
    lin = (-c, Fraction(1))
    m = 0
    while True:
        quot, rem = pdivmod(a, lin)
        if rem:
            return m
        a, m = quot, m + 1


def factor_rational(a):
    """Complete factorization over Q: ``[(monic irreducible, multiplicity)]``.

    Factors are sorted by degree, then coefficients, so the order is stable.
    """
    a = trim(a)
    if degree(a) < 1:
        return []
    t = sympy.Symbol("t")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator)
                       for c in map(Fraction, reversed(a))], t, domain="QQ")
    out = []
    for f, m in poly.factor_list()[1]:
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(f.monic().all_coeffs())]
        out.append((tuple(coeffs), m))
    out.sort(key=lambda fm: (len(fm[0]), fm[0]))
    return out


def coprime_split(a):
    """A nontrivial factorization ``a = f*g`` with ``gcd(f, g) = 1``, or None.

    For rational coefficients ``f`` is the first primary component of the
    complete factorization over Q; otherwise only the squarefree
    decomposition is used.  ``f`` and ``g`` are monic.
    """
    a = pmonic(a)
    if degree(a) < 2:
        return None
    if all(isinstance(c, (int, Fraction)) for c in a):
        parts = factor_rational(a)
        if len(parts) < 2:
            return None
        f = ppow(*parts[0])
        return f, pdivmod(a, f)[0]
    parts = squarefree_decomposition(a)
    if len(parts) > 1:
        f0, i0 = parts[0]
        f = ppow(f0, i0)
        return f, pdivmod(a, f)[0]
    return None


def format_poly(a, var="λ"):
    """Human-readable rendering, highest degree first."""
    a = trim(a)
    if not a:
        return "0"
    terms = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mono:
            terms.append(str(c))
        elif c == 1:
            terms.append(mono)
        elif c == -1:
            terms.append("-" + mono)
        else:
            terms.append(f"({c})*{mono}" if not isinstance(c, (int, Fraction)) else f"{c}*{mono}")
    return " + ".join(terms).replace("+ -", "- ")
