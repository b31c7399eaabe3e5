"""Reference computations that share no code with the package.

Series are turned into sympy matrices in ``t`` with ``x = t^q``; products
are truncated by degree and inverses are built as a Neumann series, so
nothing here reuses the package's recursions.
"""

from fractions import Fraction

import sympy as sp

t = sp.Symbol("t")


def rat(v):
    v = Fraction(v)
    return sp.Rational(v.numerator, v.denominator)


def to_sympy(a, q=None):
    """Matrix of Laurent polynomials in ``t`` (``x = t^q``) for a rational series."""
    q = a.q if q is None else q
    m = sp.zeros(a.n, a.n)
    for e, mat in a.terms():
        te = e * q
        assert te.denominator == 1, "series does not fit the requested frame"
        for i in range(a.n):
            for k in range(a.n):
                if mat[i, k] != 0:
                    m[i, k] += rat(mat[i, k]) * t ** int(te)
    return m


def truncate(m, deg):
    """Drop every term of degree above ``deg`` in ``t``."""
    out = sp.zeros(*m.shape)
    for idx in range(len(m)):
        keep = 0
        for term in sp.Add.make_args(sp.expand(m[idx])):
            _, e = term.as_coeff_exponent(t)
            if e <= deg:
                keep += term
        out[idx] = keep
    return out


def _constant(expr):
    total = 0
    for term in sp.Add.make_args(sp.expand(expr)):
        c, e = term.as_coeff_exponent(t)
        if e == 0:
            total += c
    return total


def coeff_at(expr, e):
    total = 0
    for term in sp.Add.make_args(sp.expand(expr)):
        c, d = term.as_coeff_exponent(t)
        if d == e:
            total += c
    return total


def inverse(h, deg):
    """``H^-1`` through degree ``deg`` for ``H`` with an invertible constant term."""
    h0 = h.applyfunc(lambda v: _constant(v))
    h0inv = h0.inv()
    nmat = truncate(h0inv * (h - h0), deg)
    acc = sp.eye(h.shape[0])
    power = sp.eye(h.shape[0])
    for _ in range(2 * deg + 2):
        power = truncate(-nmat * power, deg)
        if power == sp.zeros(*h.shape):
            break
        acc += power
    return truncate(acc * h0inv, deg)


def gauge(a, h, q, deg, pole):
    """``H^-1 (A H - x H')`` through ``t``-degree ``deg``.

    ``a`` and ``h`` are sympy matrices in ``t``; ``pole`` bounds the order of
    the pole of ``a`` in ``t``.
    """
    x_der = h.applyfunc(lambda v: sp.expand(t * sp.diff(v, t) / q))
    rhs = truncate(a * h - x_der, deg + pole)
    return truncate(inverse(h, deg + 2 * pole) * rhs, deg)
