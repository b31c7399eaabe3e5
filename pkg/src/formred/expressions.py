"""Human-input sugar: matrices of Laurent/Puiseux polynomials written as text.

Entries look like ``"x^-3 - x^-1"``, ``"2*x^-1"``, ``"1/2*x^(1/2)"`` or
``"-3"``.  They are desugared into the coefficient mapping of a
:class:`~formred.pseries.PuiseuxMatrix` before anything else happens.
"""

from fractions import Fraction
import re

from .conlinalg import zeros
from .pseries import PuiseuxMatrix

__all__ = ["parse_entry", "system_from_expressions"]

_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?P<coef>\d+(?:/\d+)?)?\s*
        (?P<star>\*)?\s*
        (?P<x>x(?:\s*\^\s*(?P<exp>\(\s*-?\d+(?:/\d+)?\s*\)|-?\d+))?)?\s*""",
    re.VERBOSE,
)


def parse_entry(text):
    """Parse one entry into ``{exponent: coefficient}``."""
    text = str(text).strip()
    if not text:
        raise ValueError("empty entry")
    out = {}
    pos = 0
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse entry {text!r} at position {pos}")
        if not first and not m.group("sign"):
            raise ValueError(f"missing operator in entry {text!r}")
        if not m.group("coef") and not m.group("x"):
            raise ValueError(f"dangling operator in entry {text!r}")
        if m.group("star") and not (m.group("coef") and m.group("x")):
            raise ValueError(f"misplaced '*' in entry {text!r}")
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        if m.group("sign") == "-":
            coef = -coef
        if m.group("x"):
            exp = m.group("exp")
            e = Fraction(exp.strip("() ")) if exp else Fraction(1)
        else:
            e = Fraction(0)
        out[e] = out.get(e, Fraction(0)) + coef
        pos = m.end()
        first = False
    return {e: c for e, c in out.items() if c != 0}


def system_from_expressions(rows, known_exponent, multiplier_exponent=0):
    """Series from a square array of entry strings.

    ``multiplier_exponent`` multiplies every entry by ``x**e`` (useful when a
    matrix is displayed as ``x^-1 A(x)``).  ``known_exponent`` is the largest
    exponent declared known; polynomial input is exact, so any bound the
    caller is willing to vouch for is legitimate.
    """
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("expression matrix must be square")
    shift = Fraction(multiplier_exponent)
    terms = {}
    for i, row in enumerate(rows):
        for k, text in enumerate(row):
            for e, c in parse_entry(text).items():
                e = e + shift
                if e not in terms:
                    terms[e] = zeros(n)
                terms[e][i, k] += c
    if not terms:
        return PuiseuxMatrix.zero(n, int(known_exponent))
    return PuiseuxMatrix.from_terms(terms, known_exponent)
