"""Ready-made systems and random instance generators.

Generators take a :class:`numpy.random.Generator` so that tests and demos
are reproducible from a seed.
"""

from fractions import Fraction
from math import gcd

from .conlinalg import (
    BlockPartition, block_diag, fitting_split, identity, is_nilpotent, mat_det,
    mat_inverse, zeros,
)
from .expressions import system_from_expressions
from .pseries import PuiseuxMatrix
from .shearing import Shearing, apply_shearing

__all__ = [
    "TWO_SLOPE_ROWS", "TWO_SLOPE_SHEAR", "two_slope_system",
    "random_unramified_system", "random_split_ready_system",
    "random_sheared_instance", "random_ramified_system",
]

# Entries of x^-1 A(x) for a 5x5 system with pole order 2 whose reduction
# needs ramification 2 for one block and 3 for the other.
TWO_SLOPE_ROWS = (
    ("0", "x^-3", "-x^-1", "1", "2*x^-1"),
    ("-x^-2", "x^-1", "0", "-x^-1", "0"),
    ("x^-1", "1", "0", "x^-3", "1"),
    ("1", "-x^-1", "1", "x^-1", "x^-3"),
    ("x^-1", "0", "-3*x^-1", "0", "-1"),
)

TWO_SLOPE_SHEAR = Shearing(2, (0, 1, 0, 1, 2))


def two_slope_system(known_exponent=120):
    """The polynomial system above; it is exact, so any known exponent is valid."""
    return system_from_expressions(TWO_SLOPE_ROWS, known_exponent, multiplier_exponent=1)


def _rand_int_matrix(rng, n, m=None, low=-3, high=3, density=1.0):
    m = n if m is None else m
    out = zeros(n, m)
    for i in range(n):
        for k in range(m):
            if rng.random() < density:
                out[i, k] = Fraction(int(rng.integers(low, high + 1)))
    return out


def random_unramified_system(rng, n, pole, terms, known_through=None, density=0.6):
    """``x^-pole (A_0 + ... + A_(terms-1) x^(terms-1))`` with small integer entries."""
    coeffs = {j: _rand_int_matrix(rng, n, density=density) for j in range(terms)}
    kt = terms - 1 if known_through is None else known_through
    return PuiseuxMatrix(n, 1, pole, coeffs, kt)


def _unimodular(rng, n):
    """Random integer matrix with determinant +-1 (product of elementary steps)."""
    m = identity(n)
    for _ in range(2 * n):
        i, k = rng.choice(n, size=2, replace=False) if n > 1 else (0, 0)
        if i != k:
            m[i] = m[i] + m[k] * Fraction(int(rng.integers(-2, 3)))
    return m


def _block_with_spectrum(rng, values):
    n = len(values)
    t = zeros(n)
    for i, v in enumerate(values):
        t[i, i] = Fraction(v)
        for k in range(i + 1, n):
            t[i, k] = Fraction(int(rng.integers(-2, 3)))
    u = _unimodular(rng, n)
    return mat_inverse(u) @ t @ u


def random_split_ready_system(rng, n, q, order, max_pole=2):
    """A ramified series whose leading matrix is ``diag(A11, A22)`` with
    disjoint integer spectra, known through ``p + order``.

    Returns ``(A, partition)``.
    """
    n1 = int(rng.integers(1, n))
    part = BlockPartition(n1, n - n1)
    pool = list(range(-6, 7))
    rng.shuffle(pool)
    spec1 = [pool[0] if rng.random() < 0.5 else pool[int(rng.integers(0, 2))] for _ in range(n1)]
    spec2 = [pool[2 + int(rng.integers(0, 3))] for _ in range(n - n1)]
    lead = block_diag(_block_with_spectrum(rng, spec1), _block_with_spectrum(rng, spec2))
    r = int(rng.integers(1, max_pole + 1))
    p = int(rng.integers(0, q * r))
    coeffs = {p: lead}
    for j in range(p + 1, p + order + 1):
        if rng.random() < 0.7:
            coeffs[j] = _rand_int_matrix(rng, n, density=0.5)
    return PuiseuxMatrix(n, q, r, coeffs, p + order), part


def random_sheared_instance(rng, n, q, terms, density=0.6, max_tries=200):
    """An unramified system ``A`` and a shearing ``S`` such that ``S[A]`` has a
    pole, ``gcd(p, q) = 1`` and a singular, non-nilpotent leading matrix.

    ``S[A]`` is drawn directly with the sparsity pattern forced by
    ``(w, P)``-commutativity (entry ``(i, k)`` of coefficient ``j`` vanishes
    unless ``j = a_k - a_i mod q``) and then unsheared.  The leading
    spectrum is closed under multiplication by ``w``, so ``n > q`` is needed.
    """
    if n <= q:
        raise ValueError("need n > q for a singular non-nilpotent leading matrix")
    for _ in range(max_tries):
        alpha = tuple(int(a) for a in rng.integers(0, q + 1, size=n))
        alpha = tuple(a - min(alpha) for a in alpha)
        p = int(rng.integers(1, q))
        if gcd(p, q) != 1:
            continue
        coeffs = {}
        for j in range(p, p + terms):
            m = zeros(n)
            for i in range(n):
                for k in range(n):
                    if (j - alpha[k] + alpha[i]) % q == 0 and rng.random() < density:
                        m[i, k] = Fraction(int(rng.integers(-3, 4)))
            coeffs[j] = m
        lead = coeffs[p]
        if mat_det(lead) == 0 and not is_nilpotent(lead):
            _, part = fitting_split(lead)
            if part.degenerate:
                continue
            r_hat = 1 + int(rng.integers(0, 2))
            a_hat = PuiseuxMatrix(n, q, r_hat, coeffs, p + terms - 1)
            shear = Shearing(q, alpha)
            return apply_shearing(a_hat, shear.inverse()), shear
    raise RuntimeError("no suitable instance found")


def random_ramified_system(rng, n, q, terms, pole=1, density=0.5):
    """Arbitrary series in the ``1/q`` frame (no structure imposed)."""
    coeffs = {j: _rand_int_matrix(rng, n, density=density) for j in range(terms)}
    return PuiseuxMatrix(n, q, pole, coeffs, terms - 1)

