"""Exact linear algebra on constant matrices.

Matrices are numpy object arrays holding ``Fraction`` or ``CycloNumber``
entries.  Spectral conditions are never decided through explicit
eigenvalues: they all reduce to the invertibility of an exact linear
operator, tested by fraction-free elimination.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from .exactfield import as_scalar, cyclo_context, omega_power
from .polynomials import pgcd, pmul, pmonic, peval_matrix, trim, degree

__all__ = [
    "Singular", "SINGULAR", "BlockPartition", "as_matrix", "identity", "zeros",
    "is_zero_matrix", "matrices_equal", "block_diag", "blocks", "rref",
    "mat_kernel", "mat_rank", "mat_det", "mat_inverse", "solve", "is_nilpotent",
    "mat_power", "char_poly", "sylvester_solve", "sylvester_operator",
    "fitting_split", "split_by_factors", "omega_disjoint", "primitive_vector",
]


class Singular:
    """Marker returned by :func:`sylvester_solve` for a non-invertible operator."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Singular"

    def __bool__(self):
        return False


SINGULAR = Singular()


@dataclass(frozen=True)
class BlockPartition:
    """Two diagonal blocks of sizes ``n1`` and ``n2``.

    A side of size zero marks a degenerate split (nothing to separate).
    """

    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError("block sizes must be nonnegative")

    @property
    def n(self):
        return self.n1 + self.n2

    @property
    def degenerate(self):
        return self.n1 == 0 or self.n2 == 0


def as_matrix(rows, shape=None):
    """Object array of exact scalars from nested lists (ints, strings, ...)."""
    if isinstance(rows, np.ndarray) and rows.dtype == object and rows.ndim == 2:
        out = np.empty(rows.shape, dtype=object)
        for idx, v in np.ndenumerate(rows):
            out[idx] = as_scalar(v)
        return out
    rows = [list(r) for r in rows]
    if shape is None:
        ncols = len(rows[0]) if rows else 0
        shape = (len(rows), ncols)
    if any(len(r) != shape[1] for r in rows) or len(rows) != shape[0]:
        raise ValueError("ragged matrix")
    out = np.empty(shape, dtype=object)
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            out[i, j] = as_scalar(v)
    return out


def zeros(n, m=None):
    return np.full((n, n if m is None else m), Fraction(0), dtype=object)


def identity(n):
    out = zeros(n)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def is_zero_matrix(m):
    return all(v == 0 for v in m.flat)


def matrices_equal(a, b):
    return a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))


def block_diag(a, b):
    n1, n2 = a.shape[0], b.shape[0]
    out = zeros(n1 + n2, a.shape[1] + b.shape[1])
    out[:n1, :a.shape[1]] = a
    out[n1:, a.shape[1]:] = b
    return out


def blocks(m, partition):
    """Return ``(m11, m12, m21, m22)`` for a square matrix."""
    k = partition.n1
    return m[:k, :k], m[:k, k:], m[k:, :k], m[k:, k:]


def rref(m):
    """Reduced row echelon form over the field; returns ``(R, pivot_columns)``."""
    r = np.array(m, dtype=object, copy=True)
    nrows, ncols = r.shape
    pivots = []
    row = 0
    for col in range(ncols):
        piv = next((i for i in range(row, nrows) if r[i, col] != 0), None)
        if piv is None:
            continue
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        inv = 1 / r[row, col]
        r[row] = r[row] * inv
        for i in range(nrows):
            if i != row and r[i, col] != 0:
                r[i] = r[i] - r[row] * r[i, col]
        pivots.append(col)
        row += 1
        if row == nrows:
            break
    return r, pivots


def primitive_vector(v):
    """Scale a rational vector to coprime integers with a positive leading entry."""
    if not all(isinstance(x, (int, Fraction)) for x in v):
        return v
    nz = [Fraction(x) for x in v if x != 0]
    if not nz:
        return v
    den = 1
    for x in nz:
        den = lcm(den, x.denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    sign = 1 if next(x for x in ints if x != 0) > 0 else -1
    out = np.empty(len(v), dtype=object)
    for i, x in enumerate(ints):
        out[i] = Fraction(sign * x // g)
    return out


def mat_kernel(m):
    """Basis of the right kernel, one vector per free column, in echelon order.

    Rational vectors are scaled to primitive integer vectors.
    """
    r, pivots = rref(m)
    ncols = m.shape[1]
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = np.full(ncols, Fraction(0), dtype=object)
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -r[i, f]
        basis.append(primitive_vector(v))
    return basis


def mat_rank(m):
    return len(rref(m)[1])


def _bareiss(m):
    """Fraction-free forward elimination on a copy of ``m``.

    Returns ``(U, swaps, rank_deficient)``.  Rational input is first scaled
    row-wise to integers so every intermediate is an integer minor.
    """
    u = np.array(m, dtype=object, copy=True)
    n = u.shape[0]
    prev = Fraction(1)
    swaps = 0
    for k in range(n):
        piv = next((i for i in range(k, n) if u[i, k] != 0), None)
        if piv is None:
            return u, swaps, True
        if piv != k:
            u[[k, piv]] = u[[piv, k]]
            swaps += 1
        for i in range(k + 1, n):
            for j in range(k + 1, u.shape[1]):
                u[i, j] = (u[i, j] * u[k, k] - u[i, k] * u[k, j]) / prev
            u[i, k] = Fraction(0)
        prev = u[k, k]
    return u, swaps, False


def _row_scales(m):
    scales = []
    for row in m:
        if all(isinstance(x, (int, Fraction)) for x in row):
            den = 1
            for x in row:
                den = lcm(den, Fraction(x).denominator)
            scales.append(Fraction(den))
        else:
            scales.append(Fraction(1))
    return scales


def mat_det(m):
    n = m.shape[0]
    if n == 0:
        return Fraction(1)
    scales = _row_scales(m)
    scaled = np.array([[x * s for x in row] for row, s in zip(m, scales)], dtype=object)
    u, swaps, deficient = _bareiss(scaled)
    if deficient:
        return Fraction(0)
    det = u[n - 1, n - 1] * (-1) ** swaps
    for s in scales:
        det = det / s
    return det


def solve(m, rhs):
    """Solve ``m @ X = rhs`` for square ``m``; returns None if ``m`` is singular.

    ``rhs`` may be a vector or a matrix of right-hand sides.
    """
    n = m.shape[0]
    vec = rhs.ndim == 1
    b = rhs.reshape(n, -1)
    aug = np.concatenate([m, b], axis=1)
    scales = _row_scales(aug)
    aug = np.array([[x * s for x in row] for row, s in zip(aug, scales)], dtype=object)
    u, _, deficient = _bareiss(aug)
    if deficient:
        return None
    k = b.shape[1]
    x = np.empty((n, k), dtype=object)
    for i in range(n - 1, -1, -1):
        for c in range(k):
            acc = u[i, n + c]
            for j in range(i + 1, n):
                acc = acc - u[i, j] * x[j, c]
            x[i, c] = acc / u[i, i]
    return x.reshape(n) if vec else x


def mat_inverse(m):
    inv = solve(m, identity(m.shape[0]))
    if inv is None:
        raise ZeroDivisionError("matrix is singular")
    return inv


def mat_power(m, k):
    out = identity(m.shape[0])
    for _ in range(k):
        out = out @ m
    return out


def is_nilpotent(m):
    n = m.shape[0]
    return n == 0 or is_zero_matrix(mat_power(m, n))


def char_poly(m):
    """Monic characteristic polynomial by the Faddeev-LeVerrier recurrence.

    Coefficients are returned constant term first.
    """
    n = m.shape[0]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = zeros(n)
    eye = identity(n)
    for k in range(1, n + 1):
        mk = m @ mk + eye * coeffs[n - k + 1]
        tr = sum((m @ mk)[i, i] for i in range(n))
        coeffs[n - k] = -tr / k
    return tuple(coeffs)


def sylvester_operator(a, b, mu=Fraction(1)):
    """Matrix of ``X -> a X - mu X b`` on row-major ``vec(X)``."""
    n1, n2 = a.shape[0], b.shape[0]
    k = zeros(n1 * n2)
    for i in range(n1):
        for j in range(n2):
            row = i * n2 + j
            for l in range(n1):
                if a[i, l] != 0:
                    k[row, l * n2 + j] += a[i, l]
            for l in range(n2):
                if b[l, j] != 0:
                    k[row, i * n2 + l] -= mu * b[l, j]
    return k


def sylvester_solve(a, b, r, mu=Fraction(1)):
    """Solve ``a X - mu X b = r`` exactly.

    Returns the unique solution, or :data:`SINGULAR` when the operator is not
    invertible (``spec(a)`` meets ``spec(mu b)``).
    """
    n1, n2 = a.shape[0], b.shape[0]
    if a.shape != (n1, n1) or b.shape != (n2, n2) or r.shape != (n1, n2):
        raise ValueError("inconsistent dimensions in Sylvester equation")
    if n1 == 0 or n2 == 0:
        return zeros(n1, n2)
    x = solve(sylvester_operator(a, b, mu), r.reshape(n1 * n2))
    if x is None:
        return SINGULAR
    return x.reshape(n1, n2)


def _columns_matrix(vectors, n):
    c = zeros(n, len(vectors))
    for j, v in enumerate(vectors):
        c[:, j] = v
    return c


def _image_basis(m):
    r, pivots = rref(m.T)
    return [primitive_vector(r[i].copy()) for i in range(len(pivots))]


def fitting_split(a):
    """Fitting decomposition ``C^-1 a C = diag(invertible, nilpotent)``.

    Columns of ``C`` are a basis of ``image(a^n)`` followed by a basis of
    ``kernel(a^n)``, both in reduced echelon order.  When ``a`` is invertible
    or nilpotent the identity is returned with a degenerate partition.
    """
    n = a.shape[0]
    an = mat_power(a, n)
    img = _image_basis(an)
    ker = mat_kernel(an)
    if not img or not ker:
        return identity(n), BlockPartition(len(img), len(ker))
    return _columns_matrix(img + ker, n), BlockPartition(len(img), len(ker))


def split_by_factors(a, f, g):
    """Similarity splitting ``a`` along a coprime factorization ``f*g`` of its
    characteristic polynomial; columns of ``C`` span ``ker f(a)`` then ``ker g(a)``."""
    chi = char_poly(a)
    if trim(pmul(pmonic(f), pmonic(g))) != trim(chi):
        raise ValueError("factors do not multiply to the characteristic polynomial")
    if degree(pgcd(f, g)) > 0:
        raise ValueError("factors are not coprime")
    n = a.shape[0]
    k1 = mat_kernel(peval_matrix(f, a))
    k2 = mat_kernel(peval_matrix(g, a))
    if len(k1) + len(k2) != n:
        raise ArithmeticError("kernel dimensions do not add up")
    if not k1 or not k2:
        return identity(n), BlockPartition(len(k1), len(k2))
    return _columns_matrix(k1 + k2, n), BlockPartition(len(k1), len(k2))


def omega_disjoint(a11, a22, q, p):
    """True iff ``X -> a11 X - w^(p k) X a22`` is invertible for every ``k``,
    i.e. no eigenvalue of ``a11`` equals ``w^(p k)`` times one of ``a22``."""
    if a11.shape[0] == 0 or a22.shape[0] == 0:
        return True
    ctx = cyclo_context(q)
    seen = set()
    for k in range(q):
        e = (p * k) % q
        if e in seen:
            continue
        seen.add(e)
        mu = omega_power(ctx, e)
        mu = mu.to_rational() if mu.is_rational() else mu
        if mat_det(sylvester_operator(a11, a22, mu)) == 0:
            return False
    return True
