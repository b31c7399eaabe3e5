"""The Splitting Lemma coefficient recursion.

Derivation used below.  Write ``A = x^-r sum_j A_j x^(j/q)`` with leading
index ``p``, ``T = sum_j T_j x^(j/q)`` with ``T_0 = I`` and ``B = T[A]``, so
``T B = A T - x T'``.  Comparing the coefficients of ``x^((p+h)/q - r)``:

    A_p T_h - T_h A_p = sum_{j=1..h} (T_{h-j} B_{p+j} - A_{p+j} T_{h-j})
                        + ((p+h)/q - r) T_{p+h-qr}

with ``T_j = 0`` for ``j < 0``.  The ``j = h`` term is ``B_{p+h} - A_{p+h}``;
everything else (called ``R_h`` here, *including* ``-A_{p+h}``) only
involves earlier unknowns because ``r > p/q`` forces ``p+h-qr < h``.  With
``T_h = [[0, U_h], [V_h, 0]]`` and ``B`` block-diagonal this splits into

    B^11_{p+h} = -R^11_h,        B^22_{p+h} = -R^22_h,
    A^11_p U_h - U_h A^22_p = R^12_h,
    A^22_p V_h - V_h A^11_p = R^21_h.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .conlinalg import (
    SINGULAR, BlockPartition, blocks, identity, is_zero_matrix, matrices_equal,
    omega_disjoint, sylvester_solve, zeros,
)
from .errors import ConsistencyError, PreconditionError
from .exactfield import cyclo_context, omega_power
from .pseries import PuiseuxMatrix

__all__ = [
    "SplitResult", "split", "check_commutative", "split_commutative", "block_series",
    "off_diagonal_zero",
]


@dataclass(frozen=True, eq=False)
class SplitResult:
    """Transformation ``T = [[I, U], [V, I]]`` and block-diagonal ``B = T[A]``.

    ``certified_through`` is an index in the frame of ``result``.
    """

    transform: PuiseuxMatrix
    result: PuiseuxMatrix
    partition: BlockPartition
    certified_through: int
    certificates: dict = field(default_factory=dict)


def _split_core(a, partition, order):
    if a.is_zero:
        raise PreconditionError("cannot split the zero series")
    n, q, r = a.n, a.q, a.pole
    if partition.n != n or partition.degenerate:
        raise PreconditionError(f"partition {partition} does not split dimension {n}")
    p = a.leading_index
    if p >= q * r:
        raise PreconditionError(
            f"leading exponent {a.valuation} is not a pole (need r > p/q)")
    need = p + order
    if a.known_through < need:
        raise PreconditionError(
            f"series known through index {a.known_through}, index {need} required")
    lead = a.coeff(p)
    a11, a12, a21, a22 = blocks(lead, partition)
    if not (is_zero_matrix(a12) and is_zero_matrix(a21)):
        raise PreconditionError("leading matrix is not block-diagonal for the partition")
    k = partition.n1
    t = {0: identity(n)}
    b = {p: lead}
    rs = {0: zeros(n)}
    for h in range(1, order + 1):
        acc = -a.coeff(p + h)
        for j in range(1, h):
            th = t.get(h - j)
            if th is None:
                continue
            bj = b.get(p + j)
            if bj is not None:
                acc = acc + th @ bj
            aj = a.coeffs.get(p + j)
            if aj is not None:
                acc = acc - aj @ th
        d = p + h - q * r
        if d >= 0 and d in t:
            acc = acc + t[d] * (Fraction(p + h, q) - r)
        rs[h] = acc
        r11, r12, r21, r22 = blocks(acc, partition)
        u = sylvester_solve(a11, a22, r12)
        v = sylvester_solve(a22, a11, r21)
        if u is SINGULAR or v is SINGULAR:
            raise PreconditionError("leading blocks share an eigenvalue")
        th = zeros(n)
        th[:k, k:] = u
        th[k:, :k] = v
        bh = zeros(n)
        bh[:k, :k] = -r11
        bh[k:, k:] = -r22
        if not is_zero_matrix(th):
            t[h] = th
        if not is_zero_matrix(bh):
            b[p + h] = bh
    res = SplitResult(
        transform=PuiseuxMatrix(n, q, 0, t, order),
        result=PuiseuxMatrix(n, q, r, b, need),
        partition=partition,
        certified_through=need,
    )
    return res, rs


def split(a, partition, order):
    """Block-diagonalize ``a`` through ``order`` indices past its leading index.

    ``a`` is taken in its own frame; the leading matrix must be
    block-diagonal for ``partition`` with disjoint block spectra, which is
    detected constructively: a singular Sylvester solve raises
    :class:`PreconditionError`.
    """
    return _split_core(a, partition, order)[0]


def check_commutative(a, p_mat, q):
    """True iff ``A_j P = w^j P A_j`` for every known coefficient."""
    if a.q != q:
        if q % a.q:
            raise ValueError(f"series with q={a.q} has no frame with q={q}")
        a = a.reframe(q)
    ctx = cyclo_context(q)
    for j, m in a.coeffs.items():
        w = omega_power(ctx, j)
        if not matrices_equal(m @ p_mat, (p_mat @ m) * w):
            return False
    return True


def _commutes(m, p_mat, w):
    return matrices_equal(m @ p_mat, (p_mat @ m) * w)


def split_commutative(a, p_mat, partition, order):
    """:func:`split` for an ``(w, P)``-commutative series, with certificates.

    The recursion is the same; afterwards ``R_k P = w^(p+k) P R_k``,
    ``T_k P = w^k P T_k`` and ``B_(p+k) P = w^(p+k) P B_(p+k)`` are checked
    for every computed ``k``.
    """
    q = a.q
    if not check_commutative(a, p_mat, q):
        raise PreconditionError("series is not (w, P)-commutative")
    _, p12, p21, _ = blocks(p_mat, partition)
    if not (is_zero_matrix(p12) and is_zero_matrix(p21)):
        raise PreconditionError("P is not block-diagonal for the partition")
    p = a.leading_index
    a11, _, _, a22 = blocks(a.leading_matrix, partition)
    if not omega_disjoint(a11, a22, q, p):
        raise PreconditionError("w^p-spectra of the leading blocks intersect")
    res, rs = _split_core(a, partition, order)
    ctx = cyclo_context(q)
    t, b = res.transform, res.result
    for k in range(order + 1):
        w_k = omega_power(ctx, k)
        w_pk = omega_power(ctx, p + k)
        if not _commutes(rs[k], p_mat, w_pk):
            raise ConsistencyError(f"R_{k} breaks (w, P)-commutativity")
        if not _commutes(t.coeff(k), p_mat, w_k):
            raise ConsistencyError(f"T_{k} breaks (w, P)-commutativity")
        if not _commutes(b.coeff(p + k), p_mat, w_pk):
            raise ConsistencyError(f"B_{p + k} breaks (w, P)-commutativity")
    certs = {"R": order, "T": order, "B": p + order}
    return SplitResult(res.transform, res.result, res.partition,
                       res.certified_through, certs)


def block_series(a, partition):
    """The two diagonal blocks of a block-diagonal series as separate series."""
    k = partition.n1
    first = a.submatrix(range(k), range(k))
    second = a.submatrix(range(k, a.n), range(k, a.n))
    return first, second


def off_diagonal_zero(a, partition):
    k = partition.n1
    for m in a.coeffs.values():
        if not (is_zero_matrix(m[:k, k:]) and is_zero_matrix(m[k:, :k])):
            return False
    return True
