"""Root-free splitting and the recursive reduction driver.

Root-free splitting of an unramified ``A`` along a shearing ``S``:

1. ``A_hat = S[A]`` is ``(w, P)``-commutative with ``P = diag(w^a_i)``.
2. ``C`` block-diagonalizes the leading matrix of ``A_hat``.  Its columns are
   chosen inside the eigenspaces of ``P`` (the split subspaces are
   ``P``-invariant), so ``C^-1 P C = diag(w^b_k)`` is again diagonal.
3. The split ``T`` of ``C^-1 A_hat C`` is ``(w, diag(w^b))``-commutative, so
   ``H = S C T S'^-1`` with ``S' = diag(x^(b_k/q))`` has integer exponents
   only, and ``B = H[A] = S'^-1[B_hat]`` is block-diagonal and unramified.

When ``C = I`` (as in most hand examples) ``S' = S`` and
``H = S T S^-1``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, gcd

import numpy as np

from .conlinalg import (
    BlockPartition, blocks, char_poly, fitting_split, is_nilpotent, mat_det, mat_inverse,
    matrices_equal, omega_disjoint, primitive_vector, rref, split_by_factors,
    zeros,
)
from .errors import ConsistencyError, PreconditionError
from .exactfield import cyclo_context, omega_power
from .polynomials import coprime_split, deflate, factor_rational, format_poly, inflate
from .pseries import (
    PuiseuxMatrix, conjugate, exponential_shift, first_discrepancy,
    gauge_transform, is_unramified, normalize, series_mul, theta_derivative,
)
from .shearing import NOT_FOUND, Shearing, apply_shearing, in_frame, search_shearing
from .splitting import block_series, off_diagonal_zero, split_commutative

__all__ = [
    "DEFAULT_ORDER", "RootFreeResult", "Certificate", "Leaf", "Node",
    "rootfree_split", "commutative_frame", "max_feasible_order", "verify_equivalence", "reduce",
    "newton_polygon", "leading_exponentials", "iter_leaves",
]

DEFAULT_ORDER = 24


@dataclass(frozen=True, eq=False)
class RootFreeResult:
    """``B = H[A]`` block-diagonal with ``H`` free of fractional powers.

    ``certified_through`` is the order ``N``: ``H`` is known through
    exponent ``N`` and ``B`` through index ``N`` of the input's frame, i.e.
    exponent ``N - r``.  ``result_shear`` is ``S'``, the shearing that
    brings ``B`` back to the split sheared frame.
    """

    H: PuiseuxMatrix
    B: PuiseuxMatrix
    partition: BlockPartition
    shear_used: Shearing
    basis_used: np.ndarray
    result_shear: Shearing
    certified_through: int
    certificates: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Certificate:
    """Outcome of :func:`verify_equivalence` (exponents, not indices)."""

    ok: bool
    discrepancy: Fraction | None
    certified_exponent: Fraction
    method: str

    def describe(self):
        if self.ok:
            return f"certified through exponent {self.certified_exponent} ({self.method})"
        return f"discrepancy at exponent {self.discrepancy} ({self.method})"


# -- root-free splitting ------------------------------------------------------

def _shift_entries(a, row_exp, col_exp, q):
    """Multiply entry ``(i, k)`` by ``x^((row_exp[i] + col_exp[k]) / q)``."""
    a = a.reframe(q)
    n = a.n
    shifts = [[row_exp[i] + col_exp[k] for k in range(n)] for i in range(n)]
    lo = min(min(r) for r in shifts)
    extra = ceil(Fraction(max(0, -lo), q))
    base = q * extra
    coeffs = {}
    for j, m in a.coeffs.items():
        for (i, k), v in np.ndenumerate(m):
            if v == 0:
                continue
            nj = j + base + shifts[i][k]
            if nj not in coeffs:
                coeffs[nj] = zeros(n)
            coeffs[nj][i, k] += v
    return PuiseuxMatrix(n, q, a.pole + extra, coeffs, a.known_through + base + lo)


def _support(v):
    return [i for i, x in enumerate(v) if x != 0]


def _adapted_basis(c0, partition, alpha, q):
    """Columns spanning the same two subspaces as ``c0``, each supported on
    coordinates with one residue of ``alpha`` mod ``q``; returns the basis and
    a representative exponent per column."""
    n = c0.shape[0]
    cls = [a % q for a in alpha]

    def rep(v):
        return min(alpha[i] for i in _support(v))

    cols = [c0[:, k] for k in range(n)]
    if all(len({cls[i] for i in _support(v)}) == 1 for v in cols):
        return c0, tuple(rep(v) for v in cols)
    out, reps = [], []
    for lo, hi in ((0, partition.n1), (partition.n1, n)):
        block = c0[:, lo:hi]
        vecs = []
        for c in sorted(set(cls)):
            idx = [i for i in range(n) if cls[i] == c]
            r, piv = rref(block[idx, :].T)
            for row in range(len(piv)):
                v = zeros(n, 1)[:, 0]
                v[idx] = primitive_vector(r[row].copy())
                vecs.append(v)
        if len(vecs) != hi - lo:
            raise PreconditionError("split subspaces are not invariant under the monodromy")
        vecs.sort(key=lambda v: _support(v)[0])
        out.extend(vecs)
        reps.extend(rep(v) for v in vecs)
    c = zeros(n)
    for k, v in enumerate(out):
        c[:, k] = v
    return c, tuple(reps)


@dataclass(frozen=True, eq=False)
class _Plan:
    a: PuiseuxMatrix
    a_split: PuiseuxMatrix
    basis: np.ndarray
    partition: BlockPartition
    alpha_out: tuple
    p: int
    r_hat: int


def _plan(a, shear, factors):
    a = normalize(a)
    if not is_unramified(a):
        raise PreconditionError("input system is ramified")
    if shear.n != a.n:
        raise PreconditionError("shearing dimension mismatch")
    q = shear.q
    a_hat = in_frame(apply_shearing(a, shear), q)
    if a_hat.is_zero or a_hat.valuation >= 0:
        raise PreconditionError("sheared system has no pole")
    p = a_hat.leading_index
    if gcd(p, q) != 1:
        raise PreconditionError(f"gcd(p, q) = gcd({p}, {q}) is not 1")
    lead = a_hat.leading_matrix
    if factors is None:
        c0, part = fitting_split(lead)
        if part.degenerate:
            # invertible (or nilpotent) leading matrix: try a coprime factorization
            factors = coprime_split(char_poly(lead))
    if factors is not None:
        try:
            c0, part = split_by_factors(lead, *factors)
        except ValueError as exc:
            raise PreconditionError(str(exc)) from None
    if part.degenerate:
        raise PreconditionError("leading matrix does not split into two blocks")
    # checked before adapting the basis: a violation also breaks P-invariance
    l11, _, _, l22 = blocks(mat_inverse(c0) @ lead @ c0, part)
    if not omega_disjoint(l11, l22, q, p):
        raise PreconditionError(
            "w-disjointness fails: leading blocks have eigenvalues related by a power of w")
    c, alpha_out = _adapted_basis(c0, part, shear.exponents, q)
    a_split = conjugate(a_hat, c)
    return _Plan(a, a_split, c, part, alpha_out, p, a_hat.pole)


def commutative_frame(a, shear, factors=None):
    """The split-ready frame used by :func:`rootfree_split`.

    Returns ``(A_split, P, partition)``: ``A_split = C^-1 S[A] C`` has a
    block-diagonal leading matrix and is ``(w, P)``-commutative with the
    diagonal ``P = diag(w^b_k)``.
    """
    plan = _plan(a, shear, factors)
    return plan.a_split, _monodromy(plan.alpha_out, shear.q), plan.partition


def _monodromy(exponents, q):
    ctx = cyclo_context(q)
    p_mat = zeros(len(exponents))
    for k, b in enumerate(exponents):
        w = omega_power(ctx, b)
        p_mat[k, k] = w.to_rational() if w.is_rational() else w
    return p_mat


def _split_order(plan, shear, order):
    """Split order needed so that H and B are known through ``order``."""
    q, alpha, beta = shear.q, shear.exponents, plan.alpha_out
    r = plan.a.pole
    for_h = q * order + max(beta) - min(alpha)
    for_b = q * (order - r + plan.r_hat) + max(beta) - min(beta) - plan.p
    return max(1, for_h, for_b)


def _integer_frame(a):
    """Unramified series in the ``q = 1`` frame (also when it is zero)."""
    a = normalize(a)
    if a.q == 1:
        return a
    if not a.is_zero:
        raise ConsistencyError("series has fractional exponents")
    return PuiseuxMatrix(a.n, 1, a.pole, {}, a.known_through // a.q)


def max_feasible_order(a, shear, order=DEFAULT_ORDER, factors=None):
    """Largest ``N <= order`` the known coefficients of ``a`` support (may be < 0)."""
    plan = _plan(a, shear, factors)
    n = order
    while n >= 0 and plan.p + _split_order(plan, shear, n) > plan.a_split.known_through:
        n -= 1
    return n


def rootfree_split(a, shear, order=DEFAULT_ORDER, factors=None, verify=False):
    """Split an unramified system into two blocks without fractional powers.

    ``shear`` must make the leading matrix split with ``w^p``-disjoint
    blocks.  The split is the Fitting decomposition, or a coprime
    factorization of the characteristic polynomial when that decomposition
    is trivial; ``factors`` fixes the factorization explicitly.  With
    ``verify=True`` the result is also checked against an independent
    gauge transformation.
    """
    plan = _plan(a, shear, factors)
    a = plan.a
    q, r = shear.q, a.pole
    n_split = _split_order(plan, shear, order)
    need = plan.p + n_split
    if plan.a_split.known_through < need:
        have = max_feasible_order(a, shear, order, factors)
        raise PreconditionError(
            f"input known through exponent {a.known_exponent}; order {order} needs "
            f"sheared index {need} (have {plan.a_split.known_through}); "
            f"largest feasible order is {have}")
    p_mat = _monodromy(plan.alpha_out, q)
    res = split_commutative(plan.a_split, p_mat, plan.partition, n_split)

    alpha, beta = shear.exponents, plan.alpha_out
    c = plan.basis
    h = _shift_entries(res.transform.map(lambda m, j: c @ m), alpha, [-b for b in beta], q)
    if not is_unramified(h):
        raise ConsistencyError("transformation has fractional exponents")
    h = _integer_frame(h).truncate_exponent(order)
    result_shear = Shearing(q, beta)
    b = apply_shearing(res.result, result_shear.inverse())
    if not is_unramified(b):
        raise ConsistencyError("block-diagonal system has fractional exponents")
    b = _integer_frame(b).truncate_exponent(order - r)
    if not off_diagonal_zero(b, plan.partition):
        raise ConsistencyError("result is not block-diagonal")
    # the sheared result keeps the leading term, when the budget reaches it
    back = apply_shearing(b, result_shear)
    lead_exp = Fraction(plan.p, q) - plan.r_hat
    lead_ok = back.known_exponent >= lead_exp
    if lead_ok and (back.valuation != lead_exp or not matrices_equal(
            back.leading_matrix, plan.a_split.leading_matrix)):
        raise ConsistencyError("sheared result has a different leading term")
    certs = {"commutative": dict(res.certificates), "root_free": True,
             "block_diagonal": True, "leading_term": lead_ok}
    if verify:
        cert = verify_equivalence(a, h, b)
        if not cert.ok:
            raise ConsistencyError(f"gauge check failed: {cert.describe()}")
        certs["gauge"] = str(cert.certified_exponent)
    return RootFreeResult(h, b, plan.partition, shear, plan.basis, result_shear, order, certs)


# -- verification -------------------------------------------------------------

def verify_equivalence(a, h, b):
    """Independent check of ``H[A] = B`` on the common budget.

    With an invertible lowest coefficient of ``H`` the gauge transform is
    recomputed; otherwise ``A H - x H' = H B`` is compared.
    """
    if not (a.n == h.n == b.n):
        raise ValueError("dimension mismatch")
    low = h.leading_matrix if not h.is_zero else None
    if low is not None and mat_det(low) != 0:
        lhs = gauge_transform(h, a)
        exp, cert = first_discrepancy(lhs, b)
        method = "gauge"
    else:
        lhs = series_mul(a, h) - theta_derivative(h)
        rhs = series_mul(h, b)
        exp, cert = first_discrepancy(lhs, rhs)
        method = "identity"
    return Certificate(exp is None, exp, cert, method)


# -- decomposition tree -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Leaf:
    """A block the driver does not split further.

    ``kind`` is ``"regular"`` (no pole), ``"irregular"`` (invertible leading
    matrix after ``shear``) or ``"unresolved"``.  For irregular leaves
    ``slope = r - p/q`` and ``char_poly`` is that of the sheared leading
    matrix; ``orbit_split`` tells whether its roots form a single ``w``-orbit.
    ``refinement`` optionally holds ``(lam, k, subtree)`` for the system after
    the exponential shift ``exp(lam / x^k)``.
    """

    kind: str
    system: PuiseuxMatrix
    shear: Shearing | None = None
    q: int = 1
    p: int = 0
    slope: Fraction | None = None
    char_poly: tuple | None = None
    orbit_split: bool = True
    reason: str | None = None
    refinement: tuple | None = None

    @property
    def dimension(self):
        return self.system.n


@dataclass(frozen=True, eq=False)
class Node:
    """``B = H[A]`` with ``B = diag(B1, B2)``; children reduce ``B1`` and ``B2``."""

    transform: PuiseuxMatrix
    result: PuiseuxMatrix
    partition: BlockPartition
    shear: Shearing
    basis: np.ndarray
    order: int
    children: tuple

    @property
    def dimension(self):
        return self.partition.n


@dataclass(frozen=True)
class _Options:
    q_max: int
    exponent_bound: int
    order: int


def reduce(a, q_max=4, exponent_bound=2, order=DEFAULT_ORDER):
    """Recursively split an unramified system into single-slope blocks."""
    a = normalize(a)
    if not is_unramified(a):
        raise PreconditionError("input system is ramified")
    return _reduce(a, _Options(q_max, exponent_bound, order))


def _identity_shear(n):
    return Shearing(1, (0,) * n)


def _regular(a):
    return a.is_zero or a.valuation >= 0


def _reduce(a, opts):
    a = normalize(a)
    if _regular(a):
        return Leaf("regular", a)
    lead = a.leading_matrix
    n = a.n
    if not is_nilpotent(lead):
        return _reduce_sheared(a, _identity_shear(n), opts)
    if n == 1:
        raise ConsistencyError("nilpotent scalar leading term")
    s = search_shearing(a, opts.q_max, opts.exponent_bound)
    if s is NOT_FOUND:
        return Leaf("unresolved", a, reason="search budget exhausted")
    return _reduce_sheared(a, s, opts)


def _reduce_sheared(a, shear, opts):
    """``shear[a]`` has a pole and a non-nilpotent leading matrix."""
    q = shear.q
    a_hat = in_frame(apply_shearing(a, shear), q)
    lead = a_hat.leading_matrix
    _, part = fitting_split(lead)
    factors = None
    if part.degenerate:
        chi = char_poly(lead)
        f_red, _ = deflate(chi, q)
        sp = coprime_split(f_red)
        if sp is None:
            return _sheared_leaf(a, shear, a_hat, opts)
        factors = (inflate(sp[0], q), inflate(sp[1], q))
    n_ok = max_feasible_order(a, shear, opts.order, factors)
    if n_ok < 1:
        return Leaf("unresolved", a, shear=shear, reason="coefficient budget exhausted")
    res = rootfree_split(a, shear, n_ok, factors)
    k = res.partition.n1
    beta = res.result_shear.exponents
    children = []
    for blk, sub in zip(block_series(res.B, res.partition),
                        (Shearing(q, beta[:k]), Shearing(q, beta[k:]))):
        children.append(_reduce_block(blk, sub, opts))
    return Node(res.H, res.B, res.partition, shear, res.basis_used, n_ok, tuple(children))


def _reduce_block(b, shear, opts):
    b = normalize(b)
    if _regular(b):
        return Leaf("regular", b)
    if shear.q > 1:
        sheared = in_frame(apply_shearing(b, shear), shear.q)
        if (not sheared.is_zero and sheared.valuation < 0
                and not is_nilpotent(sheared.leading_matrix)):
            return _reduce_sheared(b, shear, opts)
    return _reduce(b, opts)


def _sheared_leaf(a, shear, a_hat, opts):
    lead = a_hat.leading_matrix
    chi = char_poly(lead)
    norm = normalize(a_hat)
    q, p = norm.q, norm.leading_index
    slope = -a_hat.valuation
    f_red, _ = deflate(chi, q)
    parts = factor_rational(f_red)
    orbit = len(parts) == 1 and len(parts[0][0]) == 2
    refinement = None
    if q == 1 and a.n > 1 and orbit:
        c = -parts[0][0][0]
        k = a.pole
        lam = -c / k
        shifted = normalize(exponential_shift(a, lam, k))
        refinement = (lam, k, _reduce(shifted, opts))
    return Leaf("irregular", a, shear=shear, q=q, p=p, slope=slope,
                char_poly=tuple(chi), orbit_split=orbit, refinement=refinement)


def iter_leaves(tree):
    """Leaves in block order (refinement subtrees are not descended)."""
    if isinstance(tree, Leaf):
        yield tree
        return
    for child in tree.children:
        yield from iter_leaves(child)


def newton_polygon(tree):
    """``(slope, length)`` per irregular leaf, slopes descending.

    A leaf's length is its block dimension, which equals ``q * s`` when the
    leading eigenvalues form ``s``-fold copies of one ``w``-orbit.
    """
    out = []
    for leaf in iter_leaves(tree):
        if leaf.kind == "unresolved":
            raise PreconditionError(f"tree has an unresolved block ({leaf.reason})")
        if leaf.kind == "irregular":
            if leaf.dimension % leaf.q:
                raise ConsistencyError("leaf dimension is not a multiple of q")
            out.append((leaf.slope, leaf.dimension))
    out.sort(key=lambda sl: -sl[0])
    return out


def leading_exponentials(tree):
    """Per irregular leaf, the family ``w^j lam x^(-slope)``, ``j < q``.

    ``lam`` stays implicit as a root of the leaf's characteristic polynomial.
    """
    out = []
    for leaf in iter_leaves(tree):
        if leaf.kind != "irregular":
            continue
        poly = format_poly(leaf.char_poly)
        terms = []
        for j in range(leaf.q):
            w = "" if j == 0 else ("w*" if j == 1 else f"w^{j}*")
            terms.append(f"{w}λ*x^(-{leaf.slope})")
        out.append({"slope": leaf.slope, "q": leaf.q, "char_poly": leaf.char_poly,
                    "root_of": poly, "terms": terms})
    return out

