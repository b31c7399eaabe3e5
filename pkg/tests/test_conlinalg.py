from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import assume, given, strategies as st

from formred.conlinalg import (
    SINGULAR, BlockPartition, as_matrix, block_diag, blocks, char_poly, fitting_split,
    identity, is_nilpotent, is_zero_matrix, mat_det, mat_inverse, mat_kernel, mat_power,
    mat_rank, matrices_equal, omega_disjoint, split_by_factors, sylvester_solve, zeros,
)
from formred.exactfield import cyclo_context, omega_power
from formred.polynomials import peval_matrix, pmul
from formred.samples import two_slope_system

F = Fraction
ROT = as_matrix([[0, 1], [-1, 0]])
J3 = as_matrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])


@st.composite
def matrices(draw, n=None, m=None, lo=-4, hi=4):
    n = draw(st.integers(1, 4)) if n is None else n
    m = n if m is None else m
    vals = draw(st.lists(st.integers(lo, hi), min_size=n * m, max_size=n * m))
    return as_matrix(np.array(vals, dtype=object).reshape(n, m).tolist())


def sym(m):
    return sympy.Matrix(m.shape[0], m.shape[1],
                        [sympy.Rational(v.numerator, v.denominator) for v in m.flat])


def test_as_matrix_rejects_ragged_rows():
    with pytest.raises(ValueError):
        as_matrix([[1, 2], [3]])


@given(matrices())
def test_determinant_rank_and_kernel_match_sympy(m):
    s = sym(m)
    assert mat_det(m) == s.det()
    assert mat_rank(m) == s.rank()
    ker = mat_kernel(m)
    assert len(ker) == m.shape[1] - s.rank()
    for v in ker:
        assert is_zero_matrix(m @ v)


@given(matrices())
def test_inverse(m):
    assume(mat_det(m) != 0)
    assert matrices_equal(m @ mat_inverse(m), identity(m.shape[0]))


@given(matrices())
def test_char_poly_matches_sympy(m):
    ref = sym(m).charpoly().all_coeffs()[::-1]
    assert list(char_poly(m)) == ref


@given(matrices(n=3), matrices(n=3, lo=-2, hi=2))
def test_char_poly_is_a_similarity_invariant(m, c):
    assume(mat_det(c) != 0)
    assert char_poly(mat_inverse(c) @ m @ c) == char_poly(m)


@pytest.mark.parametrize("m, chi", [
    (ROT, (1, 0, 1)),
    (J3, (0, 0, 0, 1)),
    (as_matrix([[1, 0], [0, 2]]), (2, -3, 1)),
])
def test_char_poly_examples(m, chi):
    assert char_poly(m) == chi


def test_kernel_rank_and_nilpotency_examples():
    ker = mat_kernel(J3)
    assert len(ker) == 1 and list(ker[0]) == [1, 0, 0]
    assert mat_rank(identity(4)) == 4
    assert is_nilpotent(J3) and not is_nilpotent(ROT)


def test_leading_matrix_of_two_slope_system_is_nilpotent():
    a0 = two_slope_system().leading_matrix
    assert not is_zero_matrix(mat_power(a0, 2))
    assert is_zero_matrix(mat_power(a0, 3))


# -- Sylvester equations --------------------------------------------------------

def test_sylvester_scalar_examples():
    x = sylvester_solve(as_matrix([[1]]), as_matrix([[2]]), as_matrix([[1]]))
    assert x[0, 0] == -1
    assert sylvester_solve(as_matrix([[1]]), as_matrix([[1]]), as_matrix([[3]])) is SINGULAR


def test_sylvester_rotation_against_nilpotent_block():
    w = omega_power(cyclo_context(2), 1).to_rational()
    rhs = as_matrix([[1, 2, 3], [4, 5, 6]])
    x = sylvester_solve(ROT, J3, rhs, w)
    assert matrices_equal(ROT @ x - (x @ J3) * w - rhs, zeros(2, 3))


@given(matrices(n=2), matrices(n=3), matrices(n=2, m=3))
def test_sylvester_residual_or_singular(a, b, r):
    x = sylvester_solve(a, b, r)
    kron = sympy.kronecker_product(sym(a), sympy.eye(3)) - \
        sympy.kronecker_product(sympy.eye(2), sym(b).T)
    if x is SINGULAR:
        assert kron.det() == 0
    else:
        assert kron.det() != 0
        assert matrices_equal(a @ x - x @ b, r)


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=3),
       st.lists(st.integers(-5, 5), min_size=1, max_size=3))
def test_sylvester_singular_exactly_on_shared_diagonal_values(da, db):
    a = as_matrix(np.diag(da).tolist())
    b = as_matrix(np.diag(db).tolist())
    got = sylvester_solve(a, b, zeros(len(da), len(db)))
    assert (got is SINGULAR) == bool(set(da) & set(db))


def test_sylvester_over_cyclotomic_field():
    ctx = cyclo_context(3)
    w = ctx.omega
    a = as_matrix([[1]])
    a[0, 0] = w
    assert sylvester_solve(a, as_matrix([[1]]), as_matrix([[1]]), w) is SINGULAR
    x = sylvester_solve(a, as_matrix([[2]]), as_matrix([[1]]), w)
    assert x[0, 0] * (w - 2 * w) == 1


def test_sylvester_dimension_mismatch():
    with pytest.raises(ValueError):
        sylvester_solve(identity(2), identity(2), zeros(3, 2))


# -- Fitting and factor splittings ----------------------------------------------

def test_fitting_split_degenerate_cases():
    c, part = fitting_split(J3)
    assert part == BlockPartition(0, 3) and matrices_equal(c, identity(3))
    c, part = fitting_split(ROT)
    assert part == BlockPartition(2, 0) and matrices_equal(c, identity(2))


def test_fitting_split_of_sheared_leading_matrix():
    c, part = fitting_split(block_diag(ROT, J3))
    assert part == BlockPartition(2, 3)
    assert matrices_equal(c, identity(5))


@given(matrices(lo=-2, hi=2))
def test_fitting_split_blocks(m):
    c, part = fitting_split(m)
    if part.degenerate:
        assert part.n1 == 0 and is_nilpotent(m) or part.n2 == 0 and mat_det(m) != 0
        return
    b = mat_inverse(c) @ m @ c
    b11, b12, b21, b22 = blocks(b, part)
    assert is_zero_matrix(b12) and is_zero_matrix(b21)
    assert mat_det(b11) != 0 and is_nilpotent(b22)
    assert part.n1 == mat_rank(mat_power(m, m.shape[0]))


def test_split_by_factors_examples():
    c, part = split_by_factors(as_matrix([[1, 0], [0, 2]]), (F(-1), F(1)), (F(-2), F(1)))
    assert part == BlockPartition(1, 1) and matrices_equal(c, identity(2))
    a = as_matrix([[0, 1], [-2, 3]])
    c, part = split_by_factors(a, (F(-1), F(1)), (F(-2), F(1)))
    assert matrices_equal(c, as_matrix([[1, 1], [1, 2]]))
    assert matrices_equal(mat_inverse(c) @ a @ c, as_matrix([[1, 0], [0, 2]]))
    c, part = split_by_factors(a, char_poly(a), (F(1),))
    assert part.degenerate and matrices_equal(c, identity(2))


def test_split_by_factors_rejects_bad_factors():
    lin = (F(-1), F(1))
    with pytest.raises(ValueError, match="coprime"):
        split_by_factors(identity(2), lin, lin)
    with pytest.raises(ValueError):
        split_by_factors(as_matrix([[1, 0], [0, 2]]), (F(-1), F(1)), (F(-3), F(1)))


@given(st.lists(st.integers(-3, 3), min_size=2, max_size=4), matrices(n=4, lo=-1, hi=1))
def test_split_by_factors_annihilates_blocks(roots, c):
    n = len(roots)
    c = c[:n, :n] + identity(n) * 3
    assume(mat_det(c) != 0)
    a = c @ as_matrix(np.diag(roots).tolist()) @ mat_inverse(c)
    first = sorted(set(roots))[0]
    assume(len(set(roots)) > 1)
    k = roots.count(first)
    f = (F(1),)
    g = (F(1),)
    for r in roots:
        if r == first:
            f = pmul(f, (F(-r), F(1)))
        else:
            g = pmul(g, (F(-r), F(1)))
    cc, part = split_by_factors(a, f, g)
    assert part == BlockPartition(k, n - k)
    b11, b12, b21, b22 = blocks(mat_inverse(cc) @ a @ cc, part)
    assert is_zero_matrix(b12) and is_zero_matrix(b21)
    assert is_zero_matrix(peval_matrix(f, b11)) and is_zero_matrix(peval_matrix(g, b22))


# -- omega disjointness -----------------------------------------------------------

def test_omega_disjoint_examples():
    assert omega_disjoint(ROT, J3, 2, 1)
    assert omega_disjoint(as_matrix([[3]]), as_matrix([[0]]), 5, 2)
    assert not omega_disjoint(as_matrix([[1]]), as_matrix([[-1]]), 2, 1)
    assert omega_disjoint(as_matrix([[1]]), as_matrix([[-1]]), 2, 2)


def test_omega_disjoint_detects_cyclotomic_relation():
    # eigenvalues of the companion of t^2 + t + 1 are w and w^2: each is w^k * 1
    comp = as_matrix([[0, -1], [1, -1]])
    assert not omega_disjoint(comp, as_matrix([[1]]), 3, 1)
    assert omega_disjoint(comp, as_matrix([[2]]), 3, 1)
