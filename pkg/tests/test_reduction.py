from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import _oracles as oracle
from formred.conlinalg import BlockPartition, as_matrix, identity
from formred.errors import PreconditionError
from formred.pseries import PuiseuxMatrix, first_discrepancy, series_mul, theta_derivative
from formred.reduction import (
    Leaf, Node, iter_leaves, leading_exponentials, max_feasible_order, newton_polygon,
    reduce, rootfree_split, verify_equivalence,
)
from formred.samples import (
    TWO_SLOPE_SHEAR, random_sheared_instance, random_unramified_system, two_slope_system,
)
from formred.shearing import Shearing
from formred.splitting import block_series, off_diagonal_zero, split

F = Fraction
seeds = st.integers(0, 2 ** 32 - 1)


def series(pole, coeffs, known=8, n=2):
    return PuiseuxMatrix(n, 1, pole, {j: as_matrix(m) for j, m in coeffs.items()}, known)


def test_identity_shearing_is_the_classical_split():
    a = series(1, {0: [[1, 0], [0, 0]], 1: [[0, 1], [1, 0]], 2: [[2, 0], [3, -1]]}, known=9)
    res = rootfree_split(a, Shearing(1, (0, 0)), 6, verify=True)
    plain = split(a, BlockPartition(1, 1), 7)
    assert res.H == plain.transform.truncate_exponent(6)
    assert res.B == plain.result.truncate_exponent(5)
    assert res.certificates["gauge"] == "5"


def test_two_slope_rootfree_agrees_with_sympy():
    res = rootfree_split(two_slope_system(), TWO_SLOPE_SHEAR, 5)
    assert res.partition == BlockPartition(2, 3)
    assert res.result_shear.exponents == (0, 1, 0, 1, 2)
    ref = oracle.gauge(oracle.to_sympy(two_slope_system()), oracle.to_sympy(res.H), 1, 2, 2)
    assert ref == oracle.truncate(oracle.to_sympy(res.B), 2)


def test_omega_disjointness_failure_is_reported():
    # sheared leading matrix [[0, 1], [1, 0]] at x^(-3/2) has eigenvalues 1 and -1 = w * 1
    a = series(2, {0: [[0, 1], [0, 0]], 1: [[0, 0], [1, 0]]})
    factors = ((F(-1), F(1)), (F(1), F(1)))
    for given_factors in (factors, None):
        with pytest.raises(PreconditionError, match="w-disjointness fails"):
            rootfree_split(a, Shearing(2, (0, 1)), 2, factors=given_factors)


def test_invertible_leading_matrix_splits_by_factors():
    a = series(1, {0: [[1, 0], [0, 2]], 1: [[0, 1], [1, 0]]}, known=9)
    res = rootfree_split(a, Shearing(1, (0, 0)), 6, verify=True)
    assert res.certificates["gauge"] == "5" and off_diagonal_zero(res.B, res.partition)
    # the factor order may swap the blocks relative to the classical split
    plain = split(a, BlockPartition(1, 1), 7).result.truncate_exponent(5)
    ours = sorted(str(res.B.entry(i, i)) for i in range(2))
    assert ours == sorted(str(plain.entry(i, i)) for i in range(2))


@pytest.mark.parametrize("a, shear, match", [
    (PuiseuxMatrix(2, 2, 1, {1: identity(2)}, 4), Shearing(2, (0, 1)), "ramified"),
    (series(1, {0: [[1, 0], [0, 0]]}), Shearing(1, (0, 0, 0)), "dimension"),
    (series(0, {0: [[1, 0], [0, 0]]}), Shearing(1, (0, 0)), "no pole"),
    (series(1, {0: [[1, 0], [0, 1]]}), Shearing(1, (0, 0)), "does not split"),
    (series(1, {0: [[1, 0], [0, 0]]}, known=1), Shearing(1, (0, 0)), "largest feasible"),
])
def test_rootfree_preconditions(a, shear, match):
    with pytest.raises(PreconditionError, match=match):
        rootfree_split(a, shear, 4)


def test_feasible_order_tracks_the_budget():
    a = two_slope_system(known_exponent=10)
    n_ok = max_feasible_order(a, TWO_SLOPE_SHEAR, 24)
    assert 0 < n_ok <= 10
    rootfree_split(a, TWO_SLOPE_SHEAR, n_ok)
    with pytest.raises(PreconditionError, match=f"largest feasible order is {n_ok}"):
        rootfree_split(a, TWO_SLOPE_SHEAR, n_ok + 1)


@settings(max_examples=20)
@given(seeds)
def test_random_sheared_instances_split_root_free(seed):
    rng = np.random.default_rng(seed)
    q = int(rng.integers(2, 4))
    a, shear = random_sheared_instance(rng, 4, q, 20)
    order = max_feasible_order(a, shear, 4)
    res = rootfree_split(a, shear, order, verify=True)
    assert res.H.q == 1 and res.B.q == 1
    assert off_diagonal_zero(res.B, res.partition)
    # H may have a pole here, so compare A H - x H' with H B
    lhs = series_mul(a, res.H) - theta_derivative(res.H)
    exp, certified = first_discrepancy(lhs, series_mul(res.H, res.B))
    assert exp is None and certified >= res.B.known_exponent + res.H.valuation


# -- verification -------------------------------------------------------------

def test_verify_identity_transform():
    a = two_slope_system(known_exponent=6)
    cert = verify_equivalence(a, PuiseuxMatrix.identity(5, 6), a)
    assert cert.ok and cert.method == "gauge" and cert.certified_exponent == 6 - 2


def test_verify_reports_the_first_discrepancy():
    a = two_slope_system(known_exponent=6)
    bumped = a.map(lambda m, j: m + identity(5) if j == 3 else m)
    cert = verify_equivalence(a, PuiseuxMatrix.identity(5, 6), bumped)
    assert not cert.ok and cert.discrepancy == 1


def test_verify_with_singular_lowest_coefficient():
    zero = PuiseuxMatrix.zero(2, 5)
    h = series(0, {0: [[1, 0], [0, 0]], 1: [[0, 0], [0, 1]]}, known=5)
    b = series(0, {0: [[0, 0], [0, -1]]}, known=5)
    cert = verify_equivalence(zero, h, b)
    assert cert.ok and cert.method == "identity"
    assert not verify_equivalence(zero, h, series(0, {0: [[0, 0], [0, 1]]}, known=5)).ok
    with pytest.raises(ValueError):
        verify_equivalence(zero, PuiseuxMatrix.identity(3, 5), b)


# -- driver -------------------------------------------------------------------

def test_two_slope_tree():
    tree = reduce(two_slope_system(), order=12)
    assert isinstance(tree, Node) and tree.partition == BlockPartition(2, 3)
    leaves = list(iter_leaves(tree))
    assert [(lf.q, lf.p, lf.slope) for lf in leaves] == [(2, 1, F(3, 2)), (3, 2, F(4, 3))]
    assert newton_polygon(tree) == [(F(3, 2), 2), (F(4, 3), 3)]
    assert leaves[1].char_poly == (3, 0, 0, 1)
    exps = leading_exponentials(tree)
    assert exps[0]["root_of"] == "λ^2 + 1" and len(exps[0]["terms"]) == 2
    assert exps[1]["terms"] == ["λ*x^(-4/3)", "w*λ*x^(-4/3)", "w^2*λ*x^(-4/3)"]


def test_scalar_and_regular_systems():
    tree = reduce(PuiseuxMatrix(1, 1, 2, {0: as_matrix([[5]])}, 6))
    assert isinstance(tree, Leaf) and tree.slope == 2
    assert leading_exponentials(tree)[0]["root_of"] == "λ - 5"
    reg = reduce(series(0, {0: [[1, 2], [3, 4]]}))
    assert reg.kind == "regular" and newton_polygon(reg) == []
    assert leading_exponentials(reg) == []


def test_diagonal_system_has_two_slopes():
    tree = reduce(series(2, {0: [[1, 0], [0, 0]], 1: [[0, 0], [0, 3]]}, known=6))
    assert newton_polygon(tree) == [(F(2), 1), (F(1), 1)]


def test_unresolved_leaf_blocks_the_polygon():
    tree = reduce(series(1, {0: [[0, 1], [0, 0]]}, known=6), q_max=2)
    assert tree.kind == "unresolved" and "search" in tree.reason
    with pytest.raises(PreconditionError, match="unresolved"):
        newton_polygon(tree)


def test_repeated_eigenvalue_is_refined_by_an_exponential_shift():
    a = series(2, {0: [[1, 0], [0, 1]], 1: [[1, 0], [0, 2]]}, known=6)
    leaf = reduce(a)
    assert leaf.kind == "irregular" and leaf.orbit_split
    lam, k, sub = leaf.refinement
    assert (lam, k) == (F(-1, 2), 2)
    assert newton_polygon(sub) == [(F(1), 1), (F(1), 1)]


def test_reduce_rejects_ramified_input():
    with pytest.raises(PreconditionError):
        reduce(PuiseuxMatrix(2, 2, 1, {1: identity(2)}, 4))


@settings(max_examples=15)
@given(seeds)
def test_slopes_account_for_every_dimension(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    a = random_unramified_system(rng, n, int(rng.integers(0, 3)), 10)
    tree = reduce(a, order=6)
    leaves = list(iter_leaves(tree))
    assert sum(lf.dimension for lf in leaves) == n
    for lf in leaves:
        if lf.kind == "irregular":
            assert lf.slope > 0 and (lf.slope * lf.q).denominator == 1


def test_reducing_a_leaf_block_again_is_stable():
    tree = reduce(two_slope_system(), order=12)
    first, second = block_series(tree.result, tree.partition)
    again = reduce(first, order=6)
    assert isinstance(again, Leaf) and again.slope == F(3, 2)
    assert first.n == 2
    assert newton_polygon(reduce(second, order=6)) == [(F(4, 3), 3)]
