import json
from fractions import Fraction

import pytest

from formred.conlinalg import BlockPartition, as_matrix, identity, matrices_equal
from formred.documents import (
    certificate_from_document, certificate_to_document, dumps, load_system,
    matrix_from_document, matrix_to_document, rootfree_from_document,
    rootfree_to_document, split_from_document, split_to_document, tree_from_document,
    tree_to_document,
)
from formred.exactfield import cyclo_context, omega_power
from formred.pseries import PuiseuxMatrix, to_document
from formred.reduction import (
    Certificate, iter_leaves, newton_polygon, reduce, rootfree_split,
)
from formred.samples import TWO_SLOPE_ROWS, TWO_SLOPE_SHEAR, two_slope_system
from formred.splitting import split

F = Fraction


def roundtrip(doc):
    return json.loads(dumps(doc))


def test_expression_sugar_matches_the_sample_system():
    rows = [list(r) for r in TWO_SLOPE_ROWS]
    doc = {"expressions": rows, "known_exponent": 120, "multiplier_exponent": 1}
    assert load_system(doc) == two_slope_system()
    assert load_system(roundtrip(to_document(two_slope_system()))) == two_slope_system()


@pytest.mark.parametrize("doc", [
    [], {"expressions": [["1"]]}, {"expressions": [], "known_exponent": 2},
    {"expressions": "x", "known_exponent": 2},
])
def test_load_system_rejects_malformed_documents(doc):
    with pytest.raises(ValueError):
        load_system(doc)


def test_matrix_documents_keep_the_field():
    ctx = cyclo_context(3)
    m = identity(2)
    m[0, 1] = omega_power(ctx, 1)
    doc = roundtrip(matrix_to_document(m))
    assert doc["field_order"] == 3
    assert matrices_equal(matrix_from_document(doc), m)
    plain = as_matrix([[F(1, 2), 0], [3, -1]])
    assert matrices_equal(matrix_from_document(roundtrip(matrix_to_document(plain))), plain)


def test_split_result_round_trip():
    a = PuiseuxMatrix(2, 1, 1, {0: as_matrix([[1, 0], [0, 2]]),
                                1: as_matrix([[0, 1], [0, 0]])}, 8)
    res = split(a, BlockPartition(1, 1), 6)
    back = split_from_document(roundtrip(split_to_document(res)))
    assert back.transform == res.transform and back.result == res.result
    assert back.partition == res.partition and back.certified_through == 6


def test_rootfree_result_round_trip():
    res = rootfree_split(two_slope_system(), TWO_SLOPE_SHEAR, 6, verify=True)
    doc = rootfree_to_document(res)
    back = rootfree_from_document(roundtrip(doc))
    assert back.H == res.H and back.B == res.B
    assert back.shear_used == TWO_SLOPE_SHEAR and back.result_shear == res.result_shear
    assert matrices_equal(back.basis_used, res.basis_used)
    assert back.certificates == roundtrip(doc)["certificates"]
    assert dumps(doc) == dumps(rootfree_to_document(back))


def test_certificate_round_trip():
    for cert in (Certificate(True, None, F(22), "gauge"),
                 Certificate(False, F(-1, 2), F(-1), "identity")):
        assert certificate_from_document(roundtrip(certificate_to_document(cert))) == cert


def test_tree_round_trip():
    tree = reduce(two_slope_system(), order=8)
    doc = tree_to_document(tree)
    back = tree_from_document(roundtrip(doc))
    assert newton_polygon(back) == newton_polygon(tree)
    assert [lf.char_poly for lf in iter_leaves(back)] == [lf.char_poly for lf in iter_leaves(tree)]
    assert back.transform == tree.transform
    assert dumps(tree_to_document(back)) == dumps(doc)
    assert [c["length"] for c in doc["children"]] == [2, 3]


def test_refined_leaf_round_trip():
    a = PuiseuxMatrix(2, 1, 2, {0: identity(2), 1: as_matrix([[1, 0], [0, 2]])}, 6)
    doc = tree_to_document(reduce(a))
    assert doc["refinement"]["lambda"] == "-1/2"
    assert dumps(tree_to_document(tree_from_document(roundtrip(doc)))) == dumps(doc)


def test_unknown_tree_kind():
    with pytest.raises(ValueError, match="unknown tree node kind"):
        tree_from_document({"kind": "forest"})


def test_dumps_is_deterministic():
    res = rootfree_split(two_slope_system(), TWO_SLOPE_SHEAR, 4)
    again = rootfree_split(two_slope_system(), TWO_SLOPE_SHEAR, 4)
    text = dumps(rootfree_to_document(res))
    assert text == dumps(rootfree_to_document(again))
    assert text.endswith("\n") and list(json.loads(text)) == sorted(json.loads(text))
