"""JSON documents for systems, results and decomposition trees.

Output is deterministic: keys are sorted and rationals are canonical
``"a/b"`` strings, so identical inputs produce byte-identical files.
"""

import json
from fractions import Fraction

import numpy as np

from .conlinalg import BlockPartition
from .exactfield import CycloNumber, cyclo_context, parse_rational, scalar_from_json, scalar_to_json
from .expressions import system_from_expressions
from .pseries import from_document as series_from_document
from .pseries import to_document as series_to_document
from .reduction import Certificate, Leaf, Node, RootFreeResult
from .shearing import Shearing
from .splitting import SplitResult

__all__ = [
    "dumps", "load_system", "matrix_to_document", "matrix_from_document",
    "split_to_document", "split_from_document", "rootfree_to_document",
    "rootfree_from_document", "tree_to_document", "tree_from_document",
    "certificate_to_document", "certificate_from_document",
]


def dumps(doc):
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_system(doc):
    """A system from either a series document or the expression sugar

    ``{"expressions": [[...]], "known_exponent": e, "multiplier_exponent": m}``.
    """
    if not isinstance(doc, dict):
        raise ValueError("system document must be a JSON object")
    if "expressions" in doc:
        try:
            known = parse_rational(doc["known_exponent"])
        except KeyError:
            raise ValueError("expression documents need 'known_exponent'") from None
        mult = parse_rational(doc.get("multiplier_exponent", 0))
        rows = doc["expressions"]
        if not isinstance(rows, list) or not rows:
            raise ValueError("'expressions' must be a non-empty list of rows")
        return system_from_expressions(rows, known, mult)
    return series_from_document(doc)


def matrix_to_document(m):
    doc = {"entries": [[scalar_to_json(v) for v in row] for row in m]}
    orders = {v.ctx.q for v in np.asarray(m).flat if isinstance(v, CycloNumber)}
    if orders:
        doc["field_order"] = orders.pop()
    return doc


def matrix_from_document(doc):
    rows = doc["entries"]
    ctx = cyclo_context(doc["field_order"]) if "field_order" in doc else None
    if not isinstance(rows, list) or any(not isinstance(r, list) or len(r) != len(rows[0])
                                         for r in rows):
        raise ValueError("matrix entries must be a rectangular list of rows")
    m = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, r in enumerate(rows):
        for k, v in enumerate(r):
            m[i, k] = scalar_from_json(v, ctx)
    return m


def _partition_doc(p):
    return [p.n1, p.n2]


def _partition_from(obj):
    if not (isinstance(obj, list) and len(obj) == 2 and all(isinstance(v, int) for v in obj)):
        raise ValueError("partition must be a pair of integers")
    return BlockPartition(*obj)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return scalar_to_json(obj)
    return obj


def split_to_document(res):
    return {
        "kind": "split",
        "partition": _partition_doc(res.partition),
        "certified_through": res.certified_through,
        "transform": series_to_document(res.transform),
        "result": series_to_document(res.result),
        "certificates": _jsonable(res.certificates),
    }


def split_from_document(doc):
    return SplitResult(
        transform=series_from_document(doc["transform"]),
        result=series_from_document(doc["result"]),
        partition=_partition_from(doc["partition"]),
        certified_through=doc["certified_through"],
        certificates=doc.get("certificates", {}),
    )


def rootfree_to_document(res):
    return {
        "kind": "rootfree",
        "H": series_to_document(res.H),
        "B": series_to_document(res.B),
        "partition": _partition_doc(res.partition),
        "shear": res.shear_used.to_document(),
        "basis": matrix_to_document(res.basis_used),
        "result_shear": res.result_shear.to_document(),
        "certified_through": res.certified_through,
        "certificates": _jsonable(res.certificates),
    }


def rootfree_from_document(doc):
    return RootFreeResult(
        H=series_from_document(doc["H"]),
        B=series_from_document(doc["B"]),
        partition=_partition_from(doc["partition"]),
        shear_used=Shearing.from_document(doc["shear"]),
        basis_used=matrix_from_document(doc["basis"]),
        result_shear=Shearing.from_document(doc["result_shear"]),
        certified_through=doc["certified_through"],
        certificates=doc.get("certificates", {}),
    )


def certificate_to_document(cert):
    return {
        "kind": "verification",
        "ok": cert.ok,
        "method": cert.method,
        "certified_exponent": scalar_to_json(cert.certified_exponent),
        "discrepancy": None if cert.discrepancy is None else scalar_to_json(cert.discrepancy),
    }


def certificate_from_document(doc):
    disc = doc.get("discrepancy")
    return Certificate(doc["ok"], None if disc is None else parse_rational(disc),
                       parse_rational(doc["certified_exponent"]), doc["method"])


def tree_to_document(tree):
    if isinstance(tree, Node):
        return {
            "kind": "node",
            "partition": _partition_doc(tree.partition),
            "shear": tree.shear.to_document(),
            "basis": matrix_to_document(tree.basis),
            "order": tree.order,
            "H": series_to_document(tree.transform),
            "B": series_to_document(tree.result),
            "children": [tree_to_document(c) for c in tree.children],
        }
    doc = {"kind": tree.kind, "dimension": tree.dimension,
           "system": series_to_document(tree.system)}
    if tree.shear is not None:
        doc["shear"] = tree.shear.to_document()
    if tree.kind == "irregular":
        doc.update({
            "q": tree.q,
            "p": tree.p,
            "slope": scalar_to_json(tree.slope),
            "char_poly": [scalar_to_json(c) for c in tree.char_poly],
            "orbit_split": tree.orbit_split,
            "length": tree.dimension,
        })
    if tree.reason is not None:
        doc["reason"] = tree.reason
    if tree.refinement is not None:
        lam, k, sub = tree.refinement
        doc["refinement"] = {"lambda": scalar_to_json(lam), "k": k,
                             "tree": tree_to_document(sub)}
    return doc


def tree_from_document(doc):
    kind = doc.get("kind")
    if kind == "node":
        return Node(
            transform=series_from_document(doc["H"]),
            result=series_from_document(doc["B"]),
            partition=_partition_from(doc["partition"]),
            shear=Shearing.from_document(doc["shear"]),
            basis=matrix_from_document(doc["basis"]),
            order=doc["order"],
            children=tuple(tree_from_document(c) for c in doc["children"]),
        )
    if kind not in ("regular", "irregular", "unresolved"):
        raise ValueError(f"unknown tree node kind {kind!r}")
    kwargs = {}
    if "shear" in doc:
        kwargs["shear"] = Shearing.from_document(doc["shear"])
    if kind == "irregular":
        kwargs.update(q=doc["q"], p=doc["p"], slope=parse_rational(doc["slope"]),
                      char_poly=tuple(parse_rational(c) for c in doc["char_poly"]),
                      orbit_split=doc["orbit_split"])
    if "reason" in doc:
        kwargs["reason"] = doc["reason"]
    if "refinement" in doc:
        ref = doc["refinement"]
        kwargs["refinement"] = (parse_rational(ref["lambda"]), ref["k"],
                                tree_from_document(ref["tree"]))
    return Leaf(kind, series_from_document(doc["system"]), **kwargs)
