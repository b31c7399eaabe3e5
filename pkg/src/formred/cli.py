"""Command-line interface.

Exit codes: 0 success, 1 usage, I/O or parse errors, 2 when a mathematical
precondition fails (the diagnostic names the condition).  Machine-readable
JSON goes to ``--out``; stdout carries a short human summary and stderr the
diagnostics.
"""

import argparse
import json
import os
import sys

from .conlinalg import BlockPartition
from .documents import (
    certificate_to_document, dumps, load_system, rootfree_from_document,
    rootfree_to_document, split_from_document, split_to_document,
    tree_from_document, tree_to_document,
)
from .errors import ConsistencyError, PreconditionError
from .exactfield import CycloNumber, format_rational
from .polynomials import format_poly
from .pseries import from_document as series_from_document
from .pseries import normalize
from .pseries import to_document as series_to_document
from .reduction import (
    DEFAULT_ORDER, Leaf, leading_exponentials, newton_polygon, reduce,
    rootfree_split, verify_equivalence,
)
from .shearing import Shearing, apply_shearing
from .splitting import split

ORDER_ENV = "FORMRED_ORDER"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# -- formatting -----------------------------------------------------------------

def format_scalar(v):
    if isinstance(v, CycloNumber):
        return repr(v).rsplit(" [", 1)[0]
    return format_rational(v)


def format_matrix(m, indent="    "):
    cells = [[format_scalar(v) for v in row] for row in m]
    width = max((len(c) for row in cells for c in row), default=1)
    return "\n".join(indent + "[" + " ".join(c.rjust(width) for c in row) + "]"
                     for row in cells)


def describe_series(a, label="system"):
    lines = [f"{label}: n={a.n} q={a.q} pole={a.pole} "
             f"known through exponent {format_rational(a.known_exponent)}"]
    if a.is_zero:
        lines.append("  (zero within the known range)")
    else:
        lines.append(f"  leading exponent {format_rational(a.valuation)} "
                     f"(index {a.leading_index}), leading matrix:")
        lines.append(format_matrix(a.leading_matrix))
    return "\n".join(lines)


def describe_tree(tree, indent=""):
    if isinstance(tree, Leaf):
        head = f"{indent}leaf ({tree.kind}), dimension {tree.dimension}"
        if tree.kind == "irregular":
            head += (f": q={tree.q} p={tree.p} slope={format_rational(tree.slope)} "
                     f"char poly {format_poly(tree.char_poly)}")
            if not tree.orbit_split:
                head += " [several w-orbits]"
        if tree.reason:
            head += f": {tree.reason}"
        out = [head]
        if tree.refinement is not None:
            lam, k, sub = tree.refinement
            out.append(f"{indent}  after exp({format_rational(lam)}/x^{k}):")
            out.append(describe_tree(sub, indent + "    "))
        return "\n".join(out)
    s = tree.shear
    out = [f"{indent}split {tree.partition.n1}+{tree.partition.n2} "
           f"(shearing q={s.q} exponents {list(s.exponents)}, order {tree.order})"]
    for child in tree.children:
        out.append(describe_tree(child, indent + "  "))
    return "\n".join(out)


# -- argument helpers -----------------------------------------------------------

def _default_order():
    raw = os.environ.get(ORDER_ENV)
    if raw is None:
        return DEFAULT_ORDER
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{ORDER_ENV} must be an integer, got {raw!r}") from None
    if value < 0:
        raise UsageError(f"{ORDER_ENV} must be non-negative")
    return value


def _read_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from None


def _read_system(path):
    try:
        return load_system(_read_json(path))
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _write(doc, path):
    if path is None:
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps(doc))
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None


def _shearing(args, n):
    try:
        exps = tuple(int(t) for t in args.exponents.split(","))
    except ValueError:
        raise UsageError(f"--exponents must be comma-separated integers: {args.exponents!r}") \
            from None
    if len(exps) != n:
        raise UsageError(f"--exponents has {len(exps)} entries, the system has dimension {n}")
    if args.q < 1:
        raise UsageError("--q must be a positive integer")
    return Shearing(args.q, exps)


def _order(args):
    order = args.order if args.order is not None else _default_order()
    if order < 0:
        raise UsageError("--order must be non-negative")
    return order


# -- commands -------------------------------------------------------------------

def cmd_split(args):
    a = normalize(_read_system(args.input))
    n1 = args.partition
    if not 0 < n1 < a.n:
        raise UsageError(f"--partition must lie strictly between 0 and {a.n}")
    res = split(a, BlockPartition(n1, a.n - n1), _order(args))
    _write(split_to_document(res), args.out)
    print(f"split {n1}+{a.n - n1}, certified through index {res.certified_through}")
    print(describe_series(res.result, "block-diagonal system"))


def cmd_shear(args):
    a = _read_system(args.input)
    s = _shearing(args, a.n)
    out = apply_shearing(a, s)
    _write(series_to_document(out), args.out)
    print(describe_series(out, "sheared system"))


def cmd_rootfree(args):
    a = _read_system(args.input)
    s = _shearing(args, a.n)
    res = rootfree_split(a, s, _order(args), verify=not args.no_verify)
    _write(rootfree_to_document(res), args.out)
    k = res.partition
    print(f"root-free split {k.n1}+{k.n2} through order {res.certified_through}")
    if "gauge" in res.certificates:
        print(f"  H[A] = B certified through exponent {res.certificates['gauge']}")
    print(describe_series(res.B, "block-diagonal system"))


def _tree_options(args):
    return dict(q_max=args.q_max, exponent_bound=args.exponent_bound, order=_order(args))


def _load_tree_or_reduce(args):
    doc = _read_json(args.input)
    if isinstance(doc, dict) and doc.get("kind") in ("node", "regular", "irregular",
                                                     "unresolved"):
        try:
            return tree_from_document(doc)
        except (ValueError, TypeError, KeyError) as exc:
            raise UsageError(f"{args.input}: {exc}") from None
    try:
        a = load_system(doc)
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"{args.input}: {exc}") from None
    return reduce(a, **_tree_options(args))


def cmd_reduce(args):
    a = _read_system(args.input)
    tree = reduce(a, **_tree_options(args))
    _write(tree_to_document(tree), args.out)
    print(describe_tree(tree))


def cmd_newton(args):
    tree = _load_tree_or_reduce(args)
    poly = newton_polygon(tree)
    doc = {"kind": "newton_polygon",
           "slopes": [{"slope": format_rational(s), "length": n} for s, n in poly],
           "exponentials": [
               {"slope": format_rational(e["slope"]), "q": e["q"], "root_of": e["root_of"],
                "terms": e["terms"]} for e in leading_exponentials(tree)]}
    _write(doc, args.out)
    if not poly:
        print("no irregular part")
    for s, n in poly:
        print(f"{format_rational(s)} {n}")


def _pair_from(args):
    doc = _read_json(args.transform)
    if args.result is None:
        kind = doc.get("kind") if isinstance(doc, dict) else None
        try:
            if kind == "rootfree":
                res = rootfree_from_document(doc)
                return res.H, res.B
            if kind == "split":
                res = split_from_document(doc)
                return res.transform, res.result
        except (ValueError, TypeError, KeyError) as exc:
            raise UsageError(f"{args.transform}: {exc}") from None
        raise UsageError("give H and B files, or one rootfree/split result document")
    try:
        return series_from_document(doc), load_system(_read_json(args.result))
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(str(exc)) from None


def cmd_verify(args):
    a = _read_system(args.input)
    h, b = _pair_from(args)
    cert = verify_equivalence(a, h, b)
    _write(certificate_to_document(cert), args.out)
    print(cert.describe())
    return 0 if cert.ok else 2


# -- entry point ----------------------------------------------------------------

def build_parser():
    parser = _Parser(prog="formred",
                     description="Exact formal reduction of x y' = A(x) y at x = 0.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, order=True):
        p.add_argument("input", help="system JSON file ('-' for stdin)")
        p.add_argument("--out", help="write the JSON result here")
        if order:
            p.add_argument("--order", type=int, default=None,
                           help=f"indices past the leading one (default {DEFAULT_ORDER}, "
                                f"or ${ORDER_ENV})")

    p = sub.add_parser("split", help="block-diagonalize along a partition")
    common(p)
    p.add_argument("--partition", type=int, required=True, help="size of the first block")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("shear", help="apply a shearing transformation")
    common(p, order=False)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--exponents", required=True, help="comma-separated integers")
    p.set_defaults(func=cmd_shear)

    p = sub.add_parser("rootfree", help="root-free splitting along a shearing")
    common(p)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--exponents", required=True, help="comma-separated integers")
    p.add_argument("--no-verify", action="store_true",
                   help="skip the independent gauge check")
    p.set_defaults(func=cmd_rootfree)

    for name, func, text in (("reduce", cmd_reduce, "recursive block decomposition"),
                             ("newton", cmd_newton, "Newton polygon slopes and lengths")):
        p = sub.add_parser(name, help=text)
        common(p)
        p.add_argument("--q-max", type=int, default=4)
        p.add_argument("--exponent-bound", type=int, default=2)
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="check H[A] = B")
    p.add_argument("input", help="system JSON file")
    p.add_argument("transform", help="H series, or a rootfree/split result document")
    p.add_argument("result", nargs="?", help="B series (omit with a result document)")
    p.add_argument("--out", help="write the certificate here")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code
    try:
        code = args.func(args)
    except UsageError as exc:
        print(f"formred: {exc}", file=sys.stderr)
        return 1
    except (PreconditionError, ConsistencyError) as exc:
        print(f"formred: {exc}", file=sys.stderr)
        return 2
    return 0 if code is None else code

